#ifndef SIPSDP_RELAX_HPP
#define SIPSDP_RELAX_HPP

#include <optional>
#include <string>
#include <vector>

#include "sipsdp/moment_model.hpp"
#include "sipsdp/preprocess.hpp"
#include "sipsdp/sip.hpp"
#include "sipsdp/sos.hpp"

namespace sipsdp {

struct RelaxOptions {
  SdpSettings sdp;
  GridOptions grid;
  double rank_tol = 1e-6;       // numerical rank cutoff for flat extension
  double atom_feas_tol = 1e-6;  // atoms must satisfy g_j >= -tol
  bool multi_theta = false;     // all Theta_k <= 1 instead of Theta_r only
};

enum class RelaxKind { dsdp, psdp, sosconvex_dsdp, sosconvex_psdp, membership, support };

struct BuiltRelaxation {
  SdpProblem sdp;
  RelaxKind kind = RelaxKind::dsdp;
  int r = 0, t = 0;
  MomentLayout functional;          // x-side L for dual kinds, y-side H for primal
  std::vector<int> sigma_blocks;    // dual side: quadratic-module multipliers
  std::vector<int> localizing_blocks;  // primal side
  int q_block = -1;
  int rho_var = -1, eta_var = -1;
};

// dual relaxation: min L(f), M_r(L) psd, L(1)=1, L(Theta_r)<=1,
// L(p) in qmodule_t(G)
BuiltRelaxation build_dsdp(const SipProblem& prob, int r, int t,
                           const RelaxOptions& opts = {});
// primal relaxation: max rho - 2 eta with
// f - rho + eta (1 + Theta_r) = H(p) + sigma,  H in (qmodule_t(G))^*
BuiltRelaxation build_psdp(const SipProblem& prob, int r, int t,
                           const RelaxOptions& opts = {});
// sos-convex pair: functional truncated at d_P, no perturbation term
BuiltRelaxation build_sosconvex_dsdp(const SipProblem& prob, int t,
                                     const RelaxOptions& opts = {});
BuiltRelaxation build_sosconvex_psdp(const SipProblem& prob, int t,
                                     const RelaxOptions& opts = {});

struct MembershipResult {
  bool feasible = false;
  SolveStatus status = SolveStatus::failed;
};
MembershipResult membership_sdp(const SipProblem& prob, const std::vector<double>& point,
                                int r, int t, const RelaxOptions& opts = {});

struct SupportResult {
  SolveStatus status = SolveStatus::failed;
  double value = 0.0;
  std::vector<double> boundary_point;
};
SupportResult support_value(const SipProblem& prob, const std::vector<double>& direction,
                            int r, int t, const RelaxOptions& opts = {});

// the candidate minimizer (L(x_1), ..., L(x_m)) of a solved dual relaxation
std::vector<double> extract_minimizer(const BuiltRelaxation& built, const SolveReport& rep);

struct ActiveIndexResult {
  std::string status;  // "certified", "unverified", "none", or "failed: ..."
  FlatExtensionResult flat;
  std::vector<Atom> atoms;  // weights lambda_i at points y_i
};
ActiveIndexResult extract_active_indices(const MomentVector& H, int t, int d_S,
                                         const std::vector<Polynomial>& generators,
                                         const RelaxOptions& opts = {});

// substitute x -> tau_K x; returns the scaled instance (tau_K = 1) and the
// factor that maps extracted minimizers back
std::pair<SipProblem, double> scale_to_unit_ball(const SipProblem& prob);

struct ModeInfo {
  std::string requested = "auto";
  std::string resolved = "general";  // "general" or "sosconvex"
  bool univariate_interval = false;
  bool f_sos_convex = false;
  bool p_battery_sos_convex = false;
  int battery_size = 0;
};
ModeInfo detect_modes(const SipProblem& prob, const std::string& requested,
                      const RelaxOptions& opts = {});

struct HierarchyPoint {
  int r = 0, t = 0;
  SolveReport dsdp_report, psdp_report;
  double dsdp_value = 0.0, psdp_value = 0.0;
  std::vector<double> minimizer;
  double minimizer_margin = 0.0;  // min of p(minimizer, .) over the S-grid
  double jensen_gap = 0.0;        // L(f) - f(L(x))
  MomentVector index_functional;  // H
  ActiveIndexResult active;
  double dsdp_ms = 0.0, psdp_ms = 0.0;
};

struct HierarchyReport {
  ModeInfo mode;
  std::vector<HierarchyPoint> points;
  bool all_optimal = true;
  bool weak_duality_ok = true;     // psdp <= dsdp + tol at each point
  bool dual_monotone_in_t = true;  // at fixed r, dsdp nonincreasing in t
  std::optional<int> stagnation_t;  // first t with successive dual gap <= 1e-5
  std::vector<std::string> notes;
};

// schedule entries are (r, t); in sosconvex mode r is ignored, in the
// univariate-interval special case t is pinned at d_K
HierarchyReport run_hierarchy(const SipProblem& prob,
                              const std::vector<std::pair<int, int>>& schedule,
                              const ModeInfo& mode, const RelaxOptions& opts = {});

}  // namespace sipsdp

#endif

#ifndef SIPSDP_SDP_HPP
#define SIPSDP_SDP_HPP

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "sipsdp/errors.hpp"

namespace sipsdp {

enum class SolveStatus { optimal, infeasible, unbounded, inaccurate, failed };
std::string to_string(SolveStatus s);

struct SdpSettings {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  double ray_tol = 1e-8;
  double step_scale = 0.98;
  double init_scale = 100.0;
  int verbose = 0;

  // recognized keys: feas_tol, gap_tol, max_iter, ray_tol, step_scale,
  // init_scale, verbose
  static SdpSettings from_map(const std::map<std::string, double>& kv);
};

// Block-diagonal SDP in equality standard form:
//
//   min/max  <C, X> + c_f' u + c_n' v
//   s.t.     <A_k, X> + f_k' u + e_k' v = b_k        k = 1..K
//            X  block-diagonal PSD, v >= 0, u free
//
// A coefficient c on a block entry (i, j), i <= j, contributes c * X_ij to
// the row (each unordered pair counted once).
class SdpProblem {
 public:
  enum class Sense { minimize, maximize };

  struct MatEntry {
    int block, i, j;
    double coeff;
  };
  struct ScalarEntry {
    int index;
    double coeff;
  };
  struct Row {
    std::vector<MatEntry> mat;
    std::vector<ScalarEntry> free_terms;
    std::vector<ScalarEntry> nonneg_terms;
    double rhs = 0.0;
  };

  int add_psd_block(const std::string& name, int dim);
  int add_free_var(const std::string& name);
  int add_nonneg_var(const std::string& name);
  int add_equality(double rhs);

  void add_entry_coeff(int eq, int block, int i, int j, double coeff);
  void add_free_coeff(int eq, int var, double coeff);
  void add_nonneg_coeff(int eq, int var, double coeff);

  void add_objective_entry(int block, int i, int j, double coeff);
  void add_objective_free(int var, double coeff);
  void add_objective_nonneg(int var, double coeff);

  void set_sense(Sense s) { sense_ = s; }
  Sense sense() const { return sense_; }

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_free() const { return static_cast<int>(free_names_.size()); }
  int num_nonneg() const { return static_cast<int>(nonneg_names_.size()); }
  int num_equalities() const { return static_cast<int>(rows_.size()); }
  int block_dim(int b) const { return blocks_[static_cast<size_t>(b)].second; }
  const std::string& block_name(int b) const { return blocks_[static_cast<size_t>(b)].first; }
  const std::vector<std::pair<std::string, int>>& blocks() const { return blocks_; }
  const std::vector<std::string>& free_names() const { return free_names_; }
  const std::vector<std::string>& nonneg_names() const { return nonneg_names_; }
  const Row& row(int k) const { return rows_[static_cast<size_t>(k)]; }
  const Row& objective() const { return objective_; }

  void validate() const;

 private:
  Row& row_ref(int eq);
  void check_entry(int block, int i, int j) const;

  std::vector<std::pair<std::string, int>> blocks_;
  std::vector<std::string> free_names_, nonneg_names_;
  std::vector<Row> rows_;
  Row objective_;
  Sense sense_ = Sense::minimize;
};

struct SolveReport {
  SolveStatus status = SolveStatus::failed;
  double primal_value = 0.0;  // objective of (X, u, v), in the user's sense
  double dual_value = 0.0;    // b'y, in the user's sense
  std::vector<Eigen::MatrixXd> block_values;
  std::vector<double> free_values, nonneg_values;
  std::vector<double> dual_multipliers;
  int iterations = 0;
  double primal_residual = 0.0, dual_residual = 0.0, gap = 0.0;
  std::string message;

  bool ok() const { return status == SolveStatus::optimal; }
};

// Reference backend: primal-dual interior point, Nesterov-Todd scaling,
// Mehrotra predictor-corrector, dense linear algebra.
SolveReport solve(const SdpProblem& prob, const SdpSettings& settings = {});

// SDPA sparse (.dat-s) round trip.  Free variables are split into
// difference pairs and scalars become a diagonal block on export.
void export_sdpa(const SdpProblem& prob, const std::string& path);
std::string sdpa_text(const SdpProblem& prob);
SdpProblem import_sdpa(const std::string& path);
SdpProblem parse_sdpa(const std::string& text);

}  // namespace sipsdp

#endif

#ifndef SIPSDP_PREPROCESS_HPP
#define SIPSDP_PREPROCESS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "sipsdp/moments.hpp"
#include "sipsdp/sdp.hpp"
#include "sipsdp/sip.hpp"

namespace sipsdp {

struct GridOptions {
  int density = 50;                                // points per index dimension
  long max_points = 100000;                        // total grid cap
  std::vector<std::pair<double, double>> box;      // empty: estimate via moment bounds
  double feas_filter = 1e-9;                       // keep y with g_j(y) >= -filter
};

// Outer bounding box of S from low-order moment relaxations of max/min y_i.
std::vector<std::pair<double, double>> estimate_index_box(const SipProblem& prob,
                                                          const SdpSettings& settings = {});

// Grid points of the bounding box that pass the generator filter.
std::vector<Eigen::VectorXd> index_grid(const SipProblem& prob, const GridOptions& opts,
                                        const SdpSettings& settings = {});

// min over the S-grid of p(u, y); the grid resolution caveat is the caller's
double min_on_index_grid(const SipProblem& prob, const std::vector<double>& u,
                         const GridOptions& opts = {}, const SdpSettings& settings = {});

struct SlaterReport {
  double margin = 0.0;   // grid minimum of p(u, .), positive = verified at grid resolution
  long grid_points = 0;
  std::optional<double> certified_lower;  // bisected quadratic-module bound
};
SlaterReport slater_margin(const SipProblem& prob, const std::vector<double>& u,
                           const GridOptions& opts = {}, bool certify = false,
                           const SdpSettings& settings = {});

struct ExtendedSlaterReport {
  double margin_S = 0.0;    // min of p(u, .) over the S-grid
  double margin_hat = 0.0;  // min of the top form over the sphere slice
};
ExtendedSlaterReport extended_slater_check(const SipProblem& prob, const std::vector<double>& u,
                                           const GridOptions& opts = {},
                                           const SdpSettings& settings = {});

// Sphere-compactified instance: p homogenized in y, S lifted to
// { g_j^hom >= 0, y0 >= 0, |ytilde|^2 = 1 } with the equality written as an
// opposing inequality pair so the quadratic-module machinery applies as is.
struct HomogenizedInstance {
  SipProblem problem;
  std::vector<Polynomial> s_hat_generators;  // top forms + sphere pair, original y space
  std::string caveat;
};
HomogenizedInstance homogenize_instance(const SipProblem& prob);

struct OracleOptions {
  GridOptions grid;
  long max_constraints = 2000;  // dedup + even thinning beyond this
};

// Independent cross-check: the finite program min f(x) s.t. p(x, y_i) >= 0
// over the S-grid, solved as a moment relaxation with pointwise linear
// constraints.  Exact for sos-convex data, an approximation otherwise.
struct OracleResult {
  SolveStatus status = SolveStatus::failed;
  double value = 0.0;
  std::vector<double> minimizer;
  long grid_points = 0;
  long constraints_used = 0;
};
OracleResult discretization_oracle(const SipProblem& prob, const OracleOptions& opts = {},
                                   const SdpSettings& settings = {});

}  // namespace sipsdp

#endif

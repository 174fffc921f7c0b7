#ifndef SIPSDP_MOMENTS_HPP
#define SIPSDP_MOMENTS_HPP

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "sipsdp/poly.hpp"

namespace sipsdp {

// Shared index for the graded-lex monomial basis of degree <= max_degree.
class MonomialIndex {
 public:
  MonomialIndex() = default;
  MonomialIndex(int n, int max_degree);
  int n() const { return n_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(basis_.size()); }
  const std::vector<Monomial>& basis() const { return basis_; }
  const Monomial& at(int i) const { return basis_[static_cast<size_t>(i)]; }
  int index_of(const Monomial& m) const;        // throws if out of range
  int find(const Monomial& m) const;            // -1 if out of range

 private:
  int n_ = 0, max_degree_ = 0;
  std::vector<Monomial> basis_;
  std::map<Monomial, int> lookup_;
};

// Truncated linear functional on R[y]_{2k}; values in graded lex order.
struct MomentVector {
  int n = 0;
  int order = 0;  // k
  Eigen::VectorXd values;

  MomentVector() = default;
  MomentVector(int n_, int order_);
  int length() const { return static_cast<int>(values.size()); }
  double mass() const { return values.size() ? values[0] : 0.0; }
  bool probability_normalized(double tol = 1e-8) const;
  double at(const Monomial& m) const;
};

struct Atom {
  Eigen::VectorXd point;
  double weight = 0.0;
};

struct FlatExtensionResult {
  bool flat = false;
  int rank_low = 0;
  int rank_high = 0;
};

// Moments of the measure sum_i w_i * dirac(point_i), truncated at degree 2k.
MomentVector from_atoms(const std::vector<Atom>& atoms, int n, int k);

// M_k: entry (alpha, beta) = mv[alpha + beta]; requires k <= mv.order.
Eigen::MatrixXd moment_matrix(const MomentVector& mv, int k);

// Localizing matrix of g: indexed by degree <= k - ceil(deg g / 2),
// entry (alpha, beta) = sum_gamma g_gamma mv[alpha + beta + gamma].
Eigen::MatrixXd localizing_matrix(const MomentVector& mv, const Polynomial& g, int k);

// Count of singular values above rank_tol * sigma_max * max(dim).
int numerical_rank(const Eigen::MatrixXd& m, double rank_tol = 1e-6);

// rank M_{k-d_S} == rank M_k (with M_0 = [mv(1)] when k == d_S)
FlatExtensionResult flat_extension_check(const MomentVector& mv, int k, int d_S,
                                         double rank_tol = 1e-6);

// Recover the atoms of a flat moment vector: echelon basis of M_k,
// per-variable multiplication matrices, simultaneous diagonalization by a
// Schur decomposition of a random combination, weights from the resulting
// Vandermonde system.  Throws NumericalError when the reconstruction does
// not validate.
std::vector<Atom> extract_atoms(const MomentVector& mv, int k,
                                double rank_tol = 1e-6,
                                double recon_tol = 1e-6);

// Contract a bipolynomial against a moment vector over one block:
// mv over the X block maps p(x, y) to a polynomial in y and vice versa.
Polynomial apply_to_bipoly(const MomentVector& mv, const Polynomial& p,
                           VarBlock mv_block);

}  // namespace sipsdp

#endif

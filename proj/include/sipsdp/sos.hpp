#ifndef SIPSDP_SOS_HPP
#define SIPSDP_SOS_HPP

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "sipsdp/moments.hpp"
#include "sipsdp/poly.hpp"
#include "sipsdp/sdp.hpp"

namespace sipsdp {

// Monomial basis of a Gram matrix together with the product structure:
// for each monomial b_a * b_b the entry list (a, b, weight), weight 1 on the
// diagonal and 2 off it, so that coefficients of b' G b are plain sums.
struct GramBasis {
  std::vector<Monomial> basis;
  std::map<Monomial, std::vector<std::tuple<int, int, double>>> products;
};
GramBasis make_gram_basis(int n, int k);
GramBasis make_gram_basis(std::vector<Monomial> basis);

struct SosCertificate {
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  double residual = 0.0;

  Polynomial reconstruct(const VarSpace& space) const;
  double min_eigenvalue() const;
};

struct SosDecomposition {
  bool feasible = false;
  // largest lambda with gram - lambda I psd among valid decompositions;
  // negative values measure how far the polynomial is from the cone
  double margin = 0.0;
  SosCertificate certificate;  // meaningful when feasible
};

struct QuadraticModuleCertificate {
  std::vector<Polynomial> generators;  // g_0 = 1 first
  std::vector<SosCertificate> multipliers;
  int order = 0;
  double residual = 0.0;

  Polynomial reconstruct() const;
};

struct QmoduleResult {
  bool feasible = false;
  double margin = 0.0;
  QuadraticModuleCertificate certificate;
};

// h = b' G b with G psd over the degree <= half_degree basis.  The SDP
// maximizes the smallest admissible Gram eigenvalue; "infeasible" is a
// certified negative margin, backend trouble raises NumericalError.
SosDecomposition sos_decompose(const Polynomial& h, int half_degree,
                               const SdpSettings& settings = {});

// psi = sum_j g_j sigma_j with deg(g_j sigma_j) <= 2t.  Infeasibility is
// relative to the order t, not a proof of non-membership at higher orders.
QmoduleResult qmodule_membership(const Polynomial& psi,
                                 const std::vector<Polynomial>& generators, int t,
                                 const SdpSettings& settings = {});

// smallest eps with h + eps (1 + sum_i x_i^{2r}) a sum of squares
double eps_star(const Polynomial& h, int r, const SdpSettings& settings = {});

struct SosConvexityCheck {
  bool sos_convex = false;
  double margin = 0.0;
};

// Tests whether z' (Hessian h) z is a sum of squares with the Gram basis
// restricted to monomials linear in z.
SosConvexityCheck is_sos_convex_detail(const Polynomial& h,
                                       const SdpSettings& settings = {});
bool is_sos_convex(const Polynomial& h, const SdpSettings& settings = {});

// psi = sigma_0 + (1 - y^2) sigma_1 on a single index variable
QmoduleResult interval_certificate(const Polynomial& psi, int t,
                                   const SdpSettings& settings = {});

}  // namespace sipsdp

#endif

#include "sipsdp/sos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace sipsdp {

namespace {

int single_block_size(const Polynomial& p) {
  if (p.space().nx() > 0 && p.space().ny() > 0)
    throw PreconditionError("expected a polynomial over a single variable block");
  return p.space().size();
}

double feas_threshold(const Polynomial& p) {
  return 1e-7 * std::max(1.0, p.max_abs_coeff());
}

}  // namespace

GramBasis make_gram_basis(std::vector<Monomial> basis) {
  GramBasis gb;
  gb.basis = std::move(basis);
  const int N = static_cast<int>(gb.basis.size());
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      Monomial prod = gb.basis[static_cast<size_t>(a)] * gb.basis[static_cast<size_t>(b)];
      gb.products[prod].emplace_back(a, b, a == b ? 1.0 : 2.0);
    }
  return gb;
}

GramBasis make_gram_basis(int n, int k) { return make_gram_basis(monomial_basis(n, k)); }

Polynomial SosCertificate::reconstruct(const VarSpace& space) const {
  Polynomial out(space);
  const int N = static_cast<int>(basis.size());
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      double w = (a == b ? 1.0 : 2.0) * gram(a, b);
      if (w != 0.0) out.add_term(basis[static_cast<size_t>(a)] * basis[static_cast<size_t>(b)], w);
    }
  return out;
}

double SosCertificate::min_eigenvalue() const {
  if (gram.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Polynomial QuadraticModuleCertificate::reconstruct() const {
  Polynomial out(generators.front().space());
  for (size_t j = 0; j < generators.size(); ++j)
    out = out + generators[j] * multipliers[j].reconstruct(out.space());
  return out;
}

QmoduleResult qmodule_membership(const Polynomial& psi,
                                 const std::vector<Polynomial>& generators, int t,
                                 const SdpSettings& settings) {
  const int n = single_block_size(psi);
  if (psi.degree() > 2 * t)
    throw PreconditionError("qmodule order too small: deg(psi) > 2t");

  std::vector<Polynomial> gens;
  gens.push_back(Polynomial::constant(psi.space(), 1.0));
  for (const auto& g : generators) {
    if (g.space() != psi.space())
      throw DimensionError("generator space does not match the polynomial");
    if (g.degree() > 2 * t)
      throw PreconditionError("qmodule order too small: deg(g_j) > 2t");
    gens.push_back(g);
  }

  SdpProblem prob;
  std::vector<GramBasis> bases;
  std::vector<int> blocks;
  for (size_t j = 0; j < gens.size(); ++j) {
    int dj = (gens[j].degree() + 1) / 2;
    bases.push_back(make_gram_basis(n, t - dj));
    blocks.push_back(prob.add_psd_block("sigma" + std::to_string(j),
                                        static_cast<int>(bases.back().basis.size())));
  }
  int lam = prob.add_free_var("margin");

  // one row per monomial of degree <= 2t:
  //   sum_j g_j * (X_j + lambda I) reconstructs psi
  MonomialIndex rows(n, 2 * t);
  std::vector<int> eq(static_cast<size_t>(rows.size()));
  for (int i = 0; i < rows.size(); ++i)
    eq[static_cast<size_t>(i)] = prob.add_equality(psi.coeff(rows.at(i)));
  for (size_t j = 0; j < gens.size(); ++j) {
    for (const auto& [gm, gc] : gens[j].terms()) {
      for (const auto& [prod, entries] : bases[j].products) {
        int r = rows.index_of(prod * gm);
        for (const auto& [a, b, w] : entries)
          prob.add_entry_coeff(eq[static_cast<size_t>(r)], blocks[j], a, b, gc * w);
      }
      for (size_t a = 0; a < bases[j].basis.size(); ++a) {
        Monomial sq = bases[j].basis[a] * bases[j].basis[a];
        prob.add_free_coeff(eq[static_cast<size_t>(rows.index_of(sq * gm))], lam, gc);
      }
    }
  }
  prob.add_objective_free(lam, 1.0);
  prob.set_sense(SdpProblem::Sense::maximize);

  SolveReport rep = solve(prob, settings);
  if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::inaccurate)
    throw NumericalError("qmodule membership solve " + to_string(rep.status) +
                         (rep.message.empty() ? "" : ": " + rep.message));

  QmoduleResult res;
  res.margin = rep.free_values[static_cast<size_t>(lam)];
  res.feasible = res.margin >= -feas_threshold(psi);
  if (res.feasible) {
    res.certificate.generators = gens;
    res.certificate.order = t;
    double shift = std::max(res.margin, 0.0);
    for (size_t j = 0; j < gens.size(); ++j) {
      SosCertificate c;
      c.basis = bases[j].basis;
      c.gram = rep.block_values[static_cast<size_t>(blocks[j])] +
               shift * Eigen::MatrixXd::Identity(
                           static_cast<Eigen::Index>(c.basis.size()),
                           static_cast<Eigen::Index>(c.basis.size()));
      res.certificate.multipliers.push_back(std::move(c));
    }
    Polynomial diff = res.certificate.reconstruct() - psi;
    res.certificate.residual = diff.max_abs_coeff();
    for (auto& m : res.certificate.multipliers) m.residual = res.certificate.residual;
  }
  return res;
}

SosDecomposition sos_decompose(const Polynomial& h, int half_degree,
                               const SdpSettings& settings) {
  if (h.degree() > 2 * half_degree)
    throw PreconditionError("half degree too small for the polynomial");
  QmoduleResult qm = qmodule_membership(h, {}, half_degree, settings);
  SosDecomposition out;
  out.feasible = qm.feasible;
  out.margin = qm.margin;
  if (qm.feasible) out.certificate = qm.certificate.multipliers.front();
  return out;
}

double eps_star(const Polynomial& h, int r, const SdpSettings& settings) {
  const int n = single_block_size(h);
  if (2 * r < h.degree())
    throw PreconditionError("eps_star requires r >= ceil(deg(h)/2)");

  SdpProblem prob;
  GramBasis gb = make_gram_basis(n, r);
  int blk = prob.add_psd_block("gram", static_cast<int>(gb.basis.size()));
  int eps = prob.add_free_var("eps");

  MonomialIndex rows(n, 2 * r);
  for (int i = 0; i < rows.size(); ++i) {
    const Monomial& m = rows.at(i);
    int e = prob.add_equality(h.coeff(m));
    auto it = gb.products.find(m);
    if (it != gb.products.end())
      for (const auto& [a, b, w] : it->second) prob.add_entry_coeff(e, blk, a, b, w);
    bool perturbed = m.degree() == 0;
    if (m.degree() == 2 * r) {
      int nz = 0;
      for (int v = 0; v < n; ++v)
        if (m[v] != 0) ++nz;
      if (nz == 1) perturbed = true;
    }
    if (perturbed) prob.add_free_coeff(e, eps, -1.0);
  }
  prob.add_objective_free(eps, 1.0);
  prob.set_sense(SdpProblem::Sense::minimize);

  SolveReport rep = solve(prob, settings);
  if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::inaccurate)
    throw NumericalError("eps_star solve " + to_string(rep.status));
  return rep.free_values[static_cast<size_t>(eps)];
}

SosConvexityCheck is_sos_convex_detail(const Polynomial& h, const SdpSettings& settings) {
  const VarSpace& hs = h.space();
  if (hs.nx() == 0 && hs.ny() > 0)
    throw PreconditionError("sos-convexity applies to decision-variable polynomials");
  if (h.block_degree(VarBlock::Y) > 0)
    throw PreconditionError("sos-convexity input must not involve index variables");
  const int m = hs.nx() > 0 ? hs.nx() : hs.size();

  int deg = h.degree();
  if (deg <= 1) return {true, 0.0};

  std::vector<std::string> zn;
  for (int i = 0; i < m; ++i) zn.push_back("__z" + std::to_string(i + 1));
  VarSpace zs(hs.x_names(), zn);

  // z' (Hessian h) z as a polynomial in (x, z)
  Polynomial form(zs);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      Polynomial hij = h.derivative(i).derivative(j);
      for (const auto& [mono, c] : hij.terms()) {
        std::vector<int> e(static_cast<size_t>(zs.size()), 0);
        for (int v = 0; v < m; ++v) e[static_cast<size_t>(v)] = mono[v];
        e[static_cast<size_t>(m + i)] += 1;
        e[static_cast<size_t>(m + j)] += 1;
        form.add_term(Monomial(std::move(e)), c);
      }
    }
  if (form.is_zero()) return {true, 0.0};

  // Gram basis restricted to monomials of z-degree exactly one
  int kx = (deg - 2 + 1) / 2;
  std::vector<Monomial> basis;
  for (const auto& xb : monomial_basis(m, kx)) {
    for (int i = 0; i < m; ++i) {
      std::vector<int> e(static_cast<size_t>(zs.size()), 0);
      for (int v = 0; v < m; ++v) e[static_cast<size_t>(v)] = xb[v];
      e[static_cast<size_t>(m + i)] = 1;
      basis.emplace_back(std::move(e));
    }
  }
  GramBasis gb = make_gram_basis(std::move(basis));

  SdpProblem prob;
  int blk = prob.add_psd_block("gram", static_cast<int>(gb.basis.size()));
  int lam = prob.add_free_var("margin");
  std::map<Monomial, int> eq;
  for (const auto& [prod, entries] : gb.products) {
    auto [it, fresh] = eq.emplace(prod, -1);
    if (fresh) it->second = prob.add_equality(form.coeff(prod));
    for (const auto& [a, b, w] : entries) prob.add_entry_coeff(it->second, blk, a, b, w);
  }
  for (const auto& [mono, c] : form.terms())
    if (!eq.count(mono))
      throw NumericalError("hessian form outside the z-linear basis span");
  for (size_t a = 0; a < gb.basis.size(); ++a) {
    Monomial sq = gb.basis[a] * gb.basis[a];
    prob.add_free_coeff(eq.at(sq), lam, 1.0);
  }
  prob.add_objective_free(lam, 1.0);
  prob.set_sense(SdpProblem::Sense::maximize);

  SolveReport rep = solve(prob, settings);
  if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::inaccurate)
    throw NumericalError("sos-convexity solve " + to_string(rep.status));
  double margin = rep.free_values[static_cast<size_t>(lam)];
  return {margin >= -feas_threshold(form), margin};
}

bool is_sos_convex(const Polynomial& h, const SdpSettings& settings) {
  return is_sos_convex_detail(h, settings).sos_convex;
}

QmoduleResult interval_certificate(const Polynomial& psi, int t,
                                   const SdpSettings& settings) {
  if (single_block_size(psi) != 1)
    throw PreconditionError("interval certificates need exactly one index variable");
  Polynomial g(psi.space());
  g.add_term(Monomial({0}), 1.0);
  g.add_term(Monomial({2}), -1.0);
  return qmodule_membership(psi, {g}, t, settings);
}

}  // namespace sipsdp

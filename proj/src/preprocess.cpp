#include "sipsdp/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sipsdp/moment_model.hpp"
#include "sipsdp/sos.hpp"

namespace sipsdp {

namespace {

// p with the decision block fixed at u, as a polynomial over the index space
Polynomial fix_decision_point(const SipProblem& prob, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != prob.m())
    throw DimensionError("point has wrong decision dimension");
  VarSpace ys = prob.index_space();
  Polynomial out(ys);
  const int m = prob.m();
  const int n = prob.n();
  for (const auto& [mono, c] : prob.p.terms()) {
    double w = c;
    for (int i = 0; i < m; ++i)
      for (int e = 0; e < mono[i]; ++e) w *= u[static_cast<size_t>(i)];
    std::vector<int> ye(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ye[static_cast<size_t>(i)] = mono[m + i];
    out.add_term(Monomial(std::move(ye)), w);
  }
  return out;
}

}  // namespace

std::vector<std::pair<double, double>> estimate_index_box(const SipProblem& prob,
                                                          const SdpSettings& settings) {
  prob.validate();
  const int n = prob.n();
  int tb = std::max(prob.d_S(), 1);
  std::vector<std::pair<double, double>> box(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int side = 0; side < 2; ++side) {
      SdpProblem sdp;
      MomentLayout H = make_moment_layout(sdp, n, 2 * tb, "H");
      add_localizing_blocks(sdp, H, prob.generators, tb, "loc");
      int norm = sdp.add_equality(1.0);
      H.add_term(sdp, norm, Monomial::constant(n), 1.0);
      H.add_term(sdp, -1, Monomial::unit(n, i), 1.0);
      sdp.set_sense(side == 0 ? SdpProblem::Sense::minimize : SdpProblem::Sense::maximize);
      SolveReport rep = solve(sdp, settings);
      if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::inaccurate)
        throw NumericalError(
            "index box estimation failed (" + to_string(rep.status) +
            "); the index set may be noncompact, homogenize or supply y_box");
      double v = rep.primal_value;
      if (side == 0) box[static_cast<size_t>(i)].first = v - 1e-9 * (1 + std::abs(v));
      else box[static_cast<size_t>(i)].second = v + 1e-9 * (1 + std::abs(v));
    }
  }
  return box;
}

std::vector<Eigen::VectorXd> index_grid(const SipProblem& prob, const GridOptions& opts,
                                        const SdpSettings& settings) {
  const int n = prob.n();
  auto box = opts.box;
  if (box.empty()) box = estimate_index_box(prob, settings);
  if (static_cast<int>(box.size()) != n) throw DimensionError("y_box has wrong dimension");

  int density = std::max(opts.density, 2);
  while (std::pow(static_cast<double>(density), n) > static_cast<double>(opts.max_points) &&
         density > 2)
    --density;

  std::vector<Eigen::VectorXd> pts;
  std::vector<int> idx(static_cast<size_t>(n), 0);
  Eigen::VectorXd y(n);
  for (;;) {
    for (int i = 0; i < n; ++i) {
      auto [lo, hi] = box[static_cast<size_t>(i)];
      y[i] = lo + (hi - lo) * idx[static_cast<size_t>(i)] / (density - 1);
    }
    bool ok = true;
    for (const auto& g : prob.generators) {
      std::vector<double> yv(y.data(), y.data() + n);
      if (g.evaluate(yv) < -opts.feas_filter) {
        ok = false;
        break;
      }
    }
    if (ok) pts.push_back(y);
    int d = n - 1;
    while (d >= 0 && ++idx[static_cast<size_t>(d)] == density) {
      idx[static_cast<size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  if (pts.empty()) throw NumericalError("index grid is empty: box does not meet the index set");
  return pts;
}

double min_on_index_grid(const SipProblem& prob, const std::vector<double>& u,
                         const GridOptions& opts, const SdpSettings& settings) {
  Polynomial psi = fix_decision_point(prob, u);
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : index_grid(prob, opts, settings)) {
    std::vector<double> yv(y.data(), y.data() + y.size());
    best = std::min(best, psi.evaluate(yv));
  }
  return best;
}

SlaterReport slater_margin(const SipProblem& prob, const std::vector<double>& u,
                           const GridOptions& opts, bool certify,
                           const SdpSettings& settings) {
  prob.validate();
  SlaterReport rep;
  Polynomial psi = fix_decision_point(prob, u);
  auto grid = index_grid(prob, opts, settings);
  rep.grid_points = static_cast<long>(grid.size());
  double best = std::numeric_limits<double>::infinity();
  for (const auto& y : grid) {
    std::vector<double> yv(y.data(), y.data() + y.size());
    best = std::min(best, psi.evaluate(yv));
  }
  rep.margin = best;

  if (certify && best > 0) {
    // bisect the largest delta with psi - delta still in the quadratic module
    int t = prob.d_K() + 1;
    double lo = 0.0, hi = best;
    bool any = false;
    for (int it = 0; it < 8; ++it) {
      double mid = it == 0 ? best * 0.5 : 0.5 * (lo + hi);
      Polynomial shifted = psi - Polynomial::constant(psi.space(), mid);
      bool ok = false;
      try {
        ok = qmodule_membership(shifted, prob.generators, t, settings).feasible;
      } catch (const NumericalError&) {
        ok = false;
      }
      if (ok) {
        lo = mid;
        any = true;
      } else {
        hi = mid;
      }
    }
    if (any) rep.certified_lower = lo;
  }
  return rep;
}

ExtendedSlaterReport extended_slater_check(const SipProblem& prob,
                                           const std::vector<double>& u,
                                           const GridOptions& opts,
                                           const SdpSettings& settings) {
  prob.validate();
  ExtendedSlaterReport rep;
  rep.margin_S = slater_margin(prob, u, opts, false, settings).margin;

  // top form of p against the sphere slice of the homogenized index set
  Polynomial phat_xy = prob.p.highest_degree_form(VarBlock::Y);
  SipProblem hat;
  hat.f = prob.f;
  hat.p = phat_xy;
  hat.generators = prob.generators;
  Polynomial psi = fix_decision_point(hat, u);

  const int n = prob.n();
  std::vector<Polynomial> tops;
  for (const auto& g : prob.generators) tops.push_back(g.highest_degree_form(VarBlock::Y));

  // directions from a box grid, normalized onto the unit sphere
  GridOptions dir_opts = opts;
  dir_opts.box.assign(static_cast<size_t>(n), {-1.0, 1.0});
  int density = std::max(dir_opts.density, 2);
  while (std::pow(static_cast<double>(density), n) > static_cast<double>(dir_opts.max_points) &&
         density > 2)
    --density;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<size_t>(n), 0);
  bool found = false;
  for (;;) {
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = -1.0 + 2.0 * idx[static_cast<size_t>(i)] / (density - 1);
    double nrm = y.norm();
    if (nrm >= 0.3) {
      y /= nrm;
      std::vector<double> yv(y.data(), y.data() + n);
      bool ok = true;
      for (const auto& g : tops)
        if (g.evaluate(yv) < -opts.feas_filter) ok = false;
      if (ok) {
        best = std::min(best, psi.evaluate(yv));
        found = true;
      }
    }
    int d = n - 1;
    while (d >= 0 && ++idx[static_cast<size_t>(d)] == density) {
      idx[static_cast<size_t>(d)] = 0;
      --d;
    }
    if (d < 0) break;
  }
  // an empty sphere slice leaves the extended condition vacuously satisfied
  rep.margin_hat = found ? best : std::numeric_limits<double>::infinity();
  return rep;
}

HomogenizedInstance homogenize_instance(const SipProblem& prob) {
  prob.validate();
  HomogenizedInstance out;

  Polynomial p_hom = prob.p.homogenize_block(VarBlock::Y);
  const VarSpace& hs = p_hom.space();
  VarSpace hys({}, hs.y_names());
  const int hn = hys.size();

  // objective re-indexed into the extended space (no index variables in f)
  Polynomial f_h(hs);
  for (const auto& [mono, c] : prob.f.terms()) {
    std::vector<int> e(static_cast<size_t>(hs.size()), 0);
    for (int i = 0; i < prob.m(); ++i) e[static_cast<size_t>(i)] = mono[i];
    f_h.add_term(Monomial(std::move(e)), c);
  }

  std::vector<Polynomial> gens;
  for (const auto& g : prob.generators) {
    Polynomial gh = g.homogenize_block(VarBlock::Y);
    if (gh.space() != hys) throw NumericalError("inconsistent homogenization variable name");
    gens.push_back(gh);
  }
  gens.push_back(Polynomial::variable(hys, 0));  // y0 >= 0
  Polynomial sphere_le(hys), sphere_ge(hys);     // |ytilde|^2 = 1 as a pair
  sphere_le.add_term(Monomial::constant(hn), 1.0);
  sphere_ge.add_term(Monomial::constant(hn), -1.0);
  for (int i = 0; i < hn; ++i) {
    sphere_le.add_term(Monomial::unit(hn, i, 2), -1.0);
    sphere_ge.add_term(Monomial::unit(hn, i, 2), 1.0);
  }
  gens.push_back(sphere_le);
  gens.push_back(sphere_ge);

  out.problem.f = f_h;
  out.problem.p = p_hom;
  out.problem.generators = gens;
  out.problem.tau_K = prob.tau_K;

  VarSpace ys = prob.index_space();
  const int n = prob.n();
  for (const auto& g : prob.generators)
    out.s_hat_generators.push_back(g.highest_degree_form(VarBlock::Y));
  Polynomial sp_le(ys), sp_ge(ys);
  sp_le.add_term(Monomial::constant(n), 1.0);
  sp_ge.add_term(Monomial::constant(n), -1.0);
  for (int i = 0; i < n; ++i) {
    sp_le.add_term(Monomial::unit(n, i, 2), -1.0);
    sp_ge.add_term(Monomial::unit(n, i, 2), 1.0);
  }
  out.s_hat_generators.push_back(sp_le);
  out.s_hat_generators.push_back(sp_ge);

  out.caveat = "generic_equality: the lifted feasible set equals the original "
               "one for generic index sets; in general it is contained in it";
  return out;
}

OracleResult discretization_oracle(const SipProblem& prob, const OracleOptions& opts,
                                   const SdpSettings& settings) {
  prob.validate();
  OracleResult out;
  auto grid = index_grid(prob, opts.grid, settings);
  out.grid_points = static_cast<long>(grid.size());

  const int m = prob.m();
  int k = std::max((prob.d_P() + 1) / 2, 1);
  MonomialIndex xmono(m, prob.d_x());

  // coefficient profile of p(., y) at a grid point, deduplicated by direction
  std::map<std::vector<long long>, std::vector<double>> unique;
  bool trivially_infeasible = false;
  for (const auto& y : grid) {
    std::vector<double> c(static_cast<size_t>(xmono.size()), 0.0);
    for (const auto& [mono, v] : prob.p.terms()) {
      double w = v;
      for (int i = 0; i < prob.n(); ++i)
        for (int e = 0; e < mono[m + i]; ++e) w *= y[i];
      std::vector<int> xe(static_cast<size_t>(m));
      for (int i = 0; i < m; ++i) xe[static_cast<size_t>(i)] = mono[i];
      c[static_cast<size_t>(xmono.index_of(Monomial(std::move(xe))))] += w;
    }
    double mx = 0.0;
    for (double v : c) mx = std::max(mx, std::abs(v));
    if (mx <= 1e-12) continue;  // vacuous row
    bool only_const = true;
    for (size_t i = 1; i < c.size(); ++i)
      if (std::abs(c[i]) > 1e-12 * mx) only_const = false;
    if (only_const) {
      if (c[0] < -1e-12) trivially_infeasible = true;
      continue;
    }
    std::vector<long long> key(c.size());
    for (size_t i = 0; i < c.size(); ++i)
      key[i] = std::llround(c[i] / mx * 1e9);
    unique.emplace(std::move(key), std::move(c));
  }
  if (trivially_infeasible) {
    out.status = SolveStatus::infeasible;
    return out;
  }

  std::vector<const std::vector<double>*> kept;
  long total = static_cast<long>(unique.size());
  long stride = std::max<long>(1, (total + opts.max_constraints - 1) / opts.max_constraints);
  long i = 0;
  for (const auto& [key, c] : unique) {
    if (i % stride == 0) kept.push_back(&c);
    ++i;
  }
  out.constraints_used = static_cast<long>(kept.size());

  SdpProblem sdp;
  MomentLayout L = make_moment_layout(sdp, m, 2 * k, "L");
  int norm = sdp.add_equality(1.0);
  L.add_term(sdp, norm, Monomial::constant(m), 1.0);
  for (const auto* c : kept) {
    int w = sdp.add_nonneg_var("s" + std::to_string(sdp.num_nonneg()));
    int eq = sdp.add_equality(0.0);
    for (int j = 0; j < xmono.size(); ++j)
      if ((*c)[static_cast<size_t>(j)] != 0.0)
        L.add_term(sdp, eq, xmono.at(j), (*c)[static_cast<size_t>(j)]);
    sdp.add_nonneg_coeff(eq, w, -1.0);
  }
  for (const auto& [mono, c] : prob.f.terms()) {
    std::vector<int> xe(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) xe[static_cast<size_t>(j)] = mono[j];
    L.add_term(sdp, -1, Monomial(std::move(xe)), c);
  }
  sdp.set_sense(SdpProblem::Sense::minimize);

  SolveReport rep = solve(sdp, settings);
  out.status = rep.status;
  out.value = rep.primal_value;
  out.minimizer.resize(static_cast<size_t>(m));
  if (rep.status == SolveStatus::optimal || rep.status == SolveStatus::inaccurate)
    for (int j = 0; j < m; ++j)
      out.minimizer[static_cast<size_t>(j)] = L.value(rep, Monomial::unit(m, j));
  return out;
}

}  // namespace sipsdp

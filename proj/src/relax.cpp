#include "sipsdp/relax.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace sipsdp {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// y-monomial -> list of (x-monomial over m vars, coefficient)
std::map<Monomial, std::vector<std::pair<Monomial, double>>> split_bipoly(
    const Polynomial& p) {
  const int m = p.space().nx();
  const int n = p.space().ny();
  std::map<Monomial, std::vector<std::pair<Monomial, double>>> out;
  for (const auto& [mono, c] : p.terms()) {
    std::vector<int> xe(static_cast<size_t>(m)), ye(static_cast<size_t>(n));
    for (int i = 0; i < m; ++i) xe[static_cast<size_t>(i)] = mono[i];
    for (int i = 0; i < n; ++i) ye[static_cast<size_t>(i)] = mono[m + i];
    out[Monomial(std::move(ye))].emplace_back(Monomial(std::move(xe)), c);
  }
  return out;
}

// the objective f as x-monomial/coefficient pairs over m variables
std::vector<std::pair<Monomial, double>> objective_terms(const SipProblem& prob) {
  std::vector<std::pair<Monomial, double>> out;
  const int m = prob.m();
  for (const auto& [mono, c] : prob.f.terms()) {
    std::vector<int> xe(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) xe[static_cast<size_t>(i)] = mono[i];
    out.emplace_back(Monomial(std::move(xe)), c);
  }
  return out;
}

// add the constraint "L(p) is in qmodule_t(G)": sigma gram blocks plus one
// coefficient-matching row per y-monomial of degree <= 2t
std::vector<int> add_qmodule_rows(SdpProblem& sdp, const SipProblem& prob,
                                  const MomentLayout& L, int t) {
  const int n = prob.n();
  if (prob.d_y() > 2 * t)
    throw PreconditionError("t < d_K: the index degree of p exceeds 2t");

  std::vector<Polynomial> gens;
  gens.push_back(Polynomial::constant(prob.index_space(), 1.0));
  for (const auto& g : prob.generators) {
    if (g.degree() > 2 * t) throw PreconditionError("t < d_K: generator degree exceeds 2t");
    gens.push_back(g);
  }

  std::vector<int> blocks;
  std::vector<GramBasis> bases;
  for (size_t j = 0; j < gens.size(); ++j) {
    int dj = (gens[j].degree() + 1) / 2;
    bases.push_back(make_gram_basis(n, t - dj));
    blocks.push_back(sdp.add_psd_block("sigma" + std::to_string(j),
                                       static_cast<int>(bases.back().basis.size())));
  }

  MonomialIndex rows(n, 2 * t);
  std::vector<int> eq(static_cast<size_t>(rows.size()));
  for (int i = 0; i < rows.size(); ++i) eq[static_cast<size_t>(i)] = sdp.add_equality(0.0);

  for (const auto& [ymono, xterms] : split_bipoly(prob.p)) {
    int r = rows.index_of(ymono);
    for (const auto& [xm, c] : xterms) L.add_term(sdp, eq[static_cast<size_t>(r)], xm, c);
  }
  for (size_t j = 0; j < gens.size(); ++j)
    for (const auto& [gm, gc] : gens[j].terms())
      for (const auto& [prod, entries] : bases[j].products) {
        int r = rows.index_of(prod * gm);
        for (const auto& [a, b, w] : entries)
          sdp.add_entry_coeff(eq[static_cast<size_t>(r)], blocks[j], a, b, -gc * w);
      }
  return blocks;
}

void add_theta_row(SdpProblem& sdp, const MomentLayout& L, const SipProblem& prob, int k) {
  int eq = sdp.add_equality(1.0);
  double w = std::pow(1.0 / prob.tau_K, 2 * k);
  for (int i = 0; i < prob.m(); ++i)
    L.add_term(sdp, eq, Monomial::unit(prob.m(), i, 2 * k), w);
  int slack = sdp.add_nonneg_var("theta_slack_" + std::to_string(k));
  sdp.add_nonneg_coeff(eq, slack, 1.0);
}

BuiltRelaxation build_lambda_constraints(const SipProblem& prob, int r, int t,
                                         const RelaxOptions& opts, RelaxKind kind) {
  prob.validate();
  if (!prob.has_tau())
    throw PreconditionError("tau_K is required for the perturbation constraint");
  if (t < prob.d_K()) throw PreconditionError("t < d_K");

  BuiltRelaxation built;
  built.kind = kind;
  built.r = r;
  built.t = t;
  built.functional = make_moment_layout(built.sdp, prob.m(), 2 * r, "L");

  int norm = built.sdp.add_equality(1.0);
  built.functional.add_term(built.sdp, norm, Monomial::constant(prob.m()), 1.0);
  if (opts.multi_theta) {
    for (int k = std::max((prob.d_x() + 1) / 2, 1); k <= r; ++k)
      add_theta_row(built.sdp, built.functional, prob, k);
  } else {
    add_theta_row(built.sdp, built.functional, prob, r);
  }
  built.sigma_blocks = add_qmodule_rows(built.sdp, prob, built.functional, t);
  return built;
}

}  // namespace

BuiltRelaxation build_dsdp(const SipProblem& prob, int r, int t, const RelaxOptions& opts) {
  if (2 * r < prob.d_P()) throw PreconditionError("r < ceil(d_P / 2)");
  BuiltRelaxation built = build_lambda_constraints(prob, r, t, opts, RelaxKind::dsdp);
  for (const auto& [xm, c] : objective_terms(prob))
    built.functional.add_term(built.sdp, -1, xm, c);
  built.sdp.set_sense(SdpProblem::Sense::minimize);
  return built;
}

BuiltRelaxation build_sosconvex_dsdp(const SipProblem& prob, int t,
                                     const RelaxOptions& opts) {
  prob.validate();
  if (t < prob.d_K()) throw PreconditionError("t < d_K");
  BuiltRelaxation built;
  built.kind = RelaxKind::sosconvex_dsdp;
  built.t = t;
  built.functional = make_moment_layout(built.sdp, prob.m(), prob.d_P(), "L");
  int norm = built.sdp.add_equality(1.0);
  built.functional.add_term(built.sdp, norm, Monomial::constant(prob.m()), 1.0);
  built.sigma_blocks = add_qmodule_rows(built.sdp, prob, built.functional, t);
  for (const auto& [xm, c] : objective_terms(prob))
    built.functional.add_term(built.sdp, -1, xm, c);
  built.sdp.set_sense(SdpProblem::Sense::minimize);
  return built;
}

namespace {

// shared primal-side builder; with_theta distinguishes the general pair from
// the sos-convex one (which also truncates the square at floor(d_P / 2))
BuiltRelaxation build_primal(const SipProblem& prob, int r, int t, bool with_theta,
                             RelaxKind kind) {
  prob.validate();
  if (t < prob.d_K()) throw PreconditionError("t < d_K");
  if (with_theta && !prob.has_tau())
    throw PreconditionError("tau_K is required for the perturbation constraint");

  BuiltRelaxation built;
  built.kind = kind;
  built.r = r;
  built.t = t;
  const int m = prob.m();
  const int n = prob.n();

  built.functional = make_moment_layout(built.sdp, n, 2 * t, "H");
  built.localizing_blocks =
      add_localizing_blocks(built.sdp, built.functional, prob.generators, t, "loc");

  int q_half = with_theta ? r : prob.d_P() / 2;
  GramBasis qb = make_gram_basis(m, q_half);
  built.q_block = built.sdp.add_psd_block("Q", static_cast<int>(qb.basis.size()));
  built.rho_var = built.sdp.add_free_var("rho");
  if (with_theta) built.eta_var = built.sdp.add_nonneg_var("eta");

  int match_deg = with_theta ? 2 * r : std::max({prob.f.degree(), prob.d_x(), 2 * q_half});
  if (prob.f.degree() > match_deg || prob.d_x() > match_deg)
    throw PreconditionError("r < ceil(d_P / 2)");

  MonomialIndex rows(m, match_deg);
  auto split = split_bipoly(prob.p);
  Polynomial theta = with_theta ? perturbation_polynomial(prob.space(), r, prob.tau_K)
                                : Polynomial(prob.space());
  std::vector<int> eq(static_cast<size_t>(rows.size()));
  for (int i = 0; i < rows.size(); ++i) {
    const Monomial& beta = rows.at(i);
    std::vector<int> full(static_cast<size_t>(prob.space().size()), 0);
    for (int v = 0; v < m; ++v) full[static_cast<size_t>(v)] = beta[v];
    double frhs = prob.f.coeff(Monomial(full));
    eq[static_cast<size_t>(i)] = built.sdp.add_equality(frhs);
    if (beta.degree() == 0) {
      built.sdp.add_free_coeff(eq[static_cast<size_t>(i)], built.rho_var, 1.0);
      if (with_theta) built.sdp.add_nonneg_coeff(eq[static_cast<size_t>(i)], built.eta_var, -1.0);
    }
    if (with_theta) {
      double tc = theta.coeff(Monomial(full));
      if (tc != 0.0) built.sdp.add_nonneg_coeff(eq[static_cast<size_t>(i)], built.eta_var, -tc);
    }
  }
  for (const auto& [ymono, xterms] : split) {
    for (const auto& [xm, c] : xterms) {
      int rix = rows.index_of(xm);
      built.functional.add_term(built.sdp, eq[static_cast<size_t>(rix)], ymono, c);
    }
  }
  for (const auto& [prod, entries] : qb.products) {
    int rix = rows.index_of(prod);
    for (const auto& [a, b, w] : entries)
      built.sdp.add_entry_coeff(eq[static_cast<size_t>(rix)], built.q_block, a, b, w);
  }

  built.sdp.add_objective_free(built.rho_var, 1.0);
  if (with_theta) built.sdp.add_objective_nonneg(built.eta_var, -2.0);
  built.sdp.set_sense(SdpProblem::Sense::maximize);
  return built;
}

}  // namespace

BuiltRelaxation build_psdp(const SipProblem& prob, int r, int t, const RelaxOptions& opts) {
  (void)opts;
  if (2 * r < prob.d_P()) throw PreconditionError("r < ceil(d_P / 2)");
  return build_primal(prob, r, t, true, RelaxKind::psdp);
}

BuiltRelaxation build_sosconvex_psdp(const SipProblem& prob, int t,
                                     const RelaxOptions& opts) {
  (void)opts;
  return build_primal(prob, 0, t, false, RelaxKind::sosconvex_psdp);
}

namespace {

BuiltRelaxation build_membership_base(const SipProblem& prob, int r, int t,
                                      const RelaxOptions& opts, RelaxKind kind) {
  if (2 * r < prob.d_x()) throw PreconditionError("r < ceil(d_x / 2)");
  return build_lambda_constraints(prob, r, t, opts, kind);
}

}  // namespace

MembershipResult membership_sdp(const SipProblem& prob, const std::vector<double>& point,
                                int r, int t, const RelaxOptions& opts) {
  if (static_cast<int>(point.size()) != prob.m())
    throw DimensionError("membership point has wrong dimension");
  BuiltRelaxation built = build_membership_base(prob, r, t, opts, RelaxKind::membership);
  for (int i = 0; i < prob.m(); ++i) {
    int eq = built.sdp.add_equality(point[static_cast<size_t>(i)]);
    built.functional.add_term(built.sdp, eq, Monomial::unit(prob.m(), i), 1.0);
  }
  built.sdp.set_sense(SdpProblem::Sense::minimize);
  SolveReport rep = solve(built.sdp, opts.sdp);
  MembershipResult res;
  res.status = rep.status;
  if (rep.status == SolveStatus::optimal || rep.status == SolveStatus::inaccurate)
    res.feasible = true;
  else if (rep.status == SolveStatus::infeasible)
    res.feasible = false;
  else
    throw NumericalError("membership solve " + to_string(rep.status));
  return res;
}

SupportResult support_value(const SipProblem& prob, const std::vector<double>& direction,
                            int r, int t, const RelaxOptions& opts) {
  if (static_cast<int>(direction.size()) != prob.m())
    throw DimensionError("direction has wrong dimension");
  BuiltRelaxation built = build_membership_base(prob, r, t, opts, RelaxKind::support);
  for (int i = 0; i < prob.m(); ++i)
    if (direction[static_cast<size_t>(i)] != 0.0)
      built.functional.add_term(built.sdp, -1, Monomial::unit(prob.m(), i),
                                direction[static_cast<size_t>(i)]);
  built.sdp.set_sense(SdpProblem::Sense::maximize);
  SolveReport rep = solve(built.sdp, opts.sdp);
  SupportResult res;
  res.status = rep.status;
  if (rep.status == SolveStatus::unbounded)
    throw NumericalError("support function unbounded: check tau_K and the perturbation row");
  if (rep.status != SolveStatus::optimal && rep.status != SolveStatus::inaccurate)
    throw NumericalError("support solve " + to_string(rep.status));
  res.value = rep.primal_value;
  res.boundary_point = extract_minimizer(built, rep);
  return res;
}

std::vector<double> extract_minimizer(const BuiltRelaxation& built, const SolveReport& rep) {
  std::vector<double> x(static_cast<size_t>(built.functional.n));
  for (int i = 0; i < built.functional.n; ++i)
    x[static_cast<size_t>(i)] = built.functional.value(rep, Monomial::unit(built.functional.n, i));
  return x;
}

ActiveIndexResult extract_active_indices(const MomentVector& H, int t, int d_S,
                                         const std::vector<Polynomial>& generators,
                                         const RelaxOptions& opts) {
  ActiveIndexResult res;
  if (H.mass() <= 1e-7) {
    res.status = "none";
    return res;
  }
  res.flat = flat_extension_check(H, t, std::min(d_S, t), opts.rank_tol);
  if (!res.flat.flat) {
    res.status = "unverified";
    return res;
  }
  try {
    res.atoms = extract_atoms(H, t, opts.rank_tol, 1e-6);
  } catch (const NumericalError& e) {
    res.status = std::string("failed: ") + e.what();
    return res;
  }
  for (const auto& a : res.atoms) {
    std::vector<double> y(a.point.data(), a.point.data() + a.point.size());
    for (const auto& g : generators)
      if (g.evaluate(y) < -opts.atom_feas_tol) {
        res.status = "unverified";
        return res;
      }
  }
  res.status = "certified";
  return res;
}

std::pair<SipProblem, double> scale_to_unit_ball(const SipProblem& prob) {
  prob.validate();
  if (!prob.has_tau()) throw PreconditionError("tau_K must be set before scaling");
  double tau = prob.tau_K;
  SipProblem scaled = prob;
  for (int i = 0; i < prob.m(); ++i) {
    scaled.f = scaled.f.scale_variable(i, tau);
    scaled.p = scaled.p.scale_variable(i, tau);
  }
  scaled.tau_K = 1.0;
  return {scaled, tau};
}

ModeInfo detect_modes(const SipProblem& prob, const std::string& requested,
                      const RelaxOptions& opts) {
  prob.validate();
  ModeInfo info;
  info.requested = requested;

  if (prob.n() == 1 && prob.generators.size() == 1) {
    const Polynomial& g = prob.generators.front();
    Polynomial ref(g.space());
    ref.add_term(Monomial({0}), 1.0);
    ref.add_term(Monomial({2}), -1.0);
    info.univariate_interval = g.almost_equal(ref, 1e-12);
  }

  info.f_sos_convex = is_sos_convex(prob.f, opts.sdp);

  GridOptions battery_grid = opts.grid;
  battery_grid.density = std::min(battery_grid.density, 12);
  auto grid = index_grid(prob, battery_grid, opts.sdp);
  size_t stride = std::max<size_t>(1, grid.size() / 10);
  info.p_battery_sos_convex = true;
  for (size_t i = 0; i < grid.size() && info.battery_size < 10; i += stride) {
    const auto& y = grid[i];
    Polynomial neg_p(prob.space());
    const int m = prob.m();
    for (const auto& [mono, c] : prob.p.terms()) {
      double w = -c;
      for (int v = 0; v < prob.n(); ++v)
        for (int e = 0; e < mono[m + v]; ++e) w *= y[v];
      std::vector<int> full(static_cast<size_t>(prob.space().size()), 0);
      for (int v = 0; v < m; ++v) full[static_cast<size_t>(v)] = mono[v];
      neg_p.add_term(Monomial(std::move(full)), w);
    }
    ++info.battery_size;
    if (!is_sos_convex(neg_p, opts.sdp)) {
      info.p_battery_sos_convex = false;
      break;
    }
  }

  if (requested == "sosconvex") info.resolved = "sosconvex";
  else if (requested == "general") info.resolved = "general";
  else info.resolved = info.f_sos_convex && info.p_battery_sos_convex ? "sosconvex" : "general";
  return info;
}

HierarchyReport run_hierarchy(const SipProblem& prob,
                              const std::vector<std::pair<int, int>>& schedule,
                              const ModeInfo& mode, const RelaxOptions& opts) {
  prob.validate();
  HierarchyReport report;
  report.mode = mode;
  const bool sosconvex = mode.resolved == "sosconvex";
  const bool pin_t = !sosconvex && mode.univariate_interval;

  for (auto [r, t] : schedule) {
    HierarchyPoint pt;
    if (pin_t && t != prob.d_K()) {
      t = prob.d_K();
      report.notes.push_back("t pinned at d_K for the univariate interval case");
    }
    pt.r = sosconvex ? 0 : r;
    pt.t = t;

    auto t0 = Clock::now();
    BuiltRelaxation dual = sosconvex ? build_sosconvex_dsdp(prob, t, opts)
                                     : build_dsdp(prob, r, t, opts);
    pt.dsdp_report = solve(dual.sdp, opts.sdp);
    pt.dsdp_ms = ms_since(t0);
    pt.dsdp_value = pt.dsdp_report.primal_value;

    t0 = Clock::now();
    BuiltRelaxation primal = sosconvex ? build_sosconvex_psdp(prob, t, opts)
                                       : build_psdp(prob, r, t, opts);
    pt.psdp_report = solve(primal.sdp, opts.sdp);
    pt.psdp_ms = ms_since(t0);
    pt.psdp_value = pt.psdp_report.primal_value;

    bool dual_ok = pt.dsdp_report.status == SolveStatus::optimal ||
                   pt.dsdp_report.status == SolveStatus::inaccurate;
    bool primal_ok = pt.psdp_report.status == SolveStatus::optimal ||
                     pt.psdp_report.status == SolveStatus::inaccurate;
    if (pt.dsdp_report.status != SolveStatus::optimal ||
        pt.psdp_report.status != SolveStatus::optimal)
      report.all_optimal = false;

    if (dual_ok) {
      pt.minimizer = extract_minimizer(dual, pt.dsdp_report);
      pt.minimizer_margin = min_on_index_grid(prob, pt.minimizer, opts.grid, opts.sdp);
      std::vector<double> full(pt.minimizer);
      full.resize(static_cast<size_t>(prob.space().size()), 0.0);
      pt.jensen_gap = pt.dsdp_value - prob.f.evaluate(full);
    }
    if (primal_ok) {
      pt.index_functional = primal.functional.moments(pt.psdp_report);
      pt.active = extract_active_indices(pt.index_functional, t, prob.d_S(),
                                         prob.generators, opts);
    }
    if (dual_ok && primal_ok &&
        pt.psdp_value > pt.dsdp_value + 1e-6 * (1 + std::abs(pt.dsdp_value)))
      report.weak_duality_ok = false;

    report.points.push_back(std::move(pt));
  }

  // dual values nonincreasing in t at fixed r
  std::map<int, std::vector<std::pair<int, double>>> by_r;
  for (const auto& pt : report.points) by_r[pt.r].emplace_back(pt.t, pt.dsdp_value);
  for (auto& [r, vals] : by_r) {
    std::sort(vals.begin(), vals.end());
    for (size_t i = 1; i < vals.size(); ++i) {
      if (vals[i].second > vals[i - 1].second + 1e-6 * (1 + std::abs(vals[i - 1].second)))
        report.dual_monotone_in_t = false;
      if (!report.stagnation_t &&
          std::abs(vals[i].second - vals[i - 1].second) <= 1e-5)
        report.stagnation_t = vals[i - 1].first;
    }
  }
  return report;
}

}  // namespace sipsdp

#include "sipsdp/moments.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

namespace sipsdp {

MonomialIndex::MonomialIndex(int n, int max_degree)
    : n_(n), max_degree_(max_degree), basis_(monomial_basis(n, max_degree)) {
  for (int i = 0; i < size(); ++i) lookup_.emplace(basis_[static_cast<size_t>(i)], i);
}

int MonomialIndex::index_of(const Monomial& m) const {
  int i = find(m);
  if (i < 0) throw DimensionError("monomial outside the indexed range");
  return i;
}

int MonomialIndex::find(const Monomial& m) const {
  auto it = lookup_.find(m);
  return it == lookup_.end() ? -1 : it->second;
}

MomentVector::MomentVector(int n_, int order_) : n(n_), order(order_) {
  values = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(binomial(n + 2 * order, 2 * order)));
}

bool MomentVector::probability_normalized(double tol) const {
  return values.size() > 0 && std::abs(values[0] - 1.0) <= tol;
}

double MomentVector::at(const Monomial& m) const {
  MonomialIndex idx(n, 2 * order);
  return values[idx.index_of(m)];
}

MomentVector from_atoms(const std::vector<Atom>& atoms, int n, int k) {
  MomentVector mv(n, k);
  MonomialIndex idx(n, 2 * k);
  for (const auto& a : atoms) {
    if (a.point.size() != n) throw DimensionError("atom point has wrong dimension");
    for (int i = 0; i < idx.size(); ++i) {
      const Monomial& m = idx.at(i);
      double t = a.weight;
      for (int v = 0; v < n; ++v)
        for (int j = 0; j < m[v]; ++j) t *= a.point[v];
      mv.values[i] += t;
    }
  }
  return mv;
}

Eigen::MatrixXd moment_matrix(const MomentVector& mv, int k) {
  if (k > mv.order) throw PreconditionError("moment vector order too small for M_k");
  MonomialIndex full(mv.n, 2 * mv.order);
  std::vector<Monomial> rows = monomial_basis(mv.n, k);
  const int N = static_cast<int>(rows.size());
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      double v = mv.values[full.index_of(rows[static_cast<size_t>(i)] * rows[static_cast<size_t>(j)])];
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

Eigen::MatrixXd localizing_matrix(const MomentVector& mv, const Polynomial& g, int k) {
  if (g.space().size() != mv.n)
    throw DimensionError("localizing generator has wrong variable count");
  int dg = g.degree();
  int dj = (dg + 1) / 2;
  if (dg + 2 * (k - dj) > 2 * mv.order)
    throw PreconditionError("moment vector order too small for localizing matrix");
  MonomialIndex full(mv.n, 2 * mv.order);
  std::vector<Monomial> rows = monomial_basis(mv.n, k - dj);
  const int N = static_cast<int>(rows.size());
  Eigen::MatrixXd M(N, N);
  for (int i = 0; i < N; ++i) {
    for (int j = i; j < N; ++j) {
      Monomial ab = rows[static_cast<size_t>(i)] * rows[static_cast<size_t>(j)];
      double v = 0.0;
      for (const auto& [gm, gc] : g.terms()) v += gc * mv.values[full.index_of(ab * gm)];
      M(i, j) = v;
      M(j, i) = v;
    }
  }
  return M;
}

int numerical_rank(const Eigen::MatrixXd& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  double smax = s.size() ? s[0] : 0.0;
  if (smax <= 1e-12) return 0;  // numerically the zero matrix
  double thresh = rank_tol * smax * static_cast<double>(std::max(m.rows(), m.cols()));
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > thresh) ++r;
  return r;
}

FlatExtensionResult flat_extension_check(const MomentVector& mv, int k, int d_S,
                                         double rank_tol) {
  if (d_S < 1) throw PreconditionError("flat extension check requires d_S >= 1");
  if (k < d_S) throw PreconditionError("flat extension check requires k >= d_S");
  if (k > mv.order) throw PreconditionError("moment vector order too small");
  FlatExtensionResult res;
  Eigen::MatrixXd low = moment_matrix(mv, k - d_S);
  res.rank_low = numerical_rank(low, rank_tol);
  res.rank_high = numerical_rank(moment_matrix(mv, k), rank_tol);
  res.flat = res.rank_low == res.rank_high;
  return res;
}

namespace {

// one extraction attempt with a given random seed for the mixing weights
std::vector<Atom> extract_once(const MomentVector& mv, int k, int rank,
                               const Eigen::MatrixXd& M, unsigned seed) {
  const int n = mv.n;
  std::vector<Monomial> rows = monomial_basis(n, k);
  const int N = static_cast<int>(rows.size());

  // PSD square root restricted to the numerical rank: M ~ V V^T, V is N x r
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd ev = es.eigenvalues();
  Eigen::MatrixXd V(N, rank);
  for (int c = 0; c < rank; ++c) {
    int src = N - 1 - c;  // eigenvalues ascending
    double lam = std::max(ev[src], 0.0);
    V.col(c) = es.eigenvectors().col(src) * std::sqrt(lam);
  }

  // pick a well-conditioned row basis among monomials of degree <= k-1 so
  // every product x_i * basis monomial stays inside the index range
  std::vector<int> candidates;
  for (int i = 0; i < N; ++i)
    if (rows[static_cast<size_t>(i)].degree() <= k - 1) candidates.push_back(i);
  Eigen::MatrixXd Vt(rank, static_cast<int>(candidates.size()));
  for (size_t c = 0; c < candidates.size(); ++c)
    Vt.col(static_cast<Eigen::Index>(c)) = V.row(candidates[c]).transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Vt);
  if (qr.rank() < rank)
    throw NumericalError("atom extraction: no basis of low-degree monomials");
  std::vector<int> basis_rows(static_cast<size_t>(rank));
  for (int c = 0; c < rank; ++c)
    basis_rows[static_cast<size_t>(c)] =
        candidates[static_cast<size_t>(qr.colsPermutation().indices()[c])];

  Eigen::MatrixXd VB(rank, rank);
  for (int c = 0; c < rank; ++c) VB.row(c) = V.row(basis_rows[static_cast<size_t>(c)]);
  // rows satisfy V_{x_v B} = N_v V_B, i.e. N_v^T = V_B^{-T} V_{x_v B}^T
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(VB.transpose());

  MonomialIndex rowidx(n, k);
  std::vector<Eigen::MatrixXd> mult(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    Eigen::MatrixXd Vx(rank, rank);
    for (int c = 0; c < rank; ++c) {
      Monomial shifted = rowidx.at(basis_rows[static_cast<size_t>(c)]) * Monomial::unit(n, v);
      Vx.row(c) = V.row(rowidx.index_of(shifted));
    }
    mult[static_cast<size_t>(v)] = lu.solve(Vx.transpose()).transpose().eval();
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  Eigen::MatrixXd combo = Eigen::MatrixXd::Zero(rank, rank);
  double total = 0.0;
  std::vector<double> cw(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    cw[static_cast<size_t>(v)] = unif(rng);
    total += cw[static_cast<size_t>(v)];
  }
  for (int v = 0; v < n; ++v) combo += (cw[static_cast<size_t>(v)] / total) * mult[static_cast<size_t>(v)];

  Eigen::RealSchur<Eigen::MatrixXd> schur(combo);
  const Eigen::MatrixXd& Q = schur.matrixU();

  std::vector<Atom> atoms(static_cast<size_t>(rank));
  for (int l = 0; l < rank; ++l) {
    atoms[static_cast<size_t>(l)].point = Eigen::VectorXd(n);
    for (int v = 0; v < n; ++v)
      atoms[static_cast<size_t>(l)].point[v] = Q.col(l).dot(mult[static_cast<size_t>(v)] * Q.col(l));
  }

  // weights by least squares against all moments up to degree 2k
  MonomialIndex full(n, 2 * k);
  Eigen::MatrixXd A(full.size(), rank);
  for (int i = 0; i < full.size(); ++i) {
    const Monomial& m = full.at(i);
    for (int l = 0; l < rank; ++l) {
      double t = 1.0;
      for (int v = 0; v < n; ++v)
        for (int j = 0; j < m[v]; ++j) t *= atoms[static_cast<size_t>(l)].point[v];
      A(i, l) = t;
    }
  }
  Eigen::VectorXd target = mv.values.head(full.size());
  Eigen::VectorXd w = A.colPivHouseholderQr().solve(target);
  for (int l = 0; l < rank; ++l) atoms[static_cast<size_t>(l)].weight = w[l];
  return atoms;
}

}  // namespace

std::vector<Atom> extract_atoms(const MomentVector& mv, int k, double rank_tol,
                                double recon_tol) {
  if (k > mv.order) throw PreconditionError("moment vector order too small");
  if (k < 1) throw PreconditionError("extraction needs k >= 1");
  Eigen::MatrixXd M = moment_matrix(mv, k);
  int rank = numerical_rank(M, rank_tol);
  if (rank == 0) return {};

  double scale = std::max(1.0, mv.values.cwiseAbs().maxCoeff());
  std::string last_error = "no attempt";
  for (unsigned seed : {20240u, 50331u, 90210u}) {
    std::vector<Atom> atoms;
    try {
      atoms = extract_once(mv, k, rank, M, seed);
    } catch (const NumericalError& e) {
      last_error = e.what();
      continue;
    }
    bool weights_ok = true;
    for (auto& a : atoms) {
      if (a.weight < -recon_tol * scale) weights_ok = false;
      if (a.weight < 0) a.weight = 0.0;
    }
    if (!weights_ok) {
      last_error = "negative weight in reconstruction";
      continue;
    }
    MomentVector rec = from_atoms(atoms, mv.n, mv.order);
    double err = (rec.values - mv.values).cwiseAbs().maxCoeff();
    if (err <= recon_tol * scale) {
      atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                                 [&](const Atom& a) { return a.weight <= recon_tol * scale; }),
                  atoms.end());
      return atoms;
    }
    last_error = "reconstruction residual " + std::to_string(err);
  }
  throw NumericalError("atom extraction failed: " + last_error);
}

Polynomial apply_to_bipoly(const MomentVector& mv, const Polynomial& p,
                           VarBlock mv_block) {
  const VarSpace& sp = p.space();
  int bs = sp.block_size(mv_block);
  if (bs != mv.n) throw DimensionError("moment vector does not match block size");
  if (p.block_degree(mv_block) > 2 * mv.order)
    throw PreconditionError("moment vector order below block degree");

  VarBlock other = mv_block == VarBlock::X ? VarBlock::Y : VarBlock::X;
  VarSpace out_space = other == VarBlock::Y ? VarSpace({}, sp.y_names())
                                            : VarSpace(sp.x_names(), {});
  MonomialIndex full(mv.n, 2 * mv.order);
  int lo = mv_block == VarBlock::X ? 0 : sp.nx();
  int olo = other == VarBlock::X ? 0 : sp.nx();
  int osz = sp.block_size(other);

  Polynomial out(out_space);
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> in_part(static_cast<size_t>(bs));
    for (int i = 0; i < bs; ++i) in_part[static_cast<size_t>(i)] = m[lo + i];
    std::vector<int> out_part(static_cast<size_t>(osz));
    for (int i = 0; i < osz; ++i) out_part[static_cast<size_t>(i)] = m[olo + i];
    double v = c * mv.values[full.index_of(Monomial(std::move(in_part)))];
    out.add_term(Monomial(std::move(out_part)), v);
  }
  return out;
}

}  // namespace sipsdp

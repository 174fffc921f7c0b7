#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "sipsdp/sdp.hpp"

namespace sipsdp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MatCoef {
  int i, j;
  double c;  // coefficient per unordered pair, as stored in SdpProblem
};

struct RowData {
  std::vector<std::vector<MatCoef>> mat;     // per block
  std::vector<std::pair<int, double>> lp;    // nonneg entries
  std::vector<std::pair<int, double>> fr;    // free entries
  double b = 0.0;
};

// dense symmetric matrix from pair-counted coefficients
void add_full(Eigen::MatrixXd& A, const std::vector<MatCoef>& coefs) {
  for (const auto& e : coefs) {
    if (e.i == e.j) {
      A(e.i, e.i) += e.c;
    } else {
      A(e.i, e.j) += 0.5 * e.c;
      A(e.j, e.i) += 0.5 * e.c;
    }
  }
}

double dot_sym(const std::vector<MatCoef>& coefs, const Eigen::MatrixXd& S) {
  double v = 0.0;
  for (const auto& e : coefs) v += e.c * S(e.i, e.j);
  return v;
}

// T = A * W for symmetric sparse A given by pair-counted coefficients
void sparse_mul(const std::vector<MatCoef>& coefs, const Eigen::MatrixXd& W,
                Eigen::MatrixXd& T) {
  T.setZero(W.rows(), W.cols());
  for (const auto& e : coefs) {
    if (e.i == e.j) {
      T.row(e.i) += e.c * W.row(e.j);
    } else {
      T.row(e.i) += 0.5 * e.c * W.row(e.j);
      T.row(e.j) += 0.5 * e.c * W.row(e.i);
    }
  }
}

double max_step_psd(const Eigen::MatrixXd& X, const Eigen::MatrixXd& dX) {
  double lift = 1e-14 * std::max(1.0, X.trace());
  Eigen::LLT<Eigen::MatrixXd> llt(
      X + lift * Eigen::MatrixXd::Identity(X.rows(), X.cols()));
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd Y = L.triangularView<Eigen::Lower>().solve(dX);
  Y = L.triangularView<Eigen::Lower>().solve(Y.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Y + Y.transpose()),
                                                    Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return kInf;
  return -1.0 / lmin;
}

struct Scaling {
  // per psd block
  std::vector<Eigen::MatrixXd> R, Rinv, W;
  std::vector<Eigen::VectorXd> lambda;
  // lp cone
  Eigen::VectorXd d, lam_lp;
};

}  // namespace

SolveReport solve(const SdpProblem& prob, const SdpSettings& st) {
  prob.validate();
  const bool maximize = prob.sense() == SdpProblem::Sense::maximize;
  const int B = prob.num_blocks();
  const int p = prob.num_nonneg();
  const int q = prob.num_free();
  const int K = prob.num_equalities();

  std::vector<int> dims(static_cast<size_t>(B));
  int cone_dim = p;
  for (int b = 0; b < B; ++b) {
    dims[static_cast<size_t>(b)] = prob.block_dim(b);
    cone_dim += prob.block_dim(b);
  }

  SolveReport rep;
  if (cone_dim == 0 && q == 0) {
    rep.status = K == 0 ? SolveStatus::optimal : SolveStatus::infeasible;
    for (int k = 0; k < K; ++k)
      if (prob.row(k).rhs == 0.0) rep.status = SolveStatus::optimal;
    return rep;
  }

  // consolidate rows: accumulate duplicate coefficients, scale rows
  auto build_row = [&](const SdpProblem::Row& src, RowData& dst) {
    dst.mat.assign(static_cast<size_t>(B), {});
    std::vector<std::map<std::pair<int, int>, double>> acc(static_cast<size_t>(B));
    for (const auto& e : src.mat) acc[static_cast<size_t>(e.block)][{e.i, e.j}] += e.coeff;
    for (int b = 0; b < B; ++b)
      for (const auto& [ij, c] : acc[static_cast<size_t>(b)])
        if (c != 0.0) dst.mat[static_cast<size_t>(b)].push_back({ij.first, ij.second, c});
    std::map<int, double> lpacc, fracc;
    for (const auto& e : src.nonneg_terms) lpacc[e.index] += e.coeff;
    for (const auto& e : src.free_terms) fracc[e.index] += e.coeff;
    for (const auto& [i, c] : lpacc)
      if (c != 0.0) dst.lp.emplace_back(i, c);
    for (const auto& [i, c] : fracc)
      if (c != 0.0) dst.fr.emplace_back(i, c);
    dst.b = src.rhs;
  };

  std::vector<RowData> rows(static_cast<size_t>(K));
  std::vector<double> row_scale(static_cast<size_t>(K), 1.0);
  for (int k = 0; k < K; ++k) {
    build_row(prob.row(k), rows[static_cast<size_t>(k)]);
    double mx = std::abs(rows[static_cast<size_t>(k)].b);
    for (int b = 0; b < B; ++b)
      for (const auto& e : rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)])
        mx = std::max(mx, std::abs(e.c));
    for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp) mx = std::max(mx, std::abs(c));
    for (const auto& [i, c] : rows[static_cast<size_t>(k)].fr) mx = std::max(mx, std::abs(c));
    if (mx > 0) {
      double sc = 1.0 / mx;
      row_scale[static_cast<size_t>(k)] = sc;
      for (int b = 0; b < B; ++b)
        for (auto& e : rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)]) e.c *= sc;
      for (auto& [i, c] : rows[static_cast<size_t>(k)].lp) c *= sc;
      for (auto& [i, c] : rows[static_cast<size_t>(k)].fr) c *= sc;
      rows[static_cast<size_t>(k)].b *= sc;
    }
  }

  RowData obj;
  build_row(prob.objective(), obj);
  double obj_scale = 0.0;
  for (int b = 0; b < B; ++b)
    for (const auto& e : obj.mat[static_cast<size_t>(b)]) obj_scale = std::max(obj_scale, std::abs(e.c));
  for (const auto& [i, c] : obj.lp) obj_scale = std::max(obj_scale, std::abs(c));
  for (const auto& [i, c] : obj.fr) obj_scale = std::max(obj_scale, std::abs(c));
  if (obj_scale == 0.0) obj_scale = 1.0;
  double osign = maximize ? -1.0 : 1.0;
  for (int b = 0; b < B; ++b)
    for (auto& e : obj.mat[static_cast<size_t>(b)]) e.c *= osign / obj_scale;
  for (auto& [i, c] : obj.lp) c *= osign / obj_scale;
  for (auto& [i, c] : obj.fr) c *= osign / obj_scale;

  // dense objective data
  std::vector<Eigen::MatrixXd> C(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) {
    C[static_cast<size_t>(b)].setZero(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(b)]);
    add_full(C[static_cast<size_t>(b)], obj.mat[static_cast<size_t>(b)]);
  }
  Eigen::VectorXd c_lp = Eigen::VectorXd::Zero(p), c_fr = Eigen::VectorXd::Zero(q);
  for (const auto& [i, c] : obj.lp) c_lp[i] = c;
  for (const auto& [i, c] : obj.fr) c_fr[i] = c;
  Eigen::VectorXd bvec(K);
  for (int k = 0; k < K; ++k) bvec[k] = rows[static_cast<size_t>(k)].b;
  Eigen::MatrixXd Fmat = Eigen::MatrixXd::Zero(K, q);
  for (int k = 0; k < K; ++k)
    for (const auto& [i, c] : rows[static_cast<size_t>(k)].fr) Fmat(k, i) = c;

  double normb = K ? bvec.cwiseAbs().maxCoeff() : 0.0;
  double normC = 0.0;
  for (int b = 0; b < B; ++b)
    if (dims[static_cast<size_t>(b)]) normC = std::max(normC, C[static_cast<size_t>(b)].cwiseAbs().maxCoeff());
  if (p) normC = std::max(normC, c_lp.cwiseAbs().maxCoeff());
  if (q) normC = std::max(normC, c_fr.cwiseAbs().maxCoeff());

  // iterates
  double s0 = std::max({st.init_scale, 1.0, 10.0 * normb, 10.0 * normC});
  std::vector<Eigen::MatrixXd> X(static_cast<size_t>(B)), Z(static_cast<size_t>(B));
  for (int b = 0; b < B; ++b) {
    X[static_cast<size_t>(b)] = s0 * Eigen::MatrixXd::Identity(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(b)]);
    Z[static_cast<size_t>(b)] = s0 * Eigen::MatrixXd::Identity(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(b)]);
  }
  Eigen::VectorXd v = Eigen::VectorXd::Constant(p, s0), s = Eigen::VectorXd::Constant(p, s0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(q);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(K);

  auto primal_obj = [&]() {
    double t = c_lp.dot(v) + c_fr.dot(u);
    for (int b = 0; b < B; ++b) t += (C[static_cast<size_t>(b)].cwiseProduct(X[static_cast<size_t>(b)])).sum();
    return t;
  };

  std::vector<Eigen::MatrixXd> Rd(static_cast<size_t>(B)), Py(static_cast<size_t>(B));
  Eigen::VectorXd rd_lp(p), rd_fr(q), rp(K), axk(K);

  SolveStatus final_status = SolveStatus::failed;
  double relp = kInf, reld = kInf, relgap = kInf;
  double pobj = 0.0, dobj = 0.0;
  int iter = 0;
  std::string message;

  // iterates degrade once the barrier parameter bottoms out on degenerate
  // problems; classification and the report use the best iterate seen
  struct Snapshot {
    double merit = kInf;
    double pobj = 0, dobj = 0, relp = kInf, reld = kInf, relgap = kInf;
    std::vector<Eigen::MatrixXd> X;
    Eigen::VectorXd v, u, y;
  } best;
  int since_best = 0;

  std::vector<Eigen::MatrixXd> dXa(static_cast<size_t>(B)), dZa(static_cast<size_t>(B));
  std::vector<Eigen::MatrixXd> dX(static_cast<size_t>(B)), dZ(static_cast<size_t>(B));

  for (iter = 0; iter < st.max_iter; ++iter) {
    // residuals
    for (int b = 0; b < B; ++b) {
      Py[static_cast<size_t>(b)].setZero(dims[static_cast<size_t>(b)], dims[static_cast<size_t>(b)]);
    }
    Eigen::VectorXd ey = Eigen::VectorXd::Zero(p);
    for (int k = 0; k < K; ++k) {
      for (int b = 0; b < B; ++b)
        for (const auto& e : rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)]) {
          double half = e.i == e.j ? e.c : 0.5 * e.c;
          Py[static_cast<size_t>(b)](e.i, e.j) += y[k] * half;
          if (e.i != e.j) Py[static_cast<size_t>(b)](e.j, e.i) += y[k] * half;
        }
      for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp) ey[i] += y[k] * c;
    }
    for (int b = 0; b < B; ++b) Rd[static_cast<size_t>(b)] = C[static_cast<size_t>(b)] - Z[static_cast<size_t>(b)] - Py[static_cast<size_t>(b)];
    rd_lp = c_lp - s - ey;
    rd_fr = c_fr - Fmat.transpose() * y;
    double mu = 0.0;
    for (int b = 0; b < B; ++b) mu += (X[static_cast<size_t>(b)].cwiseProduct(Z[static_cast<size_t>(b)])).sum();
    mu += v.dot(s);
    mu /= std::max(1, cone_dim);

    for (int k = 0; k < K; ++k) {
      double t = 0.0;
      for (int b = 0; b < B; ++b) t += dot_sym(rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)], X[static_cast<size_t>(b)]);
      for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp) t += c * v[i];
      axk[k] = t;
      double fu = 0.0;
      for (const auto& [i, c] : rows[static_cast<size_t>(k)].fr) fu += c * u[i];
      rp[k] = bvec[k] - t - fu;
    }

    pobj = primal_obj();
    dobj = bvec.dot(y);
    relp = K ? rp.cwiseAbs().maxCoeff() / (1.0 + normb) : 0.0;
    reld = 0.0;
    for (int b = 0; b < B; ++b)
      if (dims[static_cast<size_t>(b)]) reld = std::max(reld, Rd[static_cast<size_t>(b)].cwiseAbs().maxCoeff());
    if (p) reld = std::max(reld, rd_lp.cwiseAbs().maxCoeff());
    if (q) reld = std::max(reld, rd_fr.cwiseAbs().maxCoeff());
    reld /= (1.0 + normC);
    relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    double relmu = mu / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (st.verbose) {
      std::printf("it %3d  pobj % .8e  dobj % .8e  relp %.2e  reld %.2e  gap %.2e  mu %.2e\n",
                  iter, pobj, dobj, relp, reld, relgap, mu);
    }

    if (relp <= st.feas_tol && reld <= st.feas_tol &&
        (relgap <= st.gap_tol || relmu <= st.gap_tol)) {
      final_status = SolveStatus::optimal;
      break;
    }

    // dual improving ray: primal infeasibility certificate
    if (iter >= 3) {
      double ynorm = K ? y.cwiseAbs().maxCoeff() : 0.0;
      if (ynorm > 0) {
        double t = dobj / ynorm;
        if (t > st.ray_tol) {
          double vio = 0.0;
          for (int b = 0; b < B; ++b)
            if (dims[static_cast<size_t>(b)]) {
              Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Py[static_cast<size_t>(b)], Eigen::EigenvaluesOnly);
              vio = std::max(vio, es.eigenvalues().maxCoeff() / ynorm);
            }
          for (int i = 0; i < p; ++i) vio = std::max(vio, ey[i] / ynorm);
          for (int i = 0; i < q; ++i) vio = std::max(vio, std::abs((Fmat.transpose() * y)[i]) / ynorm);
          if (vio <= st.ray_tol * std::max(1.0, t)) {
            final_status = SolveStatus::infeasible;
            message = "dual improving ray found";
            break;
          }
        }
      }
      // primal ray: dual infeasibility / unbounded objective
      double T = v.sum() + u.cwiseAbs().sum();
      for (int b = 0; b < B; ++b) T += X[static_cast<size_t>(b)].trace();
      if (T > 1e6 && pobj < 0) {
        double pvio = (bvec - rp).cwiseAbs().maxCoeff() / T;
        if (pvio <= st.ray_tol && pobj / T < -st.ray_tol) {
          final_status = SolveStatus::unbounded;
          message = "primal improving ray found";
          break;
        }
      }
    }

    // Nesterov-Todd scaling
    Scaling sc;
    sc.R.resize(static_cast<size_t>(B));
    sc.Rinv.resize(static_cast<size_t>(B));
    sc.W.resize(static_cast<size_t>(B));
    sc.lambda.resize(static_cast<size_t>(B));
    bool scale_ok = true;
    for (int b = 0; b < B; ++b) {
      int n = dims[static_cast<size_t>(b)];
      if (n == 0) continue;
      Eigen::LLT<Eigen::MatrixXd> lx(X[static_cast<size_t>(b)]), lz(Z[static_cast<size_t>(b)]);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        scale_ok = false;
        break;
      }
      Eigen::MatrixXd Lx = lx.matrixL(), Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Lx,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd sig = svd.singularValues();
      Eigen::VectorXd isqrt = sig.cwiseSqrt().cwiseInverse();
      sc.R[static_cast<size_t>(b)] = Lx * svd.matrixV() * isqrt.asDiagonal();
      sc.Rinv[static_cast<size_t>(b)] = isqrt.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
      sc.W[static_cast<size_t>(b)] = sc.R[static_cast<size_t>(b)] * sc.R[static_cast<size_t>(b)].transpose();
      sc.lambda[static_cast<size_t>(b)] = sig;
    }
    if (!scale_ok) {
      message = "cone iterate lost positive definiteness";
      break;
    }
    sc.d = (v.array() / s.array()).sqrt().matrix();
    sc.lam_lp = (v.array() * s.array()).sqrt().matrix();

    // Schur complement and augmented KKT factorization
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(K, K);
    std::vector<std::vector<int>> block_rows(static_cast<size_t>(B));
    for (int k = 0; k < K; ++k)
      for (int b = 0; b < B; ++b)
        if (!rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)].empty()) block_rows[static_cast<size_t>(b)].push_back(k);
    Eigen::MatrixXd T1, T2;
    for (int b = 0; b < B; ++b) {
      const auto& W = sc.W[static_cast<size_t>(b)];
      for (size_t ki = 0; ki < block_rows[static_cast<size_t>(b)].size(); ++ki) {
        int k = block_rows[static_cast<size_t>(b)][ki];
        sparse_mul(rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)], W, T1);
        T2.noalias() = W * T1;
        for (size_t li = 0; li <= ki; ++li) {
          int l = block_rows[static_cast<size_t>(b)][li];
          double val = dot_sym(rows[static_cast<size_t>(l)].mat[static_cast<size_t>(b)], T2);
          M(k, l) += val;
          if (l != k) M(l, k) += val;
        }
      }
    }
    if (p) {
      for (int k = 0; k < K; ++k)
        for (const auto& [i, ck] : rows[static_cast<size_t>(k)].lp)
          for (int l = 0; l <= k; ++l)
            for (const auto& [i2, cl] : rows[static_cast<size_t>(l)].lp)
              if (i == i2) {
                double val = ck * cl * sc.d[i] * sc.d[i];
                M(k, l) += val;
                if (l != k) M(l, k) += val;
              }
    }
    double regv = 1e-12 * (1.0 + M.diagonal().cwiseAbs().maxCoeff());
    Eigen::MatrixXd KKT = Eigen::MatrixXd::Zero(K + q, K + q);
    KKT.topLeftCorner(K, K) = M + regv * Eigen::MatrixXd::Identity(K, K);
    if (q) {
      KKT.topRightCorner(K, q) = Fmat;
      KKT.bottomLeftCorner(q, K) = Fmat.transpose();
      KKT.bottomRightCorner(q, q) = -regv * Eigen::MatrixXd::Identity(q, q);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> kkt_lu(KKT);

    // shared piece of the Schur rhs: A(W Rd W) per constraint
    Eigen::VectorXd awrw = Eigen::VectorXd::Zero(K);
    for (int b = 0; b < B; ++b) {
      if (dims[static_cast<size_t>(b)] == 0 || block_rows[static_cast<size_t>(b)].empty()) continue;
      Eigen::MatrixXd WRW = sc.W[static_cast<size_t>(b)] * Rd[static_cast<size_t>(b)] * sc.W[static_cast<size_t>(b)];
      for (int k : block_rows[static_cast<size_t>(b)])
        awrw[k] += dot_sym(rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)], WRW);
    }
    for (int k = 0; k < K; ++k)
      for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp)
        awrw[k] += c * sc.d[i] * sc.d[i] * rd_lp[i];

    auto solve_direction = [&](const std::vector<Eigen::MatrixXd>& Vb,
                               const Eigen::VectorXd& Vlp,
                               std::vector<Eigen::MatrixXd>& dX_out,
                               std::vector<Eigen::MatrixXd>& dZ_out,
                               Eigen::VectorXd& dv, Eigen::VectorXd& ds,
                               Eigen::VectorXd& dy, Eigen::VectorXd& du) {
      Eigen::VectorXd rhs(K + q);
      for (int k = 0; k < K; ++k) {
        double av = 0.0;
        for (int b = 0; b < B; ++b)
          if (dims[static_cast<size_t>(b)]) av += dot_sym(rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)], Vb[static_cast<size_t>(b)]);
        for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp) av += c * Vlp[i];
        rhs[k] = rp[k] + awrw[k] - av;
      }
      for (int i = 0; i < q; ++i) rhs[K + i] = rd_fr[i];
      Eigen::VectorXd sol = kkt_lu.solve(rhs);
      sol += kkt_lu.solve(rhs - KKT * sol);  // one refinement pass
      dy = sol.head(K);
      du = sol.tail(q);
      dZ_out.resize(static_cast<size_t>(B));
      dX_out.resize(static_cast<size_t>(B));
      for (int b = 0; b < B; ++b) {
        int n = dims[static_cast<size_t>(b)];
        dZ_out[static_cast<size_t>(b)] = Rd[static_cast<size_t>(b)];
        for (int k : block_rows[static_cast<size_t>(b)])
          for (const auto& e : rows[static_cast<size_t>(k)].mat[static_cast<size_t>(b)]) {
            double half = e.i == e.j ? e.c : 0.5 * e.c;
            dZ_out[static_cast<size_t>(b)](e.i, e.j) -= dy[k] * half;
            if (e.i != e.j) dZ_out[static_cast<size_t>(b)](e.j, e.i) -= dy[k] * half;
          }
        if (n)
          dX_out[static_cast<size_t>(b)] = Vb[static_cast<size_t>(b)] -
                                           sc.W[static_cast<size_t>(b)] * dZ_out[static_cast<size_t>(b)] * sc.W[static_cast<size_t>(b)];
        else
          dX_out[static_cast<size_t>(b)].resize(0, 0);
      }
      ds = rd_lp;
      for (int k = 0; k < K; ++k)
        for (const auto& [i, c] : rows[static_cast<size_t>(k)].lp) ds[i] -= dy[k] * c;
      dv = Vlp - (sc.d.array().square() * ds.array()).matrix();
    };

    auto step_lengths = [&](const std::vector<Eigen::MatrixXd>& dX_in,
                            const Eigen::VectorXd& dv,
                            const std::vector<Eigen::MatrixXd>& dZ_in,
                            const Eigen::VectorXd& ds) {
      double ap = kInf, ad = kInf;
      for (int b = 0; b < B; ++b)
        if (dims[static_cast<size_t>(b)]) {
          ap = std::min(ap, max_step_psd(X[static_cast<size_t>(b)], dX_in[static_cast<size_t>(b)]));
          ad = std::min(ad, max_step_psd(Z[static_cast<size_t>(b)], dZ_in[static_cast<size_t>(b)]));
        }
      for (int i = 0; i < p; ++i) {
        if (dv[i] < 0) ap = std::min(ap, -v[i] / dv[i]);
        if (ds[i] < 0) ad = std::min(ad, -s[i] / ds[i]);
      }
      return std::make_pair(ap, ad);
    };

    // predictor
    std::vector<Eigen::MatrixXd> Vaff(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) Vaff[static_cast<size_t>(b)] = -X[static_cast<size_t>(b)];
    Eigen::VectorXd Vlp_aff = -v;
    Eigen::VectorXd dva(p), dsa(p), dya(K), dua(q);
    solve_direction(Vaff, Vlp_aff, dXa, dZa, dva, dsa, dya, dua);
    auto [apa, ada] = step_lengths(dXa, dva, dZa, dsa);
    apa = std::min(apa, 1.0);
    ada = std::min(ada, 1.0);
    double mu_aff = 0.0;
    for (int b = 0; b < B; ++b)
      mu_aff += ((X[static_cast<size_t>(b)] + apa * dXa[static_cast<size_t>(b)])
                     .cwiseProduct(Z[static_cast<size_t>(b)] + ada * dZa[static_cast<size_t>(b)]))
                    .sum();
    mu_aff += (v + apa * dva).dot(s + ada * dsa);
    mu_aff = std::max(mu_aff / std::max(1, cone_dim), 0.0);
    double sigma = std::clamp(std::pow(mu_aff / std::max(mu, 1e-300), 3.0), 1e-8, 1.0);

    // corrector
    std::vector<Eigen::MatrixXd> Vcor(static_cast<size_t>(B));
    for (int b = 0; b < B; ++b) {
      int n = dims[static_cast<size_t>(b)];
      if (!n) continue;
      const auto& R = sc.R[static_cast<size_t>(b)];
      const auto& Rinv = sc.Rinv[static_cast<size_t>(b)];
      const auto& lam = sc.lambda[static_cast<size_t>(b)];
      Eigen::MatrixXd Dxa = Rinv * dXa[static_cast<size_t>(b)] * Rinv.transpose();
      Eigen::MatrixXd Dza = R.transpose() * dZa[static_cast<size_t>(b)] * R;
      Eigen::MatrixXd G = -0.5 * (Dxa * Dza + Dza * Dxa);
      for (int i = 0; i < n; ++i) G(i, i) += sigma * mu - lam[i] * lam[i];
      Eigen::MatrixXd Vh(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) Vh(i, j) = 2.0 * G(i, j) / (lam[i] + lam[j]);
      Vcor[static_cast<size_t>(b)] = R * Vh * R.transpose();
    }
    Eigen::VectorXd Vlp_cor(p);
    for (int i = 0; i < p; ++i) {
      double g = sigma * mu - sc.lam_lp[i] * sc.lam_lp[i] -
                 (dva[i] / sc.d[i]) * (dsa[i] * sc.d[i]);
      Vlp_cor[i] = sc.d[i] * g / sc.lam_lp[i];
    }
    Eigen::VectorXd dv(p), ds(p), dy(K), du(q);
    solve_direction(Vcor, Vlp_cor, dX, dZ, dv, ds, dy, du);
    auto [ap, ad] = step_lengths(dX, dv, dZ, ds);
    ap = std::min(st.step_scale * ap, 1.0);
    ad = std::min(st.step_scale * ad, 1.0);

    if (ap < 1e-8 && ad < 1e-8) {
      message = "step sizes collapsed";
      break;
    }

    for (int b = 0; b < B; ++b) {
      X[static_cast<size_t>(b)] += ap * dX[static_cast<size_t>(b)];
      Z[static_cast<size_t>(b)] += ad * dZ[static_cast<size_t>(b)];
      X[static_cast<size_t>(b)] = 0.5 * (X[static_cast<size_t>(b)] + X[static_cast<size_t>(b)].transpose()).eval();
      Z[static_cast<size_t>(b)] = 0.5 * (Z[static_cast<size_t>(b)] + Z[static_cast<size_t>(b)].transpose()).eval();
    }
    v += ap * dv;
    s += ad * ds;
    u += ap * du;
    y += ad * dy;
  }

  if (final_status == SolveStatus::failed) {
    double loose = 1e2;
    if (relp <= loose * st.feas_tol && reld <= loose * st.feas_tol &&
        relgap <= std::max(loose * st.gap_tol, 1e-6))
      final_status = SolveStatus::inaccurate;
  }

  rep.status = final_status;
  rep.iterations = iter;
  rep.primal_residual = relp;
  rep.dual_residual = reld;
  rep.gap = relgap;
  rep.message = message;
  double sgn = maximize ? -1.0 : 1.0;
  rep.primal_value = sgn * pobj * obj_scale;
  rep.dual_value = sgn * dobj * obj_scale;
  rep.block_values = X;
  rep.free_values.assign(u.data(), u.data() + q);
  rep.nonneg_values.assign(v.data(), v.data() + p);
  rep.dual_multipliers.resize(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k)
    rep.dual_multipliers[static_cast<size_t>(k)] =
        sgn * y[k] * row_scale[static_cast<size_t>(k)] * obj_scale;
  return rep;
}

}  // namespace sipsdp

#include "platelab/eigensolve.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <string>

#include "platelab/numerics.hpp"

namespace platelab {

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix sparse_times(const SparseSymMatrix& A, const Matrix& X) {
  Matrix Y(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) A.matvec(X.col(j).data(), Y.col(j).data());
  return Y;
}

// u'Au / u'u accumulated in double-double. The plain quotient carries an
// eps*||A|| absolute error, which at ||A|| ~ 1e10 is already comparable to
// the 1e-8 cross-solver agreement contract; the compensated form removes it.
double rayleigh_compensated(const SparseSymMatrix& A, const double* u) {
  dd num{0.0, 0.0}, den{0.0, 0.0};
  for (std::int64_t i = 0; i < A.order; ++i) {
    dd row{0.0, 0.0};
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      row = dd_add(row, two_prod(A.values[p], u[A.col_indices[p]]));
    num = dd_add(num, dd_mul(row, u[i]));
    den = dd_add(den, two_prod(u[i], u[i]));
  }
  return dd_div(num, den);
}

// Reproducible orientation: first component above the noise floor is positive.
void fix_sign(std::vector<double>& u) {
  double mx = 0.0;
  for (double v : u) mx = std::max(mx, std::abs(v));
  if (mx == 0.0) return;
  for (double v : u) {
    if (std::abs(v) > 1e-12 * mx) {
      if (v < 0.0)
        for (double& e : u) e = -e;
      return;
    }
  }
}

void cg_jacobi(const SparseSymMatrix& K, const std::vector<double>& dinv, const double* b,
               double* x, int cap, double rtol) {
  std::int64_t n = K.order;
  std::vector<double> r(b, b + n), z(n), p(n), Kp(n);
  std::fill(x, x + n, 0.0);
  double nb = 0.0;
  for (std::int64_t i = 0; i < n; ++i) nb += b[i] * b[i];
  nb = std::sqrt(nb);
  if (nb == 0.0) return;
  for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] * dinv[i];
  p = z;
  double rz = dot(r, z);
  for (int it = 0; it < cap; ++it) {
    K.matvec(p.data(), Kp.data());
    double alpha = rz / dot(p, Kp);
    for (std::int64_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Kp[i];
    }
    if (norm2(r) <= rtol * nb) break;
    for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] * dinv[i];
    double rz2 = dot(r, z);
    double beta = rz2 / rz;
    for (std::int64_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    rz = rz2;
  }
}

struct RitzBasis {
  Matrix X, AX;
  Vector theta;
};

// Rayleigh-Ritz on the columns of S (assumed near-orthonormal); rotates the
// basis into Ritz vectors.
RitzBasis rayleigh_ritz(const Matrix& S, const Matrix& AS, int want) {
  Matrix G = S.transpose() * AS;
  G = (0.5 * (G + G.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  if (es.info() != Eigen::Success) throw SolverError("rayleigh-ritz eigensolve failed");
  Matrix C = es.eigenvectors().leftCols(want);
  RitzBasis out;
  out.X = S * C;
  out.AX = AS * C;
  out.theta = es.eigenvalues().head(want);
  return out;
}

}  // namespace

Preconditioner jacobi_preconditioner(const SparseSymMatrix& A) {
  auto dinv = std::make_shared<std::vector<double>>(A.diagonal());
  for (double& v : *dinv) v = v > 0.0 ? 1.0 / v : 1.0;
  return [dinv](const double* r, double* z, std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) z[i] = r[i] * (*dinv)[i];
  };
}

Preconditioner second_order_preconditioner(const SparseSymMatrix& K, int axis_extent) {
  auto Kp = std::make_shared<SparseSymMatrix>(K);
  auto dinv = std::make_shared<std::vector<double>>(K.diagonal());
  for (double& v : *dinv) v = v > 0.0 ? 1.0 / v : 1.0;
  int cap = std::max(8, 2 * axis_extent);
  return [Kp, dinv, cap](const double* r, double* z, std::int64_t n) {
    std::vector<double> mid(n);
    cg_jacobi(*Kp, *dinv, r, mid.data(), cap, 0.1);
    cg_jacobi(*Kp, *dinv, mid.data(), z, cap, 0.1);
  };
}

EigenSystem lobpcg(const SparseSymMatrix& A, int k, double tol, int max_iter,
                   std::uint64_t seed, double weight, const LobpcgOptions& options) {
  const std::int64_t n = A.order;
  if (k < 1) throw Error("lobpcg: k must be positive");
  if (std::int64_t(k) > n / 4) throw Error("lobpcg: k too large, need k <= order/4");
  if (!(tol > 0.0 && tol <= 1e-2)) throw Error("lobpcg: tol must lie in (0, 1e-2]");
  if (max_iter < 1) throw Error("lobpcg: max_iter must be positive");

  Preconditioner prec =
      options.preconditioner ? options.preconditioner : jacobi_preconditioner(A);
  int extra = options.block_extra >= 0 ? options.block_extra : std::min(k, 5);
  int m = int(std::min<std::int64_t>(k + extra, n));

  Lcg rng(seed);
  Matrix X(n, m);
  for (int j = 0; j < m; ++j)
    for (std::int64_t i = 0; i < n; ++i) X(i, j) = rng.uniform();
  {
    Eigen::HouseholderQR<Matrix> qr(X);
    X = qr.householderQ() * Matrix::Identity(n, m);
  }
  Matrix AX = sparse_times(A, X);
  Vector theta;
  {
    RitzBasis rb = rayleigh_ritz(X, AX, m);
    X = std::move(rb.X);
    AX = std::move(rb.AX);
    theta = rb.theta;
  }

  Matrix P(n, 0), AP(n, 0);
  std::vector<double> best_res(k, std::numeric_limits<double>::infinity());
  bool converged = false;

  // SVQB whitening: drop directions whose Gram eigenvalue falls below
  // 1e-10 of the largest; an empty result signals basis degeneracy.
  auto whiten = [&](Matrix& T, Matrix& AT) {
    if (T.cols() == 0) return;
    Matrix G = T.transpose() * T;
    G = (0.5 * (G + G.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    double dmax = es.eigenvalues().maxCoeff();
    std::vector<int> keep;
    for (int j = 0; j < G.cols(); ++j)
      if (es.eigenvalues()[j] > 1e-10 * dmax && es.eigenvalues()[j] > 0.0) keep.push_back(j);
    Matrix V(G.rows(), Eigen::Index(keep.size()));
    for (std::size_t j = 0; j < keep.size(); ++j)
      V.col(Eigen::Index(j)) =
          es.eigenvectors().col(keep[j]) / std::sqrt(es.eigenvalues()[keep[j]]);
    T = (T * V).eval();
    AT = (AT * V).eval();
  };

  for (int it = 0; it < max_iter; ++it) {
    Matrix R = AX - X * theta.asDiagonal();
    bool ok = true;
    for (int j = 0; j < k; ++j) {
      double res = R.col(j).norm() / X.col(j).norm();
      best_res[j] = res;
      if (res > tol * std::max(theta[j], 1.0)) ok = false;
    }
    if (ok) {
      converged = true;
      break;
    }

    Matrix W(n, m);
    for (int j = 0; j < m; ++j) prec(R.col(j).data(), W.col(j).data(), n);
    if (!W.allFinite()) {
      for (int j = 0; j < m; ++j)
        for (std::int64_t i = 0; i < n; ++i) W(i, j) = rng.uniform();
    }
    Matrix AW = sparse_times(A, W);
    {
      Matrix C = X.transpose() * W;
      W.noalias() -= X * C;
      AW.noalias() -= AX * C;
    }
    if (P.cols() > 0) {
      Matrix C = X.transpose() * P;
      P.noalias() -= X * C;
      AP.noalias() -= AX * C;
    }

    Matrix tail(n, W.cols() + P.cols()), atail(n, W.cols() + P.cols());
    tail << W, P;
    atail << AW, AP;
    whiten(tail, atail);
    if (tail.cols() == 0) {
      // degeneracy restart: the search directions collapsed into span(X)
      Matrix F(n, m), AF(n, m);
      for (int j = 0; j < m; ++j)
        for (std::int64_t i = 0; i < n; ++i) F(i, j) = rng.uniform();
      Matrix C = X.transpose() * F;
      F.noalias() -= X * C;
      AF = sparse_times(A, F);
      tail = std::move(F);
      atail = std::move(AF);
      whiten(tail, atail);
      if (tail.cols() == 0) break;
    }

    Matrix S(n, m + tail.cols()), AS(n, m + tail.cols());
    S << X, tail;
    AS << AX, atail;
    Matrix G = S.transpose() * AS;
    G = (0.5 * (G + G.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(G);
    if (es.info() != Eigen::Success) throw SolverError("lobpcg: subspace eigensolve failed");
    Matrix C = es.eigenvectors().leftCols(m);
    theta = es.eigenvalues().head(m);
    Matrix Ct = C;
    Ct.topRows(m).setZero();  // the X-block rows: P tracks only the new directions
    X = (S * C).eval();
    AX = (AS * C).eval();
    P = (S * Ct).eval();
    AP = (AS * Ct).eval();

    if ((it + 1) % 40 == 0) {
      // periodic drift control: re-orthonormalize and refresh AX
      Eigen::HouseholderQR<Matrix> qr(X);
      X = qr.householderQ() * Matrix::Identity(n, m);
      AX = sparse_times(A, X);
      RitzBasis rb = rayleigh_ritz(X, AX, m);
      X = std::move(rb.X);
      AX = std::move(rb.AX);
      theta = rb.theta;
      P.resize(n, 0);
      AP.resize(n, 0);
    }
  }

  if (!converged) {
    // final check against freshly computed residuals before giving up
    Matrix R = AX - X * theta.asDiagonal();
    converged = true;
    for (int j = 0; j < k; ++j) {
      double res = R.col(j).norm() / X.col(j).norm();
      best_res[j] = res;
      if (res > tol * std::max(theta[j], 1.0)) converged = false;
    }
    if (!converged)
      throw SolverError("lobpcg: no convergence within max_iter", best_res);
  }

  EigenSystem sys;
  sys.weight = weight;
  double scale = 1.0 / std::sqrt(weight);
  std::vector<std::pair<double, int>> order(k);
  std::vector<std::vector<double>> vecs(k);
  for (int j = 0; j < k; ++j) {
    Vector col = X.col(j) / X.col(j).norm();
    vecs[j].assign(col.data(), col.data() + n);
    double lam = options.polish ? rayleigh_compensated(A, vecs[j].data()) : theta[j];
    order[j] = {lam, j};
  }
  std::sort(order.begin(), order.end());
  for (int j = 0; j < k; ++j) {
    sys.eigenvalues.push_back(order[j].first);
    std::vector<double> u = std::move(vecs[order[j].second]);
    fix_sign(u);
    for (double& e : u) e *= scale;
    sys.eigenvectors.push_back(std::move(u));
  }
  sys.residual_norms = residuals(A, sys);
  return sys;
}

EigenSystem dense_eig(const SparseSymMatrix& A, double weight) {
  if (A.order > 3000) throw Error("dense_eig: order above the 3000 cap");
  Matrix D = Matrix::Zero(A.order, A.order);
  for (std::int64_t i = 0; i < A.order; ++i)
    for (std::int64_t p = A.row_offsets[i]; p < A.row_offsets[i + 1]; ++p)
      D(i, A.col_indices[p]) = A.values[p];
  D = (0.5 * (D + D.transpose())).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(D);
  if (es.info() != Eigen::Success) throw SolverError("dense_eig: eigensolve failed");

  std::int64_t nv = A.order;
  std::vector<std::pair<double, std::int64_t>> order(nv);
  std::vector<std::vector<double>> vecs(nv);
  for (std::int64_t j = 0; j < nv; ++j) {
    vecs[j].assign(es.eigenvectors().col(j).data(), es.eigenvectors().col(j).data() + nv);
    order[j] = {rayleigh_compensated(A, vecs[j].data()), j};
  }
  std::sort(order.begin(), order.end());

  EigenSystem sys;
  sys.weight = weight;
  double scale = 1.0 / std::sqrt(weight);
  for (std::int64_t j = 0; j < nv; ++j) {
    sys.eigenvalues.push_back(order[j].first);
    std::vector<double> u = std::move(vecs[order[j].second]);
    fix_sign(u);
    for (double& e : u) e *= scale;
    sys.eigenvectors.push_back(std::move(u));
  }
  sys.residual_norms = residuals(A, sys);
  return sys;
}

std::vector<double> residuals(const SparseSymMatrix& A, const EigenSystem& sys) {
  std::vector<double> out;
  out.reserve(sys.eigenvalues.size());
  for (std::size_t i = 0; i < sys.eigenvalues.size(); ++i) {
    const auto& u = sys.eigenvectors[i];
    if (std::int64_t(u.size()) != A.order) throw Error("residuals: dimension mismatch");
    double nu = norm2(u);
    if (nu == 0.0) throw Error("residuals: zero eigenvector");
    std::vector<double> r = A.matvec(u);
    axpy(-sys.eigenvalues[i], u, r);
    out.push_back(norm2(r) / nu);
  }
  return out;
}

}  // namespace platelab

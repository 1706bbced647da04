#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "platelab/discretize.hpp"

namespace platelab {

// Lowest eigenpairs in ascending order. Eigenvectors are normalized against
// the quadrature weight: weight * <u_i, u_j> = delta_ij to 1e-8.
struct EigenSystem {
  std::vector<double> eigenvalues;
  std::vector<std::vector<double>> eigenvectors;
  std::vector<double> residual_norms;  // ||A u - lambda u|| / ||u||
  double weight = 1.0;
};

// z = approx solve(r); must be linear, symmetric positive definite.
using Preconditioner = std::function<void(const double* r, double* z, std::int64_t n)>;

Preconditioner jacobi_preconditioner(const SparseSymMatrix& A);

// Approximates A_h^{-1} = K^{-2} by two nested Jacobi-CG solves on the
// second-order operator K = -L_h (relative tolerance 0.1, iteration cap
// 2 * axis_extent). Far stronger than plain Jacobi on the composed operator,
// whose conditioning grows like N^4.
Preconditioner second_order_preconditioner(const SparseSymMatrix& K, int axis_extent);

struct LobpcgOptions {
  Preconditioner preconditioner;  // empty: Jacobi on A
  int block_extra = -1;           // extra block columns, default min(k, 5)
  bool polish = true;             // compensated Rayleigh quotients on exit
};

// Blocked Rayleigh-Ritz minimization over [X W P] with SVQB whitening of the
// tail; restarts from fresh seeded vectors on basis degeneracy. Deterministic
// for a fixed seed. Preconditions: k <= order/4, tol in (0, 1e-2].
EigenSystem lobpcg(const SparseSymMatrix& A, int k, double tol, int max_iter,
                   std::uint64_t seed, double weight = 1.0, const LobpcgOptions& options = {});

// Dense full-spectrum oracle for order <= 3000.
EigenSystem dense_eig(const SparseSymMatrix& A, double weight = 1.0);

std::vector<double> residuals(const SparseSymMatrix& A, const EigenSystem& sys);

}  // namespace platelab

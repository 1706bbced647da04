#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "platelab/discretize.hpp"
#include "platelab/eigensolve.hpp"
#include "platelab/geometry.hpp"

using namespace platelab;

namespace {

SparseSymMatrix permuted(const SparseSymMatrix& A, const std::vector<std::int64_t>& perm) {
  std::vector<std::tuple<std::int64_t, std::int64_t, double>> trips;
  for (std::int64_t r = 0; r < A.order; ++r)
    for (std::int64_t q = A.row_offsets[r]; q < A.row_offsets[r + 1]; ++q)
      trips.emplace_back(perm[r], perm[A.col_indices[q]], A.values[q]);
  std::sort(trips.begin(), trips.end());
  SparseSymMatrix B;
  B.order = A.order;
  B.row_offsets.assign(A.order + 1, 0);
  for (const auto& [r, c, v] : trips) {
    (void)c;
    (void)v;
    ++B.row_offsets[r + 1];
  }
  for (std::int64_t r = 0; r < A.order; ++r) B.row_offsets[r + 1] += B.row_offsets[r];
  for (const auto& [r, c, v] : trips) {
    (void)r;
    B.col_indices.push_back(c);
    B.values.push_back(v);
  }
  return B;
}

SparseSymMatrix diagonal_matrix(std::int64_t n) {
  SparseSymMatrix A;
  A.order = n;
  A.row_offsets.resize(n + 1);
  for (std::int64_t i = 0; i <= n; ++i) A.row_offsets[i] = i;
  A.col_indices.resize(n);
  std::iota(A.col_indices.begin(), A.col_indices.end(), 0);
  A.values.assign(n, 1.0);
  return A;
}

}  // namespace

TEST_SUITE("eigensolve") {
  TEST_CASE("dense solve reproduces the second-difference spectrum") {
    GridDomain d = build_interval(1.0, 32);
    SparseSymMatrix K = assemble_L(d, identity_field(1));
    EigenSystem sys = dense_eig(K, d.cell_weight());
    for (int j = 1; j <= 5; ++j) {
      double s = std::sin(j * 3.14159265358979324 * d.h / 2.0);
      double exact = 4.0 / (d.h * d.h) * s * s;
      CHECK(sys.eigenvalues[j - 1] == doctest::Approx(exact).epsilon(1e-12));
    }
  }

  TEST_CASE("block solver agrees with the dense factorization") {
    GridDomain d = build_interval(1.0, 64);
    SparseSymMatrix K = assemble_L(d, identity_field(1));
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    LobpcgOptions opt;
    opt.preconditioner = second_order_preconditioner(K, 64);
    EigenSystem it = lobpcg(A, 4, 1e-8, 400, 99, d.cell_weight(), opt);
    EigenSystem ds = dense_eig(A, d.cell_weight());
    for (int j = 0; j < 4; ++j) {
      CHECK(it.eigenvalues[j] ==
            doctest::Approx(ds.eigenvalues[j]).epsilon(1e-9));
      // Ritz values from a subspace can only overshoot
      CHECK(it.eigenvalues[j] >= ds.eigenvalues[j] * (1.0 - 1e-12));
    }
  }

  TEST_CASE("residual norms meet the convergence contract") {
    GridDomain d = build_interval(1.0, 64);
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    double tol = 1e-7;
    EigenSystem sys = lobpcg(A, 3, tol, 400, 5, d.cell_weight());
    for (int j = 0; j < 3; ++j)
      CHECK(sys.residual_norms[j] <= tol * std::max(sys.eigenvalues[j], 1.0) * 1.0001);
  }

  TEST_CASE("fixed seed is bitwise deterministic, seeds agree to tolerance") {
    GridDomain d = build_interval(1.0, 48);
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    EigenSystem a = lobpcg(A, 3, 1e-9, 400, 1234, d.cell_weight());
    EigenSystem b = lobpcg(A, 3, 1e-9, 400, 1234, d.cell_weight());
    CHECK(a.eigenvalues == b.eigenvalues);
    CHECK(a.eigenvectors == b.eigenvectors);
    EigenSystem c = lobpcg(A, 3, 1e-9, 400, 77, d.cell_weight());
    for (int j = 0; j < 3; ++j)
      CHECK(a.eigenvalues[j] == doctest::Approx(c.eigenvalues[j]).epsilon(1e-8));
  }

  TEST_CASE("weighted orthonormality and sign convention") {
    GridDomain d = build_interval(1.0, 48);
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    EigenSystem sys = lobpcg(A, 3, 1e-9, 400, 3, d.cell_weight());
    for (int i = 0; i < 3; ++i) {
      double nrm = 0, first = 0;
      for (double x : sys.eigenvectors[i]) nrm += x * x;
      CHECK(d.cell_weight() * nrm == doctest::Approx(1.0).epsilon(1e-10));
      double scale = 0;
      for (double x : sys.eigenvectors[i]) scale = std::max(scale, std::fabs(x));
      for (double x : sys.eigenvectors[i])
        if (std::fabs(x) > 1e-12 * scale) {
          first = x;
          break;
        }
      CHECK(first > 0.0);
    }
  }

  TEST_CASE("relabeling unknowns leaves the spectrum fixed") {
    GridDomain d = build_interval(1.0, 24);
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    std::vector<std::int64_t> perm(A.order);
    std::iota(perm.begin(), perm.end(), 0);
    std::reverse(perm.begin(), perm.end());
    SparseSymMatrix B = permuted(A, perm);
    EigenSystem ea = dense_eig(A);
    EigenSystem eb = dense_eig(B);
    for (int j = 0; j < 6; ++j)
      CHECK(ea.eigenvalues[j] == doctest::Approx(eb.eigenvalues[j]).epsilon(1e-12));
  }

  TEST_CASE("failure modes") {
    GridDomain d = build_interval(1.0, 32);
    SparseSymMatrix A = assemble_clamped(d, identity_field(1));
    CHECK_THROWS_AS(lobpcg(A, 0, 1e-8, 100, 1), Error);
    CHECK_THROWS_AS(lobpcg(A, 30, 1e-8, 100, 1), Error);  // > order/4
    CHECK_THROWS_AS(lobpcg(A, 2, 0.5, 100, 1), Error);
    CHECK_THROWS_AS(lobpcg(A, 2, 1e-8, 0, 1), Error);
    try {
      lobpcg(A, 2, 1e-10, 1, 1, d.cell_weight());
      FAIL("expected no convergence in a single iteration");
    } catch (const SolverError& e) {
      CHECK(e.best_residuals.size() >= 2);
      CHECK(e.best_residuals[0] > 0.0);
    }
    CHECK_THROWS_AS(dense_eig(diagonal_matrix(3001)), Error);
    EigenSystem empty;
    empty.eigenvalues = {1.0};
    empty.eigenvectors = {{0.0, 0.0, 0.0}};
    SparseSymMatrix D3 = diagonal_matrix(3);
    CHECK_THROWS_AS(residuals(D3, empty), Error);
  }

  TEST_CASE("jacobi and operator preconditioners reach the same answers") {
    GridDomain d = build_rectangle(1.0, 1.0, 16, 16);
    SparseSymMatrix K = assemble_L(d, identity_field());
    SparseSymMatrix A = assemble_clamped(d, identity_field());
    LobpcgOptions op;
    op.preconditioner = second_order_preconditioner(K, 16);
    EigenSystem a = lobpcg(A, 3, 1e-8, 600, 21, d.cell_weight(), op);
    EigenSystem b = lobpcg(A, 3, 1e-8, 600, 21, d.cell_weight());
    for (int j = 0; j < 3; ++j)
      CHECK(a.eigenvalues[j] == doctest::Approx(b.eigenvalues[j]).epsilon(1e-8));
  }
}

#pragma once

#include <array>
#include <vector>

#include "platelab/discretize.hpp"
#include "platelab/eigensolve.hpp"
#include "platelab/geometry.hpp"

namespace platelab {

// Midpoint-rule inner product with weight h^dim; matches the eigenvector
// normalization, so orthonormality is exact by construction.
double inner(const std::vector<double>& u, const std::vector<double>& v,
             const GridDomain& domain);

// Componentwise second-order central differences; lattice values outside the
// interior read as zero (the Dirichlet data).
std::array<std::vector<double>, 2> gradient(const std::vector<double>& u,
                                            const GridDomain& domain);

// L u = -(K u) for K = assemble_L(domain, field).
std::vector<double> apply_L(const SparseSymMatrix& K, const std::vector<double>& u);

// The same stencil applied to an analytic sampler with true values at every
// lattice point, no boundary handling. Used for fields like the coordinate
// function that do not satisfy the clamped conditions.
std::vector<double> apply_L_free(const GridDomain& domain, const TensorField& field,
                                 const ScalarField& f);

// Eigenfunction functionals entering the bound checks. Vectors that a branch
// cannot provide stay empty (A/B/lhs_weight need flat data, E/F identity T).
struct FunctionalSet {
  std::vector<double> lambda;
  std::vector<double> A, B, lhs_weight;
  std::vector<double> C, D;
  std::vector<double> E_exact, E_bound, F_exact, F_bound;
  std::vector<std::vector<double>> Lu;                     // cached L u_i
  std::vector<std::array<std::vector<double>, 2>> grad_u;  // cached grad u_i
  // set when the verbatim mixed-dimension terms of C are active
  bool dimensional_audit = false;

  bool has_theorem1() const { return !A.empty(); }
  bool has_theorem2() const { return !C.empty(); }
  bool has_theorem3() const { return !E_exact.empty(); }
};

FunctionalSet theorem1_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k);
FunctionalSet theorem2_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k);
FunctionalSet theorem3_quantities(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const GeometricConstants& consts,
                                  int k);

// All branches that the inputs admit, merged into one set.
FunctionalSet make_functional_set(const EigenSystem& sys, const GridDomain& domain,
                                  const TensorField& field, const SparseSymMatrix& K,
                                  const GeometricConstants& consts, int k);

// Trial-function machinery over the first k pairs with the coordinate field
// h = x_{h_axis + 1}.
struct TrialSet {
  int k = 0;
  int h_axis = 0;
  std::vector<double> h_field;
  std::vector<std::vector<double>> p;    // per i
  std::vector<std::vector<double>> phi;  // per i, projected against u_1..u_k
  std::vector<double> w, v, tnorm2;      // per i
  std::vector<double> a, r, b;           // k x k, row-major
  double at(const std::vector<double>& m, int i, int j) const { return m[i * k + j]; }
};

TrialSet trial_functions(const EigenSystem& sys, const GridDomain& domain,
                         const TensorField& field, const SparseSymMatrix& K, int k,
                         int h_axis = 0);

struct PropositionSlacks {
  std::array<double, 3> lhs{}, rhs{}, slack{};
  double delta = 0.0;
};

// Slacks of the three trial-function inequalities at the given delta; the
// first does not involve delta.
PropositionSlacks proposition_check(const TrialSet& trial, const EigenSystem& sys,
                                    double delta);

}  // namespace platelab

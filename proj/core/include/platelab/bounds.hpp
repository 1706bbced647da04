#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "platelab/errors.hpp"
#include "platelab/functionals.hpp"
#include "platelab/geometry.hpp"

namespace platelab {

// eigenvalues holds lambda_1..lambda_{k+1}, ascending and positive.
struct SpectrumInput {
  std::vector<double> eigenvalues;
  int n = 2;
  GeometricConstants consts;
  const FunctionalSet* functionals = nullptr;
};

struct BoundResult {
  std::string name;
  std::string mode;  // "" when the row has a single form
  int k = 0;
  std::optional<double> delta;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool holds = false;
  bool evaluable = true;
  std::string note;
};

// Minimizer of delta*P + Q/delta over delta > 0: (sqrt(Q/P), 2*sqrt(P*Q)).
std::pair<double, double> delta_optimum(double P, double Q);

// 121 log-spaced points covering [1e-3, 1e3].
std::vector<double> delta_sweep_grid();

BoundResult check_theorem1(const SpectrumInput& spec,
                           std::optional<double> delta = std::nullopt);
BoundResult check_theorem2(const SpectrumInput& spec,
                           std::optional<double> delta = std::nullopt);
BoundResult check_theorem3(const SpectrumInput& spec,
                           std::optional<double> delta = std::nullopt);

enum class ExtractMode { as_stated, rederived };

// Upper bound for lambda_{k+1} from lambda_1..lambda_k. Returns +inf when the
// rederived quadratic has no real root.
double extract_next_bound_minimal(const std::vector<double>& eigenvalues, int n,
                                  ExtractMode mode);

std::vector<BoundResult> classical_checks(const std::vector<double>& eigenvalues, int n);

// Re-derives the geometric constants on a translated copy of the domain and
// re-checks theorem3 there. Eigenvalues are translation invariant; only I0 moves.
std::pair<BoundResult, BoundResult> translation_audit(const SpectrumInput& spec,
                                                      const GridDomain& domain,
                                                      const TensorField& field,
                                                      const Point& shift);

}  // namespace platelab

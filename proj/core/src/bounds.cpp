#include "platelab/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace platelab {

namespace {

void validate_spectrum(const std::vector<double>& lams, std::size_t min_count,
                       const char* who) {
  if (lams.size() < min_count) throw Error(std::string(who) + ": too few eigenvalues");
  for (std::size_t i = 0; i < lams.size(); ++i) {
    if (!(lams[i] > 0.0)) throw Error(std::string(who) + ": eigenvalues must be positive");
    if (i && lams[i] < lams[i - 1] * (1.0 - 1e-12))
      throw Error(std::string(who) + ": eigenvalues must be ascending");
  }
}

BoundResult make_result(std::string name, std::string mode, int k,
                        std::optional<double> delta, double lhs, double rhs) {
  BoundResult r;
  r.name = std::move(name);
  r.mode = std::move(mode);
  r.k = k;
  r.delta = delta;
  r.lhs = lhs;
  r.rhs = rhs;
  r.slack = rhs - lhs;
  r.holds = r.slack >= -1e-9 * std::fabs(rhs);
  return r;
}

// Shared body of the three delta-form checks: LHS <= delta*P + Q/delta.
BoundResult delta_form_check(const char* name, double lhs, double P, double Q,
                             std::optional<double> delta, int k) {
  double d, rhs;
  if (delta) {
    if (!(*delta > 0.0)) throw Error(std::string(name) + ": delta must be positive");
    d = *delta;
    rhs = d * P + Q / d;
  } else {
    auto [dopt, min_rhs] = delta_optimum(P, Q);
    d = dopt;
    rhs = min_rhs;
  }
  return make_result(name, "", k, d, lhs, rhs);
}

}  // namespace

std::pair<double, double> delta_optimum(double P, double Q) {
  if (!(P > 0.0) || !(Q > 0.0)) throw Error("delta_optimum: inputs must be positive");
  return {std::sqrt(Q / P), 2.0 * std::sqrt(P * Q)};
}

std::vector<double> delta_sweep_grid() {
  std::vector<double> g(121);
  for (int i = 0; i <= 120; ++i) g[i] = std::pow(10.0, -3.0 + 6.0 * i / 120.0);
  return g;
}

BoundResult check_theorem1(const SpectrumInput& spec, std::optional<double> delta) {
  validate_spectrum(spec.eigenvalues, 2, "check_theorem1");
  int k = int(spec.eigenvalues.size()) - 1;
  const FunctionalSet* f = spec.functionals;
  if (!f || !f->has_theorem1() || int(f->A.size()) < k || int(f->lhs_weight.size()) < k)
    throw Error("check_theorem1: functional data (A, B, lhs weights) required");
  double lamk1 = spec.eigenvalues[k];
  double lhs = 0, P = 0, Q = 0;
  for (int i = 0; i < k; ++i) {
    double gap = lamk1 - spec.eigenvalues[i];
    lhs += gap * gap * f->lhs_weight[i];
    P += gap * gap * f->A[i];
    Q += gap * f->B[i];
  }
  return delta_form_check("theorem1", lhs, P, Q, delta, k);
}

BoundResult check_theorem2(const SpectrumInput& spec, std::optional<double> delta) {
  validate_spectrum(spec.eigenvalues, 2, "check_theorem2");
  int k = int(spec.eigenvalues.size()) - 1;
  const FunctionalSet* f = spec.functionals;
  if (!f || !f->has_theorem2() || int(f->C.size()) < k || int(f->lhs_weight.size()) < k)
    throw Error("check_theorem2: functional data (C, D, lhs weights) required");
  double lamk1 = spec.eigenvalues[k];
  double lhs = 0, P = 0, Q = 0;
  for (int i = 0; i < k; ++i) {
    double gap = lamk1 - spec.eigenvalues[i];
    lhs += gap * gap * f->lhs_weight[i];
    P += gap * gap * f->C[i];
    Q += gap * f->D[i];
  }
  BoundResult r = delta_form_check("theorem2", lhs, P, Q, delta, k);
  if (f->dimensional_audit)
    r.note = "majorant mixes terms of different order in lambda; evaluated verbatim";
  return r;
}

BoundResult check_theorem3(const SpectrumInput& spec, std::optional<double> delta) {
  validate_spectrum(spec.eigenvalues, 2, "check_theorem3");
  int k = int(spec.eigenvalues.size()) - 1;
  double n = spec.n;
  double H0 = spec.consts.H0, I0 = spec.consts.I0;
  double lamk1 = spec.eigenvalues[k];
  double lhs = 0, P = 0, Q = 0;
  for (int i = 0; i < k; ++i) {
    double gap = lamk1 - spec.eigenvalues[i];
    double sq = std::sqrt(spec.eigenvalues[i]);
    lhs += n * gap * gap;
    P += gap * gap * (2.0 * n * H0 * I0 * sq + n * n * H0 * H0 + 4.0 * sq);
    Q += gap * (sq + 0.25 * n * n * H0 * H0);
  }
  return delta_form_check("theorem3", lhs, P, Q, delta, k);
}

double extract_next_bound_minimal(const std::vector<double>& eigenvalues, int n,
                                  ExtractMode mode) {
  validate_spectrum(eigenvalues, 1, "extract_next_bound_minimal");
  double k = double(eigenvalues.size());
  double n2 = double(n) * double(n);
  double S1 = 0, S2 = 0;
  for (double lam : eigenvalues) {
    S1 += lam;
    S2 += lam * lam;
  }
  double c = 1.0 + 8.0 / n2;
  double disc = c * c * (S1 / k) * (S1 / k) - (1.0 + 16.0 / n2) * (S2 / k);
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  double root = std::sqrt(disc);
  if (mode == ExtractMode::as_stated) return (2.0 + 1.0 / n2) * S1 / (2.0 * k) + root;
  return c * S1 / k + root;
}

std::vector<BoundResult> classical_checks(const std::vector<double>& eigenvalues, int n) {
  validate_spectrum(eigenvalues, 2, "classical_checks");
  int k = int(eigenvalues.size()) - 1;
  double lamk1 = eigenvalues[k];
  double nd = n;
  double cn = 8.0 * (nd + 2.0) / (nd * nd);
  double S1 = 0, Ssq = 0, S32 = 0;
  std::vector<double> gaps(k);
  for (int i = 0; i < k; ++i) {
    double lam = eigenvalues[i];
    S1 += lam;
    Ssq += std::sqrt(lam);
    S32 += lam * std::sqrt(lam);
    gaps[i] = lamk1 - lam;
  }
  bool degenerate = gaps[k - 1] <= 1e-12 * lamk1;

  std::vector<BoundResult> out;
  out.push_back(make_result("payne", "", k, std::nullopt, lamk1 - eigenvalues[k - 1],
                            cn * S1 / k));

  if (degenerate) {
    for (const char* name : {"hile_yeh", "hook"}) {
      BoundResult r;
      r.name = name;
      r.k = k;
      r.evaluable = false;
      r.note = "top gap is degenerate; reciprocal-gap sum undefined";
      out.push_back(r);
    }
  } else {
    double recip = 0.0;
    for (int i = 0; i < k; ++i) recip += std::sqrt(eigenvalues[i]) / gaps[i];
    out.push_back(make_result("hile_yeh", "", k, std::nullopt,
                              std::pow(double(k), 1.5) / (cn * std::sqrt(S1)), recip));
    out.push_back(make_result("hook", "", k, std::nullopt, double(k) * double(k) / cn,
                              Ssq * recip));
  }

  double cy = 0.0;
  for (int i = 0; i < k; ++i) cy += std::sqrt(eigenvalues[i] * gaps[i]);
  out.push_back(make_result("cheng_yang", "", k, std::nullopt, lamk1 - S1 / k,
                            std::sqrt(cn) * cy / k));

  double mean = S1 / k;
  double var = 0.0;
  for (int i = 0; i < k; ++i) var += (eigenvalues[i] - mean) * (eigenvalues[i] - mean);
  double rad = 64.0 / (nd * nd * double(k) * double(k)) * Ssq * S32 - var / k;
  if (rad < 0.0) {
    BoundResult r;
    r.name = "wang_xia";
    r.k = k;
    r.evaluable = false;
    r.note = "radicand negative; bound gives no constraint here";
    out.push_back(r);
  } else {
    out.push_back(make_result("wang_xia", "", k, std::nullopt, lamk1,
                              mean + std::sqrt(rad)));
  }
  return out;
}

std::pair<BoundResult, BoundResult> translation_audit(const SpectrumInput& spec,
                                                      const GridDomain& domain,
                                                      const TensorField& field,
                                                      const Point& shift) {
  BoundResult base = check_theorem3(spec);

  GridDomain moved = domain.translated(shift);
  ConstantOverrides keep;
  keep.S0 = spec.consts.S0;
  keep.H0 = spec.consts.H0;
  keep.m = spec.consts.m;
  SpectrumInput shifted = spec;
  shifted.consts = geometric_constants(moved, field, keep);

  BoundResult after = check_theorem3(shifted);
  char buf[96];
  std::snprintf(buf, sizeof buf, "domain translated by (%g, %g)", shift[0], shift[1]);
  after.note = buf;
  return {base, after};
}

}  // namespace platelab

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace platelab {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// Double-double value: hi + lo with |lo| <= ulp(hi)/2.
struct dd {
  double hi = 0.0;
  double lo = 0.0;
};

inline dd two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  double err = (a - (s - bb)) + (b - bb);
  return {s, err};
}

inline dd quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

inline dd dd_add(dd a, double b) {
  dd s = two_sum(a.hi, b);
  s.lo += a.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd dd_add(dd a, dd b) {
  dd s = two_sum(a.hi, b.hi);
  s.lo += a.lo + b.lo;
  return quick_two_sum(s.hi, s.lo);
}

inline dd dd_mul(dd a, double b) {
  dd p = two_prod(a.hi, b);
  p.lo += a.lo * b;
  return quick_two_sum(p.hi, p.lo);
}

inline double dd_div(dd a, dd b) {
  double q = a.hi / b.hi;
  dd r = dd_add(a, dd_mul(b, -q));  // remainder a - q*b
  return q + r.hi / b.hi;
}

// Sum of products accumulated in double-double; removes the O(n*eps*|a||b|)
// summation error of the plain dot.
inline double dot_compensated(const double* a, const double* b, std::size_t n) {
  dd acc{0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) acc = dd_add(acc, two_prod(a[i], b[i]));
  return acc.hi + acc.lo;
}

// 64-bit linear congruential generator (Knuth's MMIX constants).
// uniform() is in [-0.5, 0.5); the sequence depends only on the seed.
struct Lcg {
  std::uint64_t state;
  explicit Lcg(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  std::uint64_t next() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return state;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1p-53 - 0.5; }
};

}  // namespace platelab

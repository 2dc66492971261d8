#pragma once

// Reference implementations used only by the tests: plain loops in long
// double and natural log, no shared code with the library.

#include <cmath>
#include <limits>
#include <vector>

namespace oracle {

inline double renyi_bits(const std::vector<double>& p, const std::vector<double>& q, double a) {
  long double s = 0.0L;
  if (std::isinf(a)) {
    long double m = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
      m = std::max(m, static_cast<long double>(p[i]) / q[i]);
    }
    return static_cast<double>(std::log(m) / std::log(2.0L));
  }
  if (a == 1.0) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] == 0.0) continue;
      if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
      s += p[i] * std::log(static_cast<long double>(p[i]) / q[i]);
    }
    return static_cast<double>(s / std::log(2.0L));
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    s += std::pow(static_cast<long double>(p[i]), a) * std::pow(static_cast<long double>(q[i]), 1.0L - a);
  }
  return static_cast<double>(std::log(s) / ((a - 1.0L) * std::log(2.0L)));
}

inline double renyi_entropy_bits(const std::vector<double>& p, double a) {
  long double s = 0.0L;
  if (a == 1.0) {
    for (double v : p)
      if (v > 0.0) s -= v * std::log(static_cast<long double>(v));
    return static_cast<double>(s / std::log(2.0L));
  }
  for (double v : p)
    if (v > 0.0) s += std::pow(static_cast<long double>(v), a);
  return static_cast<double>(std::log(s) / ((1.0L - a) * std::log(2.0L)));
}

inline std::vector<double> mix(const std::vector<std::vector<double>>& qs, const std::vector<double>& w) {
  std::vector<double> out(qs[0].size(), 0.0);
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t x = 0; x < out.size(); ++x) out[x] += w[i] * qs[i][x];
  return out;
}

/// Minimum of f over the simplex grid with the given step, k in {2, 3}.
template <class F>
double simplex_grid_min(std::size_t k, double step, F&& f) {
  const int n = static_cast<int>(std::lround(1.0 / step));
  double best = std::numeric_limits<double>::infinity();
  if (k == 2) {
    for (int i = 0; i <= n; ++i) {
      const double a = static_cast<double>(i) / n;
      best = std::min(best, f(std::vector<double>{a, 1.0 - a}));
    }
    return best;
  }
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double a = static_cast<double>(i) / n, b = static_cast<double>(j) / n;
      best = std::min(best, f(std::vector<double>{a, b, std::max(0.0, 1.0 - a - b)}));
    }
  return best;
}

}  // namespace oracle

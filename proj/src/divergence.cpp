#include "msa/divergence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

namespace msa {

namespace {

constexpr double kLn2 = std::numbers::ln2;
// Below this distance from 1 the divergence sum is formed as 1 + sum(expm1)
// so the small logarithm does not lose digits to cancellation.
constexpr double kNearOne = 0.5;

}  // namespace

AlphaOrder AlphaOrder::finite(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0) || alpha == 1.0)
    throw InputError("alpha: finite order must be positive and different from 1, got " +
                     std::to_string(alpha));
  return AlphaOrder(Kind::finite, alpha);
}

AlphaOrder AlphaOrder::from_value(double alpha) {
  if (alpha == 0.0) return zero();
  if (alpha == 1.0) return one();
  if (std::isinf(alpha) && alpha > 0.0) return infinity();
  return finite(alpha);
}

AlphaOrder AlphaOrder::parse(std::string_view text) {
  if (text == "zero") return zero();
  if (text == "one") return one();
  if (text == "inf" || text == "infinity") return infinity();
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw InputError("alpha: cannot parse '" + std::string(text) + "'");
  return from_value(value);
}

std::string AlphaOrder::to_string() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::one: return "one";
    case Kind::infinity: return "inf";
    case Kind::finite: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value_);
  return buf;
}

double AlphaOrder::holder_exponent() const {
  if (kind_ == Kind::infinity) return 1.0;
  return (value_ - 1.0) / value_;
}

double DivergenceValue::exp2() const { return is_infinite ? kInf : std::exp2(bits); }

double log_sum_exp(std::span<const double> terms) {
  double peak = -kInf;
  for (double t : terms) peak = std::max(peak, t);
  if (!std::isfinite(peak)) return peak;
  double total = 0.0;
  for (double t : terms) total += std::exp(t - peak);
  return peak + std::log(total);
}

double renyi_entropy(const Dist& p, AlphaOrder alpha) {
  const auto probs = p.probs();
  double h = 0.0;
  switch (alpha.kind()) {
    case AlphaOrder::Kind::zero: {
      const auto charged = std::count_if(probs.begin(), probs.end(), [](double v) { return v > 0.0; });
      h = std::log2(static_cast<double>(charged));
      break;
    }
    case AlphaOrder::Kind::one:
      for (double v : probs)
        if (v > 0.0) h -= v * std::log2(v);
      break;
    case AlphaOrder::Kind::infinity:
      h = -std::log2(*std::max_element(probs.begin(), probs.end()));
      break;
    case AlphaOrder::Kind::finite: {
      const double a = alpha.value();
      if (std::abs(a - 1.0) <= kNearOne) {
        double excess = 0.0;  // sum P^a - 1
        for (double v : probs)
          if (v > 0.0) excess += v * std::expm1((a - 1.0) * std::log(v));
        h = std::log1p(excess) / ((1.0 - a) * kLn2);
      } else {
        std::vector<double> terms;
        terms.reserve(probs.size());
        for (double v : probs)
          if (v > 0.0) terms.push_back(a * std::log(v));
        h = log_sum_exp(terms) / ((1.0 - a) * kLn2);
      }
      break;
    }
  }
  return std::max(0.0, h);
}

double renyi_divergence_bits(std::span<const double> p, std::span<const double> q, AlphaOrder alpha) {
  if (p.size() != q.size()) throw InputError("renyi_divergence: length mismatch");
  if (alpha.kind() == AlphaOrder::Kind::zero)
    throw InputError("renyi_divergence: order zero is not defined");

  const std::size_t n = p.size();
  const bool at_least_one = alpha.kind() != AlphaOrder::Kind::finite || alpha.value() > 1.0;
  if (at_least_one) {
    for (std::size_t x = 0; x < n; ++x)
      if (p[x] > 0.0 && q[x] == 0.0) return kInf;
  }

  double bits = 0.0;
  switch (alpha.kind()) {
    case AlphaOrder::Kind::one:
      for (std::size_t x = 0; x < n; ++x)
        if (p[x] > 0.0) bits += p[x] * (std::log2(p[x]) - std::log2(q[x]));
      break;
    case AlphaOrder::Kind::infinity: {
      bits = -kInf;
      for (std::size_t x = 0; x < n; ++x)
        if (p[x] > 0.0) bits = std::max(bits, std::log2(p[x]) - std::log2(q[x]));
      break;
    }
    case AlphaOrder::Kind::finite: {
      const double a = alpha.value();
      bool done = false;
      if (std::abs(a - 1.0) <= kNearOne) {
        double excess = 0.0;  // sum P (P/Q)^(a-1) - 1
        for (std::size_t x = 0; x < n; ++x) {
          if (p[x] == 0.0) continue;
          const double log_ratio = q[x] > 0.0 ? std::log(p[x]) - std::log(q[x]) : kInf;
          excess += p[x] * std::expm1((a - 1.0) * log_ratio);
        }
        if (std::isfinite(excess)) {
          if (excess <= -1.0) return kInf;
          bits = std::log1p(excess) / ((a - 1.0) * kLn2);
          done = true;
        }
      }
      if (!done) {
        std::vector<double> terms;
        terms.reserve(n);
        for (std::size_t x = 0; x < n; ++x) {
          if (p[x] == 0.0 || q[x] == 0.0) continue;  // q == 0 only reachable for a < 1
          terms.push_back(a * std::log(p[x]) + (1.0 - a) * std::log(q[x]));
        }
        const double lse = log_sum_exp(terms);
        if (!std::isfinite(lse)) return kInf;
        bits = lse / ((a - 1.0) * kLn2);
      }
      break;
    }
    case AlphaOrder::Kind::zero: break;
  }
  if (!std::isfinite(bits)) return kInf;
  return std::max(0.0, bits);
}

DivergenceValue renyi_divergence(const Dist& p, const Dist& q, AlphaOrder alpha) {
  if (!same_support(p.support(), q.support()))
    throw InputError("renyi_divergence: distributions do not share a support");
  const double bits = renyi_divergence_bits(p.probs(), q.probs(), alpha);
  if (std::isinf(bits)) return DivergenceValue::infinite();
  return {bits, false};
}

double d_alpha(const Dist& p, const Dist& q, AlphaOrder alpha) {
  return renyi_divergence(p, q, alpha).exp2();
}

}  // namespace msa

#pragma once

// Renyi entropy and divergence in bits, with closed-form branches for the
// orders 0, 1 and infinity.

#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "msa/core.hpp"

namespace msa {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class AlphaOrder {
 public:
  enum class Kind { zero, one, finite, infinity };

  static AlphaOrder zero() { return AlphaOrder(Kind::zero, 0.0); }
  static AlphaOrder one() { return AlphaOrder(Kind::one, 1.0); }
  static AlphaOrder infinity() { return AlphaOrder(Kind::infinity, kInf); }
  /// Strictly positive, finite, and different from 1.
  static AlphaOrder finite(double alpha);
  /// Maps 0, 1 and +inf onto their dedicated variants.
  static AlphaOrder from_value(double alpha);
  /// Accepts "zero", "one", "inf"/"infinity", or a decimal number.
  static AlphaOrder parse(std::string_view text);

  Kind kind() const { return kind_; }
  double value() const { return value_; }
  bool is_infinite() const { return kind_ == Kind::infinity; }
  /// True for the orders the loss bounds accept: finite alpha > 1 or infinity.
  bool above_one() const { return kind_ == Kind::infinity || (kind_ == Kind::finite && value_ > 1.0); }
  std::string to_string() const;

  /// (alpha - 1) / alpha, equal to 1 at infinity.
  double holder_exponent() const;

 private:
  AlphaOrder(Kind kind, double value) : kind_(kind), value_(value) {}
  Kind kind_;
  double value_;
};

struct DivergenceValue {
  double bits = 0.0;  // +inf when is_infinite
  bool is_infinite = false;

  static DivergenceValue infinite() { return {kInf, true}; }
  /// 2^bits.
  double exp2() const;
};

double renyi_entropy(const Dist& p, AlphaOrder alpha);

DivergenceValue renyi_divergence(const Dist& p, const Dist& q, AlphaOrder alpha);

/// Same as renyi_divergence on raw probability vectors; +inf when infinite.
double renyi_divergence_bits(std::span<const double> p, std::span<const double> q, AlphaOrder alpha);

/// 2 raised to the Renyi divergence; +inf when the divergence is infinite.
double d_alpha(const Dist& p, const Dist& q, AlphaOrder alpha);

/// Numerically stable log(sum(exp(terms))) in natural log; -inf when empty.
double log_sum_exp(std::span<const double> terms);

}  // namespace msa

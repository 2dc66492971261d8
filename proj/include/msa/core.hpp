#pragma once

// Finite sample spaces, distributions over them, tabulated hypotheses and
// the bounded losses used throughout the library.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace msa {

/// Raised for any violated precondition or malformed input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered set of opaque point identifiers, optionally with a real
/// coordinate vector per point.
class Support {
 public:
  explicit Support(std::vector<std::string> points,
                   std::vector<std::vector<double>> coords = {});

  std::size_t size() const { return points_.size(); }
  const std::string& id(std::size_t i) const { return points_.at(i); }
  std::span<const std::string> points() const { return points_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  bool has_coords() const { return !coords_.empty(); }
  std::span<const double> coord(std::size_t i) const { return coords_.at(i); }

  bool same_points(const Support& other) const { return points_ == other.points_; }

 private:
  std::vector<std::string> points_;
  std::vector<std::vector<double>> coords_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SupportPtr = std::shared_ptr<const Support>;

SupportPtr make_support(std::vector<std::string> points,
                        std::vector<std::vector<double>> coords = {});
/// Support with ids "x0", "x1", ...
SupportPtr indexed_support(std::size_t n);

bool same_support(const SupportPtr& a, const SupportPtr& b);

inline constexpr double kDistTolerance = 1e-9;
inline constexpr double kSimplexTolerance = 1e-12;

class Dist {
 public:
  Dist(SupportPtr support, std::vector<double> probs);

  const SupportPtr& support() const { return support_; }
  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  SupportPtr support_;
  std::vector<double> probs_;
};

/// A point of the probability simplex in R^k.
class SimplexWeights {
 public:
  explicit SimplexWeights(std::vector<double> weights);

  static SimplexWeights uniform(std::size_t k);
  static SimplexWeights vertex(std::size_t k, std::size_t i);
  /// Normalizes a nonnegative, not-all-zero vector onto the simplex.
  static SimplexWeights normalized(std::vector<double> raw);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> values() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

/// Real-valued function tabulated over a support, values in [0, range_bound].
class Hypothesis {
 public:
  Hypothesis(SupportPtr support, std::vector<double> values, double range_bound = 1.0);

  const SupportPtr& support() const { return support_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double range_bound() const { return range_bound_; }
  bool is_boolean() const;

 private:
  SupportPtr support_;
  std::vector<double> values_;
  double range_bound_;
};

enum class LossKind { absolute, zero_one, squared };

struct LossSpec {
  LossKind kind = LossKind::absolute;
  double bound_M = 1.0;
  /// Relaxed triangle inequality factor; 1 is the exact triangle inequality.
  double beta = 1.0;
  bool convex_first = true;  // convex in the prediction argument
  bool convex_joint = true;  // convex in (prediction, target) jointly

  static LossSpec absolute(double range_bound = 1.0);
  static LossSpec squared(double range_bound = 1.0);
  static LossSpec zero_one();

  /// Largest hypothesis value B compatible with bound_M.
  double value_bound() const;
  double operator()(double prediction, double target) const;
  /// Derivative (a subgradient for absolute loss) in the prediction.
  double derivative(double prediction, double target) const;
};

std::string to_string(LossKind kind);
LossKind parse_loss_kind(std::string_view name);

double expected_loss(const Dist& p, const Hypothesis& h, const Hypothesis& f, const LossSpec& loss);

/// E_q[L(h, f)^exponent], exponent >= 1.
double expected_power_loss(const Dist& q, const Hypothesis& h, const Hypothesis& f,
                           const LossSpec& loss, double exponent);

Dist mixture(std::span<const Dist> sources, const SimplexWeights& weights);

Dist uniform_dist(const SupportPtr& support);

/// Throws unless all distributions share one support and the list is nonempty.
void require_common_support(std::span<const Dist> dists, std::string_view what);

}  // namespace msa

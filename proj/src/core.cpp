#include "msa/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace msa {

Support::Support(std::vector<std::string> points, std::vector<std::vector<double>> coords)
    : points_(std::move(points)), coords_(std::move(coords)) {
  if (points_.empty()) throw InputError("support: must contain at least one point");
  if (!coords_.empty() && coords_.size() != points_.size())
    throw InputError("support: coords length " + std::to_string(coords_.size()) +
                     " != number of points " + std::to_string(points_.size()));
  index_.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!index_.emplace(points_[i], i).second)
      throw InputError("support: duplicate point id '" + points_[i] + "'");
  }
}

std::optional<std::size_t> Support::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SupportPtr make_support(std::vector<std::string> points, std::vector<std::vector<double>> coords) {
  return std::make_shared<const Support>(std::move(points), std::move(coords));
}

SupportPtr indexed_support(std::size_t n) {
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = "x" + std::to_string(i);
  return make_support(std::move(ids));
}

bool same_support(const SupportPtr& a, const SupportPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return a->same_points(*b);
}

Dist::Dist(SupportPtr support, std::vector<double> probs)
    : support_(std::move(support)), probs_(std::move(probs)) {
  if (!support_) throw InputError("dist: null support");
  if (probs_.size() != support_->size())
    throw InputError("dist: probs length " + std::to_string(probs_.size()) +
                     " != support size " + std::to_string(support_->size()));
  double total = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double v = probs_[i];
    if (!std::isfinite(v) || v < 0.0)
      throw InputError("dist: probs[" + std::to_string(i) + "] = " + std::to_string(v) +
                       " is not a nonnegative real");
    total += v;
  }
  if (std::abs(total - 1.0) > kDistTolerance)
    throw InputError("dist: probs sum to " + std::to_string(total) + ", expected 1");
}

SimplexWeights::SimplexWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) throw InputError("simplex weights: empty");
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0)
      throw InputError("simplex weights: weights[" + std::to_string(i) + "] is negative or not finite");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > kSimplexTolerance)
    throw InputError("simplex weights: sum " + std::to_string(total) + " != 1");
}

SimplexWeights SimplexWeights::uniform(std::size_t k) {
  if (k == 0) throw InputError("simplex weights: k must be positive");
  return SimplexWeights(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

SimplexWeights SimplexWeights::vertex(std::size_t k, std::size_t i) {
  if (i >= k) throw InputError("simplex weights: vertex index out of range");
  std::vector<double> w(k, 0.0);
  w[i] = 1.0;
  return SimplexWeights(std::move(w));
}

SimplexWeights SimplexWeights::normalized(std::vector<double> raw) {
  double total = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("simplex weights: cannot normalize negative entries");
    total += v;
  }
  if (!(total > 0.0)) throw InputError("simplex weights: cannot normalize a zero vector");
  for (double& v : raw) v /= total;
  // Push the residual rounding error onto the largest coordinate.
  const double drift = 1.0 - std::accumulate(raw.begin(), raw.end(), 0.0);
  auto largest = std::max_element(raw.begin(), raw.end());
  *largest = std::max(0.0, *largest + drift);
  return SimplexWeights(std::move(raw));
}

Hypothesis::Hypothesis(SupportPtr support, std::vector<double> values, double range_bound)
    : support_(std::move(support)), values_(std::move(values)), range_bound_(range_bound) {
  if (!support_) throw InputError("hypothesis: null support");
  if (!std::isfinite(range_bound_) || range_bound_ < 0.0)
    throw InputError("hypothesis: range_bound must be a finite nonnegative real");
  if (values_.size() != support_->size())
    throw InputError("hypothesis: values length " + std::to_string(values_.size()) +
                     " != support size " + std::to_string(support_->size()));
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0 || v > range_bound_)
      throw InputError("hypothesis: values[" + std::to_string(i) + "] = " + std::to_string(v) +
                       " outside [0, " + std::to_string(range_bound_) + "]");
  }
}

bool Hypothesis::is_boolean() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

LossSpec LossSpec::absolute(double range_bound) {
  if (!(range_bound > 0.0)) throw InputError("loss: range bound must be positive");
  return LossSpec{LossKind::absolute, range_bound, 1.0, true, true};
}

LossSpec LossSpec::squared(double range_bound) {
  if (!(range_bound > 0.0)) throw InputError("loss: range bound must be positive");
  // (a + b)^2 <= 2a^2 + 2b^2 gives the 2-relaxed triangle inequality.
  return LossSpec{LossKind::squared, range_bound * range_bound, 2.0, true, true};
}

LossSpec LossSpec::zero_one() {
  // Only defined on Boolean arguments, so no convexity claim is made.
  return LossSpec{LossKind::zero_one, 1.0, 1.0, false, false};
}

double LossSpec::value_bound() const {
  switch (kind) {
    case LossKind::absolute: return bound_M;
    case LossKind::squared: return std::sqrt(bound_M);
    case LossKind::zero_one: return 1.0;
  }
  return bound_M;
}

double LossSpec::operator()(double prediction, double target) const {
  switch (kind) {
    case LossKind::absolute: return std::abs(prediction - target);
    case LossKind::squared: return (prediction - target) * (prediction - target);
    case LossKind::zero_one: return prediction == target ? 0.0 : 1.0;
  }
  return 0.0;
}

double LossSpec::derivative(double prediction, double target) const {
  switch (kind) {
    case LossKind::absolute:
      return prediction > target ? 1.0 : (prediction < target ? -1.0 : 0.0);
    case LossKind::squared: return 2.0 * (prediction - target);
    case LossKind::zero_one: break;
  }
  throw InputError("loss: zero_one loss has no derivative");
}

std::string to_string(LossKind kind) {
  switch (kind) {
    case LossKind::absolute: return "absolute";
    case LossKind::zero_one: return "zero_one";
    case LossKind::squared: return "squared";
  }
  return "?";
}

LossKind parse_loss_kind(std::string_view name) {
  if (name == "absolute") return LossKind::absolute;
  if (name == "squared") return LossKind::squared;
  if (name == "zero_one" || name == "01") return LossKind::zero_one;
  throw InputError("loss: unknown kind '" + std::string(name) + "'");
}

namespace {

void check_loss_inputs(const Dist& p, const Hypothesis& h, const Hypothesis& f, const LossSpec& loss) {
  if (!same_support(p.support(), h.support()) || !same_support(p.support(), f.support()))
    throw InputError("expected_loss: distribution and hypotheses do not share a support");
  if (loss.kind == LossKind::zero_one) {
    if (!h.is_boolean() || !f.is_boolean())
      throw InputError("expected_loss: zero_one loss requires Boolean-valued functions");
    return;
  }
  const double b = loss.value_bound();
  if (h.range_bound() > b * (1.0 + 1e-12) || f.range_bound() > b * (1.0 + 1e-12))
    throw InputError("expected_loss: hypothesis range exceeds the loss bound M");
}

}  // namespace

double expected_loss(const Dist& p, const Hypothesis& h, const Hypothesis& f, const LossSpec& loss) {
  return expected_power_loss(p, h, f, loss, 1.0);
}

double expected_power_loss(const Dist& q, const Hypothesis& h, const Hypothesis& f,
                           const LossSpec& loss, double exponent) {
  if (!(exponent >= 1.0)) throw InputError("expected_power_loss: exponent must be >= 1");
  check_loss_inputs(q, h, f, loss);
  double total = 0.0;
  for (std::size_t x = 0; x < q.size(); ++x) {
    if (q[x] == 0.0) continue;
    const double l = loss(h[x], f[x]);
    total += q[x] * (exponent == 1.0 ? l : std::pow(l, exponent));
  }
  return total;
}

void require_common_support(std::span<const Dist> dists, std::string_view what) {
  if (dists.empty()) throw InputError(std::string(what) + ": no distributions given");
  for (const Dist& d : dists.subspan(1)) {
    if (!same_support(dists.front().support(), d.support()))
      throw InputError(std::string(what) + ": distributions do not share a support");
  }
}

Dist mixture(std::span<const Dist> sources, const SimplexWeights& weights) {
  require_common_support(sources, "mixture");
  if (sources.size() != weights.size())
    throw InputError("mixture: " + std::to_string(sources.size()) + " sources but " +
                     std::to_string(weights.size()) + " weights");
  const std::size_t n = sources.front().size();
  std::vector<double> probs(n, 0.0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const double w = weights[i];
    if (w == 0.0) continue;
    for (std::size_t x = 0; x < n; ++x) probs[x] += w * sources[i][x];
  }
  return Dist(sources.front().support(), std::move(probs));
}

Dist uniform_dist(const SupportPtr& support) {
  if (!support || support->size() == 0) throw InputError("uniform_dist: empty support");
  const double mass = 1.0 / static_cast<double>(support->size());
  return Dist(support, std::vector<double>(support->size(), mass));
}

}  // namespace msa

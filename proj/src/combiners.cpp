#include "msa/combiners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace msa {

namespace {

void check_inputs(std::span<const Dist> sources, std::span<const Hypothesis> hyps, std::string_view what) {
  if (sources.empty()) throw InputError(std::string(what) + ": at least one source is required");
  if (sources.size() != hyps.size())
    throw InputError(std::string(what) + ": " + std::to_string(sources.size()) + " sources but " +
                     std::to_string(hyps.size()) + " hypotheses");
  require_common_support(sources, what);
  for (const Hypothesis& h : hyps)
    if (!same_support(sources.front().support(), h.support()))
      throw InputError(std::string(what) + ": hypothesis support differs from the sources");
}

// Pointwise convex combination. `weigh(x, w)` fills unnormalized weights for
// point x; an all-zero weight vector yields the value 0.
template <typename WeightFn>
Hypothesis blend(std::span<const Dist> sources, std::span<const Hypothesis> hyps, WeightFn&& weigh) {
  const std::size_t k = sources.size();
  const std::size_t n = sources.front().size();
  double bound = 0.0;
  for (const Hypothesis& h : hyps) bound = std::max(bound, h.range_bound());

  std::vector<double> values(n, 0.0);
  std::vector<double> w(k);
  for (std::size_t x = 0; x < n; ++x) {
    weigh(x, w);
    double total = 0.0;
    double acc = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < k; ++i) {
      if (w[i] <= 0.0) continue;
      total += w[i];
      acc += w[i] * hyps[i][x];
      lo = std::min(lo, hyps[i][x]);
      hi = std::max(hi, hyps[i][x]);
    }
    if (total > 0.0) values[x] = std::clamp(acc / total, lo, hi);
  }
  return Hypothesis(sources.front().support(), std::move(values), bound);
}

}  // namespace

void CombinerParams::validate(std::size_t k) const {
  const bool smoothed = std::holds_alternative<SmoothedRule>(rule);
  if (!smoothed && eta != 0.0) throw InputError("combiner: eta is only meaningful for the smoothed rule");
  if (smoothed && !(eta >= 0.0 && eta < 1.0)) throw InputError("combiner: eta must lie in [0, 1)");
  if (const auto* rn = std::get_if<RNormRule>(&rule)) {
    if (!(rn->r >= 1.0)) throw InputError("combiner: r must be >= 1");
    return;
  }
  if (!weights) throw InputError("combiner: simplex weights are required for this rule");
  if (weights->size() != k)
    throw InputError("combiner: " + std::to_string(weights->size()) + " weights for " +
                     std::to_string(k) + " sources");
}

Hypothesis combine_distribution_weighted(std::span<const Dist> sources,
                                         std::span<const Hypothesis> hyps,
                                         const SimplexWeights& z) {
  check_inputs(sources, hyps, "combine_distribution_weighted");
  if (z.size() != sources.size()) throw InputError("combine_distribution_weighted: weight count mismatch");
  return blend(sources, hyps, [&](std::size_t x, std::vector<double>& w) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = z[i] * sources[i][x];
  });
}

Hypothesis combine_smoothed(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                            const SimplexWeights& lambda, double eta) {
  check_inputs(sources, hyps, "combine_smoothed");
  if (lambda.size() != sources.size()) throw InputError("combine_smoothed: weight count mismatch");
  if (!(eta >= 0.0 && eta < 1.0)) throw InputError("combine_smoothed: eta must lie in [0, 1)");
  const double k = static_cast<double>(sources.size());
  const double share = eta / (k * static_cast<double>(sources.front().size()));  // (eta/k) U(x)
  return blend(sources, hyps, [&](std::size_t x, std::vector<double>& w) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = lambda[i] * sources[i][x] + share;
  });
}

Hypothesis combine_r_norm(std::span<const Dist> sources, std::span<const Hypothesis> hyps, double r) {
  check_inputs(sources, hyps, "combine_r_norm");
  if (!(r >= 1.0)) throw InputError("combine_r_norm: r must be >= 1");
  if (std::isinf(r)) {
    return blend(sources, hyps, [&](std::size_t x, std::vector<double>& w) {
      std::fill(w.begin(), w.end(), 0.0);
      std::size_t best = 0;
      for (std::size_t i = 1; i < w.size(); ++i)
        if (sources[i][x] > sources[best][x]) best = i;
      if (sources[best][x] > 0.0) w[best] = 1.0;
    });
  }
  return blend(sources, hyps, [&](std::size_t x, std::vector<double>& w) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = sources[i][x] > 0.0 ? r * std::log(sources[i][x]) : -std::numeric_limits<double>::infinity();
      peak = std::max(peak, w[i]);
    }
    for (double& v : w) v = std::isfinite(peak) ? std::exp(v - peak) : 0.0;
  });
}

Hypothesis combine(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                   const CombinerParams& params) {
  params.validate(sources.size());
  return std::visit(
      [&](const auto& rule) -> Hypothesis {
        using Rule = std::decay_t<decltype(rule)>;
        if constexpr (std::is_same_v<Rule, DistributionWeightedRule>)
          return combine_distribution_weighted(sources, hyps, *params.weights);
        else if constexpr (std::is_same_v<Rule, SmoothedRule>)
          return combine_smoothed(sources, hyps, *params.weights, params.eta);
        else
          return combine_r_norm(sources, hyps, rule.r);
      },
      params.rule);
}

}  // namespace msa

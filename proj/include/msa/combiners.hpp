#pragma once

// Rules that merge k source hypotheses into one, pointwise, using the source
// distributions as weights.

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "msa/core.hpp"

namespace msa {

struct DistributionWeightedRule {};
struct SmoothedRule {};
/// r in [1, inf]; r = inf selects the argmax source.
struct RNormRule {
  double r = 1.0;
};

using CombinerRule = std::variant<DistributionWeightedRule, SmoothedRule, RNormRule>;

struct CombinerParams {
  CombinerRule rule = DistributionWeightedRule{};
  std::optional<SimplexWeights> weights;  // z or lambda; unused by r-norm rules
  double eta = 0.0;                       // uniform smoothing mass, smoothed rule only

  void validate(std::size_t k) const;
};

/// h_z(x) = sum_i z_i Q_i(x) h_i(x) / sum_j z_j Q_j(x), or 0 where the denominator vanishes.
Hypothesis combine_distribution_weighted(std::span<const Dist> sources,
                                         std::span<const Hypothesis> hyps,
                                         const SimplexWeights& z);

/// Distribution-weighted rule with (eta/k) U(x) added to each source weight.
Hypothesis combine_smoothed(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                            const SimplexWeights& lambda, double eta);

/// Weights Q_i^r / sum_j Q_j^r, computed in log space. Ties of the r = inf
/// rule go to the lowest source index.
Hypothesis combine_r_norm(std::span<const Dist> sources, std::span<const Hypothesis> hyps, double r);

Hypothesis combine(std::span<const Dist> sources, std::span<const Hypothesis> hyps,
                   const CombinerParams& params);

}  // namespace msa

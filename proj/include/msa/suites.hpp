#pragma once

// Randomized verification suites: each trial draws a valid instance for one
// bound and records the resulting BoundReport.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msa/bounds.hpp"
#include "msa/core.hpp"
#include "msa/random.hpp"

namespace msa {

namespace gen {

/// Log-normal weights with a random spread; with probability `sparsity` a
/// point is zeroed (at least one point always keeps mass).
Dist random_dist(Philox& rng, const SupportPtr& support, double sparsity = 0.0);
/// Q times exp(sigma * N(0,1)) pointwise, renormalized.
Dist perturb(Philox& rng, const Dist& q, double sigma);
SimplexWeights random_weights(Philox& rng, std::size_t k);
Hypothesis random_boolean(Philox& rng, const SupportPtr& support);
Hypothesis random_real(Philox& rng, const SupportPtr& support, double range_bound = 1.0);
/// Boolean copy of f with each value flipped with probability `flip`.
Hypothesis flip_labels(Philox& rng, const Hypothesis& f, double flip);
/// f plus uniform noise of half-width `noise`, clamped to [0, range_bound].
Hypothesis jitter(Philox& rng, const Hypothesis& f, double noise);
std::size_t between(Philox& rng, std::size_t lo, std::size_t hi);

}  // namespace gen

struct SuiteOptions {
  std::size_t trials = 1000;
  std::uint64_t seed = 42;
  std::optional<double> alpha;  // fixed order (or r) instead of the suite's rotation
  std::size_t threads = 0;      // 0: default_thread_count()
};

struct SuiteResult {
  std::string suite;
  std::size_t trials = 0;
  std::size_t violations = 0;
  std::size_t vacuous = 0;
  std::vector<BoundReport> reports;  // trial order
};

/// lemma1, lemma9, lemma11, lemma12, lemma12_scaled, thm2, thm5, thm8, thm10,
/// thm13, thm14, cor15, thm16, thm17. lemma12 checks the additive form,
/// lemma12_scaled the form with the factor (a - 1/2)/(a - 1).
const std::vector<std::string>& suite_names();

SuiteResult run_suite(std::string_view name, const SuiteOptions& options);

}  // namespace msa

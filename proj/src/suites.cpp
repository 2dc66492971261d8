#include "msa/suites.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "msa/fitting.hpp"
#include "msa/parallel.hpp"

namespace msa {

namespace gen {

std::size_t between(Philox& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

Dist random_dist(Philox& rng, const SupportPtr& support, double sparsity) {
  const std::size_t n = support->size();
  const double spread = rng.uniform(0.0, 2.5);
  std::vector<double> w(n);
  for (auto& v : w) v = std::exp(spread * rng.normal());
  if (sparsity > 0.0) {
    const std::size_t keep = static_cast<std::size_t>(rng.below(n));
    for (std::size_t x = 0; x < n; ++x)
      if (x != keep && rng.bernoulli(sparsity)) w[x] = 0.0;
  }
  double total = 0.0;
  for (double v : w) total += v;
  for (auto& v : w) v /= total;
  return Dist(support, std::move(w));
}

Dist perturb(Philox& rng, const Dist& q, double sigma) {
  std::vector<double> w(q.probs().begin(), q.probs().end());
  double total = 0.0;
  for (auto& v : w) {
    v *= std::exp(sigma * rng.normal());
    total += v;
  }
  for (auto& v : w) v /= total;
  return Dist(q.support(), std::move(w));
}

SimplexWeights random_weights(Philox& rng, std::size_t k) {
  std::vector<double> w(k);
  for (auto& v : w) v = rng.exponential();
  return SimplexWeights::normalized(std::move(w));
}

Hypothesis random_boolean(Philox& rng, const SupportPtr& support) {
  std::vector<double> v(support->size());
  for (auto& x : v) x = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return Hypothesis(support, std::move(v), 1.0);
}

Hypothesis random_real(Philox& rng, const SupportPtr& support, double range_bound) {
  std::vector<double> v(support->size());
  for (auto& x : v) x = rng.uniform(0.0, range_bound);
  return Hypothesis(support, std::move(v), range_bound);
}

Hypothesis flip_labels(Philox& rng, const Hypothesis& f, double flip) {
  std::vector<double> v(f.values().begin(), f.values().end());
  for (auto& x : v)
    if (rng.bernoulli(flip)) x = f.range_bound() - x;
  return Hypothesis(f.support(), std::move(v), f.range_bound());
}

Hypothesis jitter(Philox& rng, const Hypothesis& f, double noise) {
  const double b = f.range_bound();
  std::vector<double> v(f.values().begin(), f.values().end());
  for (auto& x : v) x = std::clamp(x + rng.uniform(-noise, noise) * b, 0.0, b);
  return Hypothesis(f.support(), std::move(v), b);
}

}  // namespace gen

namespace {

using Trial = std::function<std::vector<BoundReport>(Philox&, std::size_t, std::optional<double>)>;

constexpr std::array<double, 4> kOrders{1.5, 2.0, 3.0, kInf};
constexpr std::array<double, 3> kFiniteOrders{1.5, 2.0, 3.0};
constexpr std::array<double, 3> kRangeBounds{1.0, 0.25, 2.0};

template <std::size_t N>
double rotate(const std::array<double, N>& values, std::size_t t, std::optional<double> fixed) {
  return fixed ? *fixed : values[t % N];
}

/// Labeling with values {0, B}.
Hypothesis scaled_boolean(Philox& rng, const SupportPtr& support, double b) {
  std::vector<double> v(support->size());
  for (auto& x : v) x = rng.bernoulli(0.5) ? b : 0.0;
  return Hypothesis(support, std::move(v), b);
}

LossSpec convex_loss(std::size_t t, double b) {
  return t % 2 == 0 ? LossSpec::absolute(b) : LossSpec::squared(std::sqrt(b));
}

struct SourceSetup {
  std::vector<Dist> sources;
  std::vector<Hypothesis> hyps;
  Hypothesis f;
  LossSpec loss;
};

/// k sources on n points with noisy copies of a {0, B} labeling.
SourceSetup sources_with_hyps(Philox& rng, std::size_t k, std::size_t n, double sparsity, const LossSpec& loss) {
  const auto support = indexed_support(n);
  const double b = loss.value_bound();
  SourceSetup s{{}, {}, scaled_boolean(rng, support, b), loss};
  for (std::size_t i = 0; i < k; ++i) {
    s.sources.push_back(gen::random_dist(rng, support, sparsity));
    const double noise = rng.uniform(0.0, 0.6);
    s.hyps.push_back(gen::jitter(rng, s.f, noise));
  }
  return s;
}

/// Target charged only where some source is.
Dist covered_target(Philox& rng, std::span<const Dist> sources) {
  const Dist base = mixture(sources, gen::random_weights(rng, sources.size()));
  return gen::perturb(rng, base, rng.uniform(0.0, 1.5));
}

std::vector<Dist> approximations(Philox& rng, std::span<const Dist> sources) {
  const double sigma = rng.uniform(0.02, 0.5);
  std::vector<Dist> approx;
  for (const auto& q : sources) approx.push_back(gen::perturb(rng, q, sigma));
  return approx;
}

std::vector<BoundReport> lemma1_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const AlphaOrder alpha = AlphaOrder::from_value(rotate(kOrders, t, a));
  const auto support = indexed_support(gen::between(rng, 2, 50));
  const Dist p = gen::random_dist(rng, support, 0.2);
  const Dist q = gen::random_dist(rng, support, (t / 4) % 10 == 9 ? 0.3 : 0.0);
  const std::size_t which = (t / 4) % 3;
  if (which == 0) {
    const Hypothesis f = gen::random_boolean(rng, support);
    const Hypothesis h = gen::flip_labels(rng, f, rng.uniform(0.0, 0.5));
    const LossSpec loss = LossSpec::zero_one();
    return {lemma1_bound(p, q, h, f, loss, alpha, false), lemma1_bound(p, q, h, f, loss, alpha, true)};
  }
  const double b = kRangeBounds[(t / 12) % 3];
  const LossSpec loss = which == 1 ? LossSpec::absolute(b) : LossSpec::squared(b);
  const Hypothesis f = gen::random_real(rng, support, b);
  const Hypothesis h = gen::jitter(rng, f, rng.uniform(0.0, 1.0));
  return {lemma1_bound(p, q, h, f, loss, alpha, false), lemma1_bound(p, q, h, f, loss, alpha, true)};
}

std::vector<BoundReport> lemma9_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  constexpr std::array<double, 4> rs{2.0, 2.5, 3.0, kInf};
  const double r = rotate(rs, t, a);
  const auto support = indexed_support(gen::between(rng, 2, 50));
  std::vector<Dist> sources;
  const std::size_t k = gen::between(rng, 1, 4);
  for (std::size_t i = 0; i < k; ++i) sources.push_back(gen::random_dist(rng, support, 0.2));
  return {lemma9_verify(covered_target(rng, sources), sources, r)};
}

std::vector<BoundReport> lemma11_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const double alpha = rotate(kFiniteOrders, t, a);
  const auto support = indexed_support(gen::between(rng, 2, 50));
  const std::size_t k = gen::between(rng, 1, 4);
  std::vector<Dist> sources;
  std::vector<Dist> approx;
  for (std::size_t i = 0; i < k; ++i) {
    sources.push_back(gen::random_dist(rng, support, 0.1));
    approx.push_back(t % 3 == 0 ? gen::random_dist(rng, support, t % 30 == 0 ? 0.05 : 0.0)
                                : gen::perturb(rng, sources.back(), rng.uniform(0.0, 1.0)));
  }
  return {lemma11_verify(sources, approx, gen::random_weights(rng, k), alpha)};
}

std::vector<BoundReport> lemma12_trial(Philox& rng, std::size_t t, std::optional<double> a,
                                       Lemma12Form form = Lemma12Form::additive) {
  const double alpha = rotate(kFiniteOrders, t, a);
  const auto support = indexed_support(gen::between(rng, 2, 50));
  const Dist q = gen::random_dist(rng, support);
  const Dist p = t % 2 == 0 ? gen::random_dist(rng, support) : gen::perturb(rng, q, rng.uniform(0.0, 1.5));
  const Dist q_hat = gen::perturb(rng, q, rng.uniform(0.0, 1.0));
  return {lemma12_verify(p, q, q_hat, alpha, form)};
}

std::vector<BoundReport> lemma12_scaled_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  return lemma12_trial(rng, t, a, Lemma12Form::scaled);
}

std::vector<BoundReport> thm2_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const AlphaOrder alpha = AlphaOrder::from_value(rotate(kOrders, t, a));
  const double b = kRangeBounds[(t / 4) % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 1, 4), gen::between(rng, 2, 30), 0.2, convex_loss(t / 12, b));
  return {thm2_verify(covered_target(rng, s.sources), s.sources, s.hyps, s.f, s.loss, alpha)};
}

std::vector<BoundReport> thm5_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const AlphaOrder alpha = AlphaOrder::from_value(rotate(kOrders, t, a));
  const double b = kRangeBounds[(t / 4) % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 1, 3), gen::between(rng, 2, 20), 0.0, convex_loss(t / 12, b));
  const Dist p = covered_target(rng, s.sources);
  return {thm5_verify(p, s.sources, s.hyps, s.f, s.loss, alpha, kDefaultRobustEta, kDefaultRobustDelta)};
}

std::vector<BoundReport> thm8_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  constexpr std::array<double, 5> rs{1.0, 1.5, 2.0, 3.0, kInf};
  const double r = rotate(rs, t, a);
  const double b = kRangeBounds[(t / 5) % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 1, 4), gen::between(rng, 2, 50), 0.2, convex_loss(t / 15, b));
  return {thm8_verify(covered_target(rng, s.sources), s.sources, s.hyps, s.f, s.loss, r)};
}

std::vector<BoundReport> thm10_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  constexpr std::array<double, 4> rs{2.0, 2.5, 3.0, kInf};
  const double r = rotate(rs, t, a);
  const double b = kRangeBounds[(t / 4) % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 1, 4), gen::between(rng, 2, 50), 0.2, convex_loss(t / 12, b));
  const Hypothesis h = gen::jitter(rng, s.f, rng.uniform(0.0, 1.0));
  return {thm10_bound(covered_target(rng, s.sources), s.sources, h, s.f, s.loss, r)};
}

std::vector<BoundReport> thm13_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const double alpha = a.value_or(2.0);
  const double b = kRangeBounds[t % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 2, 3), gen::between(rng, 3, 20), 0.0, LossSpec::absolute(b));
  const auto approx = approximations(rng, s.sources);
  const Dist p = covered_target(rng, s.sources);
  return {thm13_verify(p, s.sources, approx, s.hyps, s.f, s.loss, alpha)};
}

std::vector<SimplexWeights> mixture_draws(Philox& rng, std::size_t k, std::size_t count) {
  std::vector<SimplexWeights> mus;
  for (std::size_t i = 0; i < k; ++i) mus.push_back(SimplexWeights::vertex(k, i));
  while (mus.size() < count) mus.push_back(gen::random_weights(rng, k));
  return mus;
}

std::vector<BoundReport> thm14_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const double alpha = a.value_or(2.0);
  const double b = kRangeBounds[t % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 2, 3), gen::between(rng, 3, 20), 0.0, convex_loss(t / 3, b));
  const auto approx = approximations(rng, s.sources);
  const auto mus = mixture_draws(rng, s.sources.size(), 200);
  return {thm14_verify(s.sources, approx, s.hyps, s.f, s.loss, alpha, kDefaultRobustEta, kDefaultRobustDelta, mus)};
}

std::vector<BoundReport> cor15_trial(Philox& rng, std::size_t t, std::optional<double> a) {
  const double alpha = a.value_or(2.0);
  const double b = kRangeBounds[t % 3];
  auto s = sources_with_hyps(rng, gen::between(rng, 2, 3), gen::between(rng, 3, 20), 0.0, convex_loss(t / 3, b));
  const auto approx = approximations(rng, s.sources);
  const Dist p = covered_target(rng, s.sources);
  return {cor15_verify(p, s.sources, approx, s.hyps, s.f, s.loss, alpha, kDefaultRobustEta, kDefaultRobustDelta)};
}

std::vector<BoundReport> multi_function_trial(Philox& rng, std::size_t t, std::optional<double> a, bool relaxed) {
  const AlphaOrder alpha = AlphaOrder::from_value(rotate(kOrders, t, a));
  const double b = kRangeBounds[(t / 4) % 3];
  const LossSpec loss = relaxed ? LossSpec::squared(b) : LossSpec::absolute(b);
  const auto support = indexed_support(gen::between(rng, 3, 30));
  const std::size_t k = gen::between(rng, 2, 4);
  const Hypothesis f = scaled_boolean(rng, support, loss.value_bound());
  std::vector<Dist> sources;
  std::vector<Hypothesis> source_fs;
  std::vector<Hypothesis> hyps;
  for (std::size_t i = 0; i < k; ++i) {
    sources.push_back(gen::random_dist(rng, support, 0.1));
    source_fs.push_back(gen::flip_labels(rng, f, rng.uniform(0.0, 0.3)));
    hyps.push_back(gen::jitter(rng, source_fs.back(), rng.uniform(0.0, 0.5)));
  }
  const Dist p = covered_target(rng, sources);
  const SimplexWeights lambda = gen::random_weights(rng, k);
  if (relaxed) return {thm17_verify(p, sources, hyps, source_fs, f, loss, lambda, alpha)};
  return {thm16_verify(p, sources, hyps, source_fs, f, loss, lambda, alpha)};
}

struct SuiteEntry {
  const char* name;
  Trial trial;
};

const std::vector<SuiteEntry>& registry() {
  static const std::vector<SuiteEntry> entries{
      {"lemma1", lemma1_trial},
      {"lemma9", lemma9_trial},
      {"lemma11", lemma11_trial},
      {"lemma12", [](Philox& rng, std::size_t t, std::optional<double> a) { return lemma12_trial(rng, t, a); }},
      {"lemma12_scaled", lemma12_scaled_trial},
      {"thm2", thm2_trial},
      {"thm5", thm5_trial},
      {"thm8", thm8_trial},
      {"thm10", thm10_trial},
      {"thm13", thm13_trial},
      {"thm14", thm14_trial},
      {"cor15", cor15_trial},
      {"thm16", [](Philox& rng, std::size_t t, std::optional<double> a) { return multi_function_trial(rng, t, a, false); }},
      {"thm17", [](Philox& rng, std::size_t t, std::optional<double> a) { return multi_function_trial(rng, t, a, true); }},
  };
  return entries;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : registry()) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

SuiteResult run_suite(std::string_view name, const SuiteOptions& options) {
  const auto& entries = registry();
  const auto it = std::find_if(entries.begin(), entries.end(), [&](const SuiteEntry& e) { return name == e.name; });
  if (it == entries.end()) throw InputError("verify: unknown suite '" + std::string(name) + "'");
  if (options.trials == 0) throw InputError("verify: trials must be positive");

  std::vector<std::vector<BoundReport>> per_trial(options.trials);
  parallel_for(
      options.trials,
      [&](std::size_t t) {
        Philox rng(options.seed, t);
        per_trial[t] = it->trial(rng, t, options.alpha);
      },
      options.threads);

  SuiteResult result;
  result.suite = std::string(name);
  result.trials = options.trials;
  for (auto& reports : per_trial) {
    for (auto& r : reports) {
      if (!r.holds) ++result.violations;
      if (r.vacuous) ++result.vacuous;
      result.reports.push_back(std::move(r));
    }
  }
  return result;
}

}  // namespace msa

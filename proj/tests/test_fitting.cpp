#include <doctest.h>

#include <cmath>
#include <vector>

#include "msa/bounds.hpp"
#include "msa/combiners.hpp"
#include "msa/fitting.hpp"
#include "msa/random.hpp"
#include "msa/suites.hpp"
#include "oracle.hpp"

using namespace msa;

namespace {

std::vector<double> vec(const Dist& d) { return {d.probs().begin(), d.probs().end()}; }

struct Instance {
  Dist p;
  std::vector<Dist> qs;
};

Instance random_instance(Philox& rng, std::size_t k) {
  const auto s = indexed_support(gen::between(rng, 2, 12));
  std::vector<Dist> qs;
  for (std::size_t i = 0; i < k; ++i) qs.push_back(gen::random_dist(rng, s));
  return {gen::random_dist(rng, s), qs};
}

}  // namespace

TEST_CASE("fit_mixture beats the dense grid at every order") {
  Philox rng(4, 0);
  for (int t = 0; t < 60; ++t) {
    const std::size_t k = 2 + t % 2;
    const auto inst = random_instance(rng, k);
    std::vector<std::vector<double>> qv;
    for (const auto& q : inst.qs) qv.push_back(vec(q));
    for (double a : {1.0, 2.0, 3.0, kInf}) {
      const auto fit = fit_mixture(inst.p, inst.qs, AlphaOrder::from_value(a));
      CHECK(fit.converged);
      const double grid = oracle::simplex_grid_min(
          k, 0.02, [&](const std::vector<double>& w) { return oracle::renyi_bits(vec(inst.p), oracle::mix(qv, w), a); });
      CHECK(fit.objective_bits <= grid + 1e-6);
      CHECK(fit.objective_bits == doctest::Approx(mixture_divergence_bits(inst.p, inst.qs, fit.weights,
                                                                           AlphaOrder::from_value(a))));
      CHECK(fit.gap_bits <= 1e-9 + 1e-12);
    }
  }
}

TEST_CASE("symmetric instance") {
  const auto s = indexed_support(2);
  const std::vector<Dist> qs{Dist(s, {0.9, 0.1}), Dist(s, {0.1, 0.9})};
  const Dist p(s, {0.5, 0.5});
  for (double a : {1.0, 2.0, kInf}) {
    const auto fit = fit_mixture(p, qs, AlphaOrder::from_value(a));
    CHECK(std::abs(fit.weights[0] - 0.5) <= 1e-6);
    CHECK(fit.objective_bits <= 1e-9);
  }
}

TEST_CASE("target inside the hull is fit exactly") {
  Philox rng(12, 0);
  for (int t = 0; t < 30; ++t) {
    const auto inst = random_instance(rng, 3);
    const auto w = gen::random_weights(rng, 3);
    const Dist p = mixture(inst.qs, w);
    const auto fit = fit_mixture(p, inst.qs, AlphaOrder::finite(2.0));
    CHECK(fit.objective_bits <= 1e-8);
  }
}

TEST_CASE("single source and invalid inputs") {
  const auto s = indexed_support(3);
  const Dist p(s, {0.2, 0.3, 0.5});
  const std::vector<Dist> one{Dist(s, {0.5, 0.25, 0.25})};
  const auto fit = fit_mixture(p, one, AlphaOrder::finite(2.0));
  CHECK(fit.weights[0] == 1.0);
  CHECK(fit.objective_bits == doctest::Approx(oracle::renyi_bits(vec(p), vec(one[0]), 2.0)));
  const std::vector<Dist> uncovered{Dist(s, {0.5, 0.5, 0.0}), Dist(s, {1.0, 0.0, 0.0})};
  CHECK_THROWS_AS(fit_mixture(p, uncovered, AlphaOrder::finite(2.0)), InputError);
  CHECK_THROWS_AS(fit_mixture(p, uncovered, AlphaOrder::infinity()), InputError);
  CHECK_THROWS_AS(fit_mixture(p, one, AlphaOrder::finite(0.5)), InputError);
  CHECK_THROWS_AS(fit_mixture(p, one, AlphaOrder::finite(2.0), 0.0), InputError);
  CHECK_THROWS_AS(fit_mixture(p, {}, AlphaOrder::finite(2.0)), InputError);
}

TEST_CASE("zero-mass target points are ignored by the infinite order") {
  const auto s = indexed_support(3);
  const Dist p(s, {0.5, 0.5, 0.0});
  const std::vector<Dist> qs{Dist(s, {0.5, 0.0, 0.5}), Dist(s, {0.0, 0.5, 0.5})};
  const auto fit = fit_mixture(p, qs, AlphaOrder::infinity());
  CHECK(fit.weights[0] == doctest::Approx(0.5));
  CHECK(fit.objective_bits == doctest::Approx(1.0));
}

TEST_CASE("robust_fit reaches the grid minimax value") {
  Philox rng(31, 0);
  for (int t = 0; t < 40; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 12));
    const Hypothesis f = gen::random_boolean(rng, s);
    std::vector<Dist> qs;
    std::vector<Hypothesis> hs;
    for (int i = 0; i < 2; ++i) {
      qs.push_back(gen::random_dist(rng, s));
      hs.push_back(gen::jitter(rng, f, rng.uniform(0.0, 0.8)));
    }
    const LossSpec loss = t % 2 == 0 ? LossSpec::absolute() : LossSpec::squared();
    const auto r = robust_fit(qs, hs, f, loss);
    const double grid = oracle::simplex_grid_min(2, 0.01, [&](const std::vector<double>& w) {
      return smoothed_worst_loss(qs, hs, f, loss, SimplexWeights(w), kDefaultRobustEta);
    });
    CHECK(r.worst_source_loss <= grid + 1e-3);
    CHECK(r.worst_source_loss ==
          doctest::Approx(smoothed_worst_loss(qs, hs, f, loss, r.weights, r.eta)).epsilon(1e-12));
    CHECK(r.delta == doctest::Approx(r.worst_source_loss - r.eps));
    // the guarantee extends to every mixture of the sources
    const auto h = combine_smoothed(qs, hs, r.weights, r.eta);
    for (int m = 0; m < 20; ++m)
      CHECK(expected_loss(mixture(qs, gen::random_weights(rng, 2)), h, f, loss) <= r.worst_source_loss + 1e-12);
  }
}

TEST_CASE("robust_fit validation") {
  const auto s = indexed_support(2);
  const Hypothesis f(s, {0.0, 1.0});
  const std::vector<Dist> qs{Dist(s, {0.5, 0.5})};
  const std::vector<Hypothesis> hs{f};
  CHECK_THROWS_AS(robust_fit(qs, hs, f, LossSpec::zero_one()), InputError);
  CHECK_THROWS_AS(robust_fit(qs, hs, f, LossSpec::absolute(), 0.0), InputError);
  CHECK_THROWS_AS(robust_fit(qs, hs, f, LossSpec::absolute(), 1.0), InputError);
  CHECK_THROWS_AS(robust_fit(qs, hs, f, LossSpec::absolute(), 0.1, -1.0), InputError);
  CHECK_THROWS_AS(robust_fit(qs, std::vector<Hypothesis>{}, f, LossSpec::absolute()), InputError);
  const auto r = robust_fit(qs, hs, f, LossSpec::absolute());
  CHECK(r.worst_source_loss == 0.0);
  CHECK(r.reached_target);
}

TEST_CASE("adversarial target closed form") {
  const auto s = indexed_support(10);
  std::vector<double> q(10, 0.1);
  const Dist qd(s, q);
  std::vector<double> fv(10, 0.0), hv(10, 0.0);
  hv[0] = 1.0;  // error mass 0.1
  const Hypothesis f(s, fv), h(s, hv);
  const auto adv = adversarial_target(qd, h, f, 2.0, 1.0);
  CHECK(adv.eps == doctest::Approx(0.1));
  CHECK(adv.r_factor == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(std::abs(adv.realized_loss - std::sqrt(0.1)) <= 1e-12);
  CHECK(adv.realized_divergence_bits <= 1.0 + 1e-12);
  CHECK(adv.realized_divergence_bits ==
        doctest::Approx(oracle::renyi_bits(vec(adv.p), q, 2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(adversarial_target(qd, h, f, 1.0, 1.0), InputError);
  CHECK_THROWS_AS(adversarial_target(qd, f, f, 2.0, 1.0), InputError);
  CHECK_THROWS_AS(adversarial_target(qd, h, f, 2.0, 50.0), InputError);
}

TEST_CASE("adversarial target is nearly tight against the single-source bound") {
  Philox rng(8, 0);
  int checked = 0;
  for (int t = 0; t < 100; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 30));
    const Dist q = gen::random_dist(rng, s);
    const Hypothesis f = gen::random_boolean(rng, s);
    const Hypothesis h = gen::flip_labels(rng, f, rng.uniform(0.05, 0.5));
    const double eps = expected_loss(q, h, f, LossSpec::zero_one());
    if (eps <= 0.0 || eps >= 1.0) continue;
    const double alpha = 1.5 + t % 3;
    const double delta = rng.uniform(0.01, 1.0);
    // needs 1 <= r <= 1/eps
    const double r = std::pow((std::exp2((alpha - 1.0) * delta) - 1.0) / eps, 1.0 / alpha);
    if (r < 1.0 || r * eps > 1.0) continue;
    const auto adv = adversarial_target(q, h, f, alpha, delta);
    const auto bound = lemma1_bound(adv.p, q, h, f, LossSpec::zero_one(), AlphaOrder::finite(alpha));
    CHECK(adv.realized_loss == doctest::Approx(adv.predicted_loss).epsilon(1e-9));
    CHECK(adv.realized_loss <= bound.bound_value + 1e-9);
    CHECK(adv.realized_divergence_bits <= delta + 1e-9);
    ++checked;
  }
  CHECK(checked > 20);
}

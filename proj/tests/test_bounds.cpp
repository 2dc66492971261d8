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

Dist two(double a) { return Dist(indexed_support(2), {a, 1.0 - a}); }

}  // namespace

TEST_CASE("report bookkeeping") {
  const auto r = BoundReport::make(TheoremId::thm2, 0.5, 0.5 + 5e-10, "x");
  CHECK(r.holds);
  CHECK_FALSE(r.vacuous);
  CHECK_FALSE(BoundReport::make(TheoremId::thm2, 0.5, 0.6, "x").holds);
  const auto v = BoundReport::make(TheoremId::thm2, kInf, 3.0, "x");
  CHECK(v.holds);
  CHECK(v.vacuous);
  CHECK(std::isinf(v.margin));
  CHECK(r.with_measured(0.1).margin == doctest::Approx(0.4));
  CHECK(parse_theorem_id("lemma1_tight") == TheoremId::lemma1_tight);
  CHECK(to_string(TheoremId::cor15) == "cor15");
  CHECK_THROWS_AS(parse_theorem_id("thm99"), InputError);
}

TEST_CASE("input digest") {
  InputDigest a, b, c;
  a.add(1.0).add("x");
  b.add(1.0).add("x");
  c.add(1.0).add("y");
  CHECK(a.hex() == b.hex());
  CHECK(a.hex() != c.hex());
  CHECK(a.hex().size() == 16);
  CHECK(InputDigest().hex() == "cbf29ce484222325");
}

TEST_CASE("single-source bound on a closed-form pair") {
  const Dist p = two(0.5), q = two(0.25);
  const auto s = p.support();
  const Hypothesis f(s, {0.0, 0.0}), h(s, {1.0, 0.0});
  const auto r2 = lemma1_bound(p, q, h, f, LossSpec::zero_one(), AlphaOrder::finite(2.0));
  CHECK(r2.bound_value == doctest::Approx(std::sqrt(4.0 / 3.0 * 0.25)));
  CHECK(r2.measured_value == 0.5);
  CHECK(r2.holds);
  const auto rinf = lemma1_bound(p, q, h, f, LossSpec::zero_one(), AlphaOrder::infinity());
  CHECK(rinf.bound_value == doctest::Approx(0.5));
  CHECK(rinf.holds);
  CHECK_THROWS_AS(lemma1_bound(p, q, h, f, LossSpec::zero_one(), AlphaOrder::finite(0.5)), InputError);
  const Dist q0(s, {0.0, 1.0});
  const auto vac = lemma1_bound(p, q0, h, f, LossSpec::zero_one(), AlphaOrder::finite(2.0));
  CHECK(vac.vacuous);
  CHECK(vac.holds);
}

TEST_CASE("tight form never exceeds the loose form") {
  Philox rng(3, 0);
  for (int t = 0; t < 300; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 30));
    const Dist p = gen::random_dist(rng, s), q = gen::random_dist(rng, s);
    const double b = t % 3 == 0 ? 0.25 : 1.0;
    const Hypothesis f = gen::random_real(rng, s, b);
    const Hypothesis h = gen::jitter(rng, f, rng.uniform(0.0, 1.0));
    const auto loss = t % 2 == 0 ? LossSpec::absolute(b) : LossSpec::squared(b);
    const auto alpha = AlphaOrder::from_value(t % 4 == 3 ? kInf : 1.5 + t % 3);
    const auto loose = lemma1_bound(p, q, h, f, loss, alpha, false);
    const auto tight = lemma1_bound(p, q, h, f, loss, alpha, true);
    CHECK(tight.bound_value <= loose.bound_value * (1.0 + 1e-12));
    CHECK(tight.holds);
  }
}

TEST_CASE("mixture bound calculator") {
  const auto s = indexed_support(3);
  const std::vector<Dist> qs{Dist(s, {0.7, 0.2, 0.1}), Dist(s, {0.1, 0.3, 0.6})};
  const Dist p(s, {0.3, 0.3, 0.4});
  double prev = 0.0;
  for (double eps : {0.0, 0.01, 0.1, 0.3}) {
    const double b = thm2_bound(p, qs, eps, 1.0, AlphaOrder::finite(2.0)).bound_value;
    CHECK(b >= prev);
    prev = b;
  }
  const auto fit = fit_mixture(p, qs, AlphaOrder::finite(2.0));
  CHECK(thm2_bound(p, qs, 0.1, 1.0, AlphaOrder::finite(2.0)).bound_value ==
        doctest::Approx(std::sqrt(std::exp2(fit.objective_bits) * 0.1)));
  const double at_inf = thm2_bound(p, qs, 0.1, 1.0, AlphaOrder::infinity()).bound_value;
  const double at_big = thm2_bound(p, qs, 0.1, 1.0, AlphaOrder::finite(1e4)).bound_value;
  CHECK(std::abs(at_big - at_inf) <= 1e-3 * at_inf);
  CHECK(thm5_bound(p, qs, 0.1, 0.05, 1.0, AlphaOrder::finite(2.0)).bound_value ==
        doctest::Approx(thm2_bound(p, qs, 0.15, 1.0, AlphaOrder::finite(2.0)).bound_value));
  const auto with_measured = thm2_bound(p, qs, 0.1, 1.0, AlphaOrder::finite(2.0), 0.05);
  CHECK(with_measured.measured_value == 0.05);
  CHECK_THROWS_AS(thm2_bound(p, qs, -0.1, 1.0, AlphaOrder::finite(2.0)), InputError);
}

TEST_CASE("mixture bound is nondecreasing in the divergence") {
  const auto s = indexed_support(2);
  const Dist p(s, {0.5, 0.5});
  double prev = 0.0;
  for (double a : {0.5, 0.4, 0.3, 0.2, 0.1}) {
    const std::vector<Dist> qs{Dist(s, {a, 1.0 - a})};
    const double b = thm2_bound(p, qs, 0.1, 1.0, AlphaOrder::finite(2.0)).bound_value;
    CHECK(b >= prev);
    prev = b;
  }
}

TEST_CASE("norm-bounded certificate") {
  const auto s = indexed_support(2);
  const std::vector<Dist> qs{Dist(s, {1.0, 0.0}), Dist(s, {0.0, 1.0})};
  const auto c = check_norm_bounded(two(0.5), qs, 1.0);
  CHECK(c.rho == doctest::Approx(0.5));
  CHECK(c.holds);
  CHECK_FALSE(check_norm_bounded(two(0.5), qs, 1.0, 0.4).holds);
  const std::vector<Dist> one{Dist(s, {1.0, 0.0})};
  const auto inf = check_norm_bounded(two(0.5), one, 2.0);
  CHECK(std::isinf(inf.rho));
  CHECK(inf.worst_point == "x1");
}

TEST_CASE("order restrictions") {
  const auto s = indexed_support(2);
  const std::vector<Dist> qs{two(0.3), two(0.6)};
  const Hypothesis f(s, {0.0, 1.0});
  CHECK_THROWS_AS(lemma9_verify(two(0.5), qs, 1.5), InputError);
  CHECK_THROWS_AS(thm10_bound(two(0.5), qs, f, f, LossSpec::absolute(), 1.5), InputError);
  CHECK(lemma9_verify(two(0.5), qs, kInf).holds);
  const std::vector<Hypothesis> hs{f, f};
  CHECK_THROWS_AS(thm8_verify(two(0.5), qs, hs, f, LossSpec::absolute(), 0.5), InputError);
  CHECK(thm8_verify(two(0.5), qs, hs, f, LossSpec::absolute(), kInf).measured_value == 0.0);
}

TEST_CASE("approximation lemma at a vertex is the single-source divergence") {
  const std::vector<Dist> qs{two(0.3), two(0.6)}, approx{two(0.35), two(0.5)};
  const auto r = lemma11_verify(qs, approx, SimplexWeights::vertex(2, 1), 2.0);
  CHECK(r.measured_value == doctest::Approx(oracle::renyi_bits({0.6, 0.4}, {0.5, 0.5}, 2.0)));
  CHECK(r.holds);
}

TEST_CASE("additive triangle-type bound has a counterexample; the scaled form holds") {
  const Dist p = two(0.95), q = two(0.2), q_hat = two(0.05);
  const auto additive = lemma12_verify(p, q, q_hat, 1.5);
  CHECK(additive.measured_value == doctest::Approx(oracle::renyi_bits({0.95, 0.05}, {0.05, 0.95}, 1.5)));
  CHECK(additive.bound_value == doctest::Approx(oracle::renyi_bits({0.95, 0.05}, {0.2, 0.8}, 3.0) +
                                               oracle::renyi_bits({0.2, 0.8}, {0.05, 0.95}, 2.0)));
  CHECK_FALSE(additive.holds);
  const auto scaled = lemma12_verify(p, q, q_hat, 1.5, Lemma12Form::scaled);
  CHECK(scaled.bound_value == doctest::Approx(2.0 * oracle::renyi_bits({0.95, 0.05}, {0.2, 0.8}, 3.0) +
                                             oracle::renyi_bits({0.2, 0.8}, {0.05, 0.95}, 2.0)));
  CHECK(scaled.holds);
  CHECK(additive.inputs_digest != scaled.inputs_digest);
}

TEST_CASE("scaled triangle-type bound on random instances") {
  Philox rng(123, 0);
  for (int t = 0; t < 500; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 20));
    const Dist p = gen::random_dist(rng, s), q = gen::random_dist(rng, s), qh = gen::random_dist(rng, s);
    CHECK(lemma12_verify(p, q, qh, 1.5 + (t % 3) * 0.75, Lemma12Form::scaled).holds);
  }
}

TEST_CASE("flat approximate-source bound fails for small loss scale") {
  const auto s = indexed_support(2);
  const Dist p = two(0.5);
  const std::vector<Dist> qs{p}, approx{p};
  const Hypothesis f(s, {0.0, 0.0}, 0.01), h(s, {0.01, 0.0}, 0.01);
  const std::vector<Hypothesis> hs{h};
  const auto loss = LossSpec::absolute(0.01);
  const auto flat = thm13_verify(p, qs, approx, hs, f, loss, 2.0, Thm13Form::flat);
  CHECK(flat.measured_value == doctest::Approx(0.005));
  CHECK(flat.bound_value == doctest::Approx(std::sqrt(0.005) * std::pow(0.01, 0.75)));
  CHECK_FALSE(flat.holds);
  const auto composed = thm13_verify(p, qs, approx, hs, f, loss, 2.0);
  CHECK(composed.bound_value == doctest::Approx(std::pow(0.005, 0.25) * std::pow(0.01, 0.75)));
  CHECK(composed.holds);
}

TEST_CASE("distinct labelings: zero error and zero drift give a zero bound") {
  const auto s = indexed_support(3);
  const std::vector<Dist> qs{Dist(s, {0.5, 0.5, 0.0}), Dist(s, {0.0, 0.5, 0.5})};
  const Hypothesis f(s, {0.0, 1.0, 0.5});
  const std::vector<Hypothesis> hs{f, f}, fs{f, f};
  const Dist p(s, {0.2, 0.5, 0.3});
  const auto r = thm16_verify(p, qs, hs, fs, f, LossSpec::absolute(), SimplexWeights::uniform(2), AlphaOrder::finite(2.0));
  CHECK(r.bound_value == doctest::Approx(0.0));
  CHECK(r.measured_value == doctest::Approx(0.0));
}

TEST_CASE("relaxed-triangle variant coincides for the absolute loss") {
  Philox rng(55, 0);
  for (int t = 0; t < 50; ++t) {
    const auto s = indexed_support(gen::between(rng, 3, 15));
    const Hypothesis f = gen::random_boolean(rng, s);
    std::vector<Dist> qs;
    std::vector<Hypothesis> hs, fs;
    for (int i = 0; i < 2; ++i) {
      qs.push_back(gen::random_dist(rng, s));
      fs.push_back(gen::flip_labels(rng, f, 0.1));
      hs.push_back(gen::jitter(rng, fs.back(), 0.3));
    }
    const Dist p = mixture(qs, gen::random_weights(rng, 2));
    const auto lambda = gen::random_weights(rng, 2);
    const auto a = thm16_verify(p, qs, hs, fs, f, LossSpec::absolute(), lambda, AlphaOrder::finite(2.0));
    const auto b = thm17_verify(p, qs, hs, fs, f, LossSpec::absolute(), lambda, AlphaOrder::finite(2.0));
    CHECK(a.bound_value == doctest::Approx(b.bound_value));
    CHECK(a.holds);
    const auto sq = thm17_verify(p, qs, hs, fs, f, LossSpec::squared(), lambda, AlphaOrder::finite(2.0));
    CHECK(sq.holds);
  }
  const auto s = indexed_support(2);
  const Hypothesis f(s, {0.0, 1.0});
  const std::vector<Dist> qs{two(0.5)};
  const std::vector<Hypothesis> hs{f};
  CHECK_THROWS_AS(thm16_verify(two(0.5), qs, hs, hs, f, LossSpec::squared(), SimplexWeights::uniform(1),
                               AlphaOrder::finite(2.0)),
                  InputError);
}

TEST_CASE("an explicit mixture target is covered by its own weights") {
  Philox rng(2, 0);
  for (int t = 0; t < 200; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 30));
    const std::size_t k = gen::between(rng, 2, 4);
    const Hypothesis f = gen::random_boolean(rng, s);
    std::vector<Dist> qs;
    std::vector<Hypothesis> hs;
    for (std::size_t i = 0; i < k; ++i) {
      qs.push_back(gen::random_dist(rng, s, 0.2));
      hs.push_back(gen::jitter(rng, f, rng.uniform(0.0, 0.7)));
    }
    const auto mu = gen::random_weights(rng, k);
    const auto loss = LossSpec::absolute();
    double eps = 0.0;
    for (std::size_t i = 0; i < k; ++i) eps = std::max(eps, expected_loss(qs[i], hs[i], f, loss));
    const auto h = combine_distribution_weighted(qs, hs, mu);
    CHECK(expected_loss(mixture(qs, mu), h, f, loss) <= eps + 1e-9);
  }
}

TEST_CASE("suites are deterministic across thread counts") {
  for (const char* name : {"lemma1", "thm2", "thm16"}) {
    SuiteOptions a{60, 9, std::nullopt, 1}, b{60, 9, std::nullopt, 4};
    const auto ra = run_suite(name, a), rb = run_suite(name, b);
    REQUIRE(ra.reports.size() == rb.reports.size());
    for (std::size_t i = 0; i < ra.reports.size(); ++i) {
      CHECK(ra.reports[i].inputs_digest == rb.reports[i].inputs_digest);
      CHECK(ra.reports[i].bound_value == rb.reports[i].bound_value);
    }
    CHECK(ra.violations == 0);
  }
  CHECK_THROWS_AS(run_suite("nope", SuiteOptions{}), InputError);
}

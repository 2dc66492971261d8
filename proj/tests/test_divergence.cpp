#include <doctest.h>

#include <cmath>
#include <vector>

#include "msa/divergence.hpp"
#include "msa/random.hpp"
#include "msa/suites.hpp"
#include "oracle.hpp"

using namespace msa;

namespace {

std::vector<double> vec(const Dist& d) { return {d.probs().begin(), d.probs().end()}; }

Dist pair_dist(double a) { return Dist(indexed_support(2), {a, 1.0 - a}); }

}  // namespace

TEST_CASE("closed-form pair") {
  const Dist p = pair_dist(0.5), q = pair_dist(0.25);
  CHECK(renyi_divergence(p, q, AlphaOrder::infinity()).bits == 1.0);
  CHECK(std::abs(renyi_divergence(p, q, AlphaOrder::finite(2.0)).bits - std::log2(4.0 / 3.0)) <= 1e-12);
  CHECK(d_alpha(p, q, AlphaOrder::finite(2.0)) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  const double kl = 0.5 * std::log2(2.0) + 0.5 * std::log2(0.5 / 0.75);
  CHECK(renyi_divergence(p, q, AlphaOrder::one()).bits == doctest::Approx(kl).epsilon(1e-12));
}

TEST_CASE("matches the long-double oracle across orders") {
  Philox rng(2024, 1);
  for (int t = 0; t < 200; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 30));
    const Dist p = gen::random_dist(rng, s, t % 3 == 0 ? 0.3 : 0.0);
    const Dist q = gen::random_dist(rng, s);
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0, 7.5, kInf}) {
      const double got = renyi_divergence(p, q, AlphaOrder::from_value(a)).bits;
      const double want = oracle::renyi_bits(vec(p), vec(q), a);
      CHECK(got == doctest::Approx(want).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("order near one approaches KL") {
  Philox rng(5, 0);
  for (int t = 0; t < 100; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 20));
    const Dist p = gen::random_dist(rng, s), q = gen::random_dist(rng, s);
    const double kl = renyi_divergence(p, q, AlphaOrder::one()).bits;
    CHECK(std::abs(renyi_divergence(p, q, AlphaOrder::finite(1.0001)).bits - kl) <= 1e-3);
    CHECK(std::abs(renyi_divergence(p, q, AlphaOrder::finite(0.9999)).bits - kl) <= 1e-3);
  }
}

TEST_CASE("large finite order approaches the infinite order") {
  const Dist p(indexed_support(3), {0.2, 0.5, 0.3}), q(indexed_support(3), {0.4, 0.1, 0.5});
  const double inf = renyi_divergence(p, q, AlphaOrder::infinity()).bits;
  CHECK(renyi_divergence(p, q, AlphaOrder::finite(1e4)).bits == doctest::Approx(inf).epsilon(1e-3));
}

TEST_CASE("divergence is nondecreasing in the order and zero on equal arguments") {
  Philox rng(17, 0);
  for (int t = 0; t < 100; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 25));
    const Dist p = gen::random_dist(rng, s), q = gen::random_dist(rng, s);
    double prev = -1.0;
    for (double a : {0.25, 0.5, 1.0, 1.5, 2.0, 4.0, kInf}) {
      const double d = renyi_divergence(p, q, AlphaOrder::from_value(a)).bits;
      CHECK(d >= prev - 1e-12);
      prev = d;
    }
    CHECK(std::abs(renyi_divergence(p, p, AlphaOrder::finite(2.0)).bits) <= 1e-12);
  }
}

TEST_CASE("infinite divergence when P charges a point Q does not") {
  const Dist p = pair_dist(0.5), q(indexed_support(2), {1.0, 0.0});
  for (double a : {1.0, 2.0, kInf}) {
    const auto d = renyi_divergence(p, q, AlphaOrder::from_value(a));
    CHECK(d.is_infinite);
    CHECK(std::isinf(d.exp2()));
  }
  CHECK(std::isfinite(renyi_divergence(p, q, AlphaOrder::finite(0.5)).bits));
  CHECK_THROWS_AS(renyi_divergence(p, q, AlphaOrder::zero()), InputError);
}

TEST_CASE("entropy values and monotonicity") {
  const Dist u(indexed_support(8), std::vector<double>(8, 0.125));
  for (double a : {0.0, 0.5, 1.0, 2.0, kInf})
    CHECK(renyi_entropy(u, AlphaOrder::from_value(a)) == doctest::Approx(3.0).epsilon(1e-12));
  const Dist p(indexed_support(4), {0.5, 0.25, 0.25, 0.0});
  CHECK(renyi_entropy(p, AlphaOrder::zero()) == doctest::Approx(std::log2(3.0)));
  CHECK(renyi_entropy(p, AlphaOrder::infinity()) == doctest::Approx(1.0));
  CHECK(renyi_entropy(p, AlphaOrder::one()) == doctest::Approx(1.5));
  Philox rng(9, 3);
  for (int t = 0; t < 50; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 20));
    Dist q = gen::random_dist(rng, s);
    double prev = kInf;
    for (double a : {0.0, 0.3, 0.9, 1.0, 1.1, 2.0, 5.0, kInf}) {
      const double h = renyi_entropy(q, AlphaOrder::from_value(a));
      CHECK(h < prev);
      if (a != 0.0 && a != kInf) CHECK(h == doctest::Approx(oracle::renyi_entropy_bits(vec(q), a)).epsilon(1e-10));
      prev = h;
    }
  }
}

TEST_CASE("order parsing and validation") {
  CHECK(AlphaOrder::parse("inf").is_infinite());
  CHECK(AlphaOrder::parse("infinity").is_infinite());
  CHECK(AlphaOrder::parse("1").kind() == AlphaOrder::Kind::one);
  CHECK(AlphaOrder::parse("zero").kind() == AlphaOrder::Kind::zero);
  CHECK(AlphaOrder::parse("2.5").value() == 2.5);
  CHECK_THROWS_AS(AlphaOrder::parse("abc"), InputError);
  CHECK_THROWS_AS(AlphaOrder::parse("-1"), InputError);
  CHECK_THROWS_AS(AlphaOrder::finite(1.0), InputError);
  CHECK(AlphaOrder::finite(2.0).holder_exponent() == 0.5);
  CHECK(AlphaOrder::infinity().holder_exponent() == 1.0);
  CHECK(AlphaOrder::finite(2.0).above_one());
  CHECK_FALSE(AlphaOrder::finite(0.5).above_one());
}

TEST_CASE("mismatched supports are rejected") {
  CHECK_THROWS_AS(renyi_divergence(pair_dist(0.5), Dist(make_support({"a", "b"}), {0.5, 0.5}), AlphaOrder::one()),
                  InputError);
}

TEST_CASE("log_sum_exp") {
  const std::vector<double> t{1000.0, 1000.0};
  CHECK(log_sum_exp(t) == doctest::Approx(1000.0 + std::log(2.0)));
  CHECK(std::isinf(log_sum_exp(std::vector<double>{})));
}

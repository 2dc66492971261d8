#include <doctest.h>

#include <algorithm>
#include <vector>

#include "msa/combiners.hpp"
#include "msa/random.hpp"
#include "msa/suites.hpp"

using namespace msa;

namespace {

struct Setup {
  SupportPtr s = indexed_support(3);
  std::vector<Dist> qs{Dist(s, {0.6, 0.4, 0.0}), Dist(s, {0.2, 0.2, 0.6})};
  std::vector<Hypothesis> hs{Hypothesis(s, {1.0, 0.0, 0.5}), Hypothesis(s, {0.0, 1.0, 0.25})};
};

}  // namespace

TEST_CASE("distribution-weighted rule by hand") {
  Setup u;
  const auto h = combine_distribution_weighted(u.qs, u.hs, SimplexWeights({0.5, 0.5}));
  CHECK(h[0] == doctest::Approx(0.3 / 0.4));
  CHECK(h[1] == doctest::Approx(0.1 / 0.3));
  CHECK(h[2] == doctest::Approx(0.25));
  const auto v = combine_distribution_weighted(u.qs, u.hs, SimplexWeights::vertex(2, 0));
  CHECK(v[0] == 1.0);
  CHECK(v[2] == 0.0);  // no mass under the chosen weights
}

TEST_CASE("smoothed rule with eta = 0 is the distribution-weighted rule") {
  Setup u;
  const SimplexWeights lambda({0.3, 0.7});
  const auto a = combine_distribution_weighted(u.qs, u.hs, lambda);
  const auto b = combine_smoothed(u.qs, u.hs, lambda, 0.0);
  for (std::size_t x = 0; x < 3; ++x) CHECK(a[x] == doctest::Approx(b[x]));
  const auto c = combine_smoothed(u.qs, u.hs, SimplexWeights::vertex(2, 0), 0.5);
  // (eta/k) U adds 1/12 to each source weight at every point.
  CHECK(c[2] == doctest::Approx((0.5 * 0.0 + (1.0 / 12) * 0.5 + (1.0 / 12) * 0.25) / (1.0 / 6)));
}

TEST_CASE("r-norm rule limits") {
  Setup u;
  const auto r1 = combine_r_norm(u.qs, u.hs, 1.0);
  const auto dw = combine_distribution_weighted(u.qs, u.hs, SimplexWeights::uniform(2));
  for (std::size_t x = 0; x < 3; ++x) CHECK(r1[x] == doctest::Approx(dw[x]));
  const auto rinf = combine_r_norm(u.qs, u.hs, kInf);
  CHECK(rinf[0] == 1.0);
  CHECK(rinf[2] == 0.25);
  const auto s = indexed_support(1);
  const std::vector<Dist> tie{Dist(s, {1.0}), Dist(s, {1.0})};
  const std::vector<Hypothesis> th{Hypothesis(s, {0.2}), Hypothesis(s, {0.9})};
  CHECK(combine_r_norm(tie, th, kInf)[0] == 0.2);
  const auto r2 = combine_r_norm(u.qs, u.hs, 2.0);
  CHECK(r2[0] == doctest::Approx(0.36 / 0.40));
}

TEST_CASE("combined values stay within the pointwise hull of the hypotheses") {
  Philox rng(77, 0);
  for (int t = 0; t < 100; ++t) {
    const auto s = indexed_support(gen::between(rng, 2, 20));
    const std::size_t k = gen::between(rng, 1, 4);
    std::vector<Dist> qs;
    std::vector<Hypothesis> hs;
    for (std::size_t i = 0; i < k; ++i) {
      qs.push_back(gen::random_dist(rng, s, 0.2));
      hs.push_back(gen::random_real(rng, s));
    }
    const auto lambda = gen::random_weights(rng, k);
    const std::vector<Hypothesis> out{combine_smoothed(qs, hs, lambda, 0.1), combine_r_norm(qs, hs, 3.0),
                                      combine_r_norm(qs, hs, kInf)};
    for (const auto& h : out)
      for (std::size_t x = 0; x < s->size(); ++x) {
        double mass = 0.0;
        for (const auto& q : qs) mass += q[x];
        if (mass == 0.0 && &h != &out[0]) {
          CHECK(h[x] == 0.0);
          continue;
        }
        double lo = 1.0, hi = 0.0;
        for (const auto& hi_ : hs) {
          lo = std::min(lo, hi_[x]);
          hi = std::max(hi, hi_[x]);
        }
        CHECK(h[x] >= lo - 1e-12);
        CHECK(h[x] <= hi + 1e-12);
      }
  }
}

TEST_CASE("parameter validation") {
  Setup u;
  CombinerParams params;
  CHECK_THROWS_AS(combine(u.qs, u.hs, params), InputError);
  params.weights = SimplexWeights::uniform(3);
  CHECK_THROWS_AS(combine(u.qs, u.hs, params), InputError);
  params.weights = SimplexWeights::uniform(2);
  params.eta = 0.2;
  CHECK_THROWS_AS(combine(u.qs, u.hs, params), InputError);
  params.rule = SmoothedRule{};
  CHECK_NOTHROW(combine(u.qs, u.hs, params));
  params.eta = 1.0;
  CHECK_THROWS_AS(combine(u.qs, u.hs, params), InputError);
  params = CombinerParams{RNormRule{0.5}, std::nullopt, 0.0};
  CHECK_THROWS_AS(combine(u.qs, u.hs, params), InputError);
  const std::vector<Hypothesis> one{u.hs[0]};
  CHECK_THROWS_AS(combine_r_norm(u.qs, one, 2.0), InputError);
  CHECK_THROWS_AS(combine_r_norm({}, {}, 2.0), InputError);
}

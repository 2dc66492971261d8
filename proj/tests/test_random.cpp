#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "msa/parallel.hpp"
#include "msa/random.hpp"

using msa::Philox;

TEST_CASE("philox known-answer vectors") {
  using B = Philox::Block;
  CHECK(Philox::round10(B{0, 0, 0, 0}, {0, 0}) == B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox::round10(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox::round10(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  for (int i = 0; i < 16; ++i) {
    const auto x = a();
    CHECK(x == b());
    (void)c;
  }
  Philox a2(42, 3);
  CHECK(a2() == Philox::round10({0, 0, 3, 0}, {42, 0})[0]);
  CHECK(Philox(42, 3)() != c());
  CHECK(Philox(42, 3)() != d());
}

TEST_CASE("variates have the right moments") {
  Philox rng(1, 0);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0, se = 0.0;
  int below = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK_FALSE((u < 0.0 || u >= 1.0));
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential();
    if (rng.below(10) < 3) ++below;
  }
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(se / n == doctest::Approx(1.0).epsilon(0.02));
  CHECK(static_cast<double>(below) / n == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("parallel_for fills every slot once") {
  std::vector<int> out(1000, 0);
  msa::parallel_for(out.size(), [&](std::size_t i) { out[i] += static_cast<int>(i); }, 4);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i));
  std::atomic<int> calls{0};
  msa::parallel_for(0, [&](std::size_t) { ++calls; }, 4);
  CHECK(calls == 0);
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(msa::parallel_for(
                      100, [](std::size_t i) {
                        if (i == 37) throw std::runtime_error("boom");
                      },
                      4),
                  std::runtime_error);
}

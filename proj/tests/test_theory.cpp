#include <doctest.h>

#include <random>

#include "pagebound/theory.hpp"

using namespace pagebound::theory;

namespace {

// Average 1-based position of a target placed uniformly over n pages.
Rational brute_expected(std::int64_t n) {
  std::int64_t sum = 0;
  for (std::int64_t pos = 1; pos <= n; ++pos) sum += pos;
  return Rational(sum, n);
}

// Height of a complete b-ary tree over n leaves, built level by level.
std::int64_t brute_levels(std::int64_t n, std::int64_t b) {
  std::int64_t levels = 0;
  while (n > 1) {
    n = (n + b - 1) / b;
    ++levels;
  }
  return levels;
}

__int128 ipow(std::int64_t b, std::int64_t k) {
  __int128 r = 1;
  for (std::int64_t i = 0; i < k; ++i) r *= b;
  return r;
}

void check_exact_log(std::int64_t n, std::int64_t b) {
  const std::int64_t bound = indexed_cost_bound(n, b);
  CHECK(ipow(b, bound - 1) >= n);
  if (bound > 1) CHECK(ipow(b, bound - 2) < n);
}

}  // namespace

TEST_CASE("branching factor") {
  CHECK(branching_factor({4096, 8, 8, 4}) == 204);
  CHECK(branching_factor({100, 3, 3, 4}) == 10);
  CHECK_THROWS_WITH_AS(branching_factor({20, 8, 8, 4}), "branching factor below 2",
                       std::invalid_argument);
  CHECK_THROWS_AS(branching_factor({0, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("sequential costs") {
  CHECK(expected_sequential_cost(1) == Rational(1));
  CHECK(expected_sequential_cost(50) == Rational(51, 2));
  CHECK(to_double(expected_sequential_cost(50)) == 25.5);
  CHECK(expected_sequential_cost(9) == Rational(5));
  CHECK(worst_sequential_cost(1) == 1);
  CHECK(worst_sequential_cost(50) == 50);
  CHECK(worst_sequential_cost(500) == 500);
  CHECK_THROWS_AS(expected_sequential_cost(0), std::invalid_argument);
  for (std::int64_t n = 1; n <= 2000; ++n) CHECK(expected_sequential_cost(n) == brute_expected(n));
}

TEST_CASE("indexed bound") {
  CHECK(indexed_cost_bound(1, 10) == 1);
  CHECK(indexed_cost_bound(50, 10) == 3);
  CHECK(indexed_cost_bound(1000, 10) == 4);
  CHECK(indexed_cost_bound(1001, 10) == 5);
  CHECK(indexed_cost_bound(1024, 2) == 11);
  CHECK(indexed_cost_bound(1025, 2) == 12);
  CHECK_THROWS_AS(indexed_cost_bound(10, 1), std::invalid_argument);
  CHECK_THROWS_AS(indexed_cost_bound(0, 10), std::invalid_argument);
  CHECK(ceil_log(std::int64_t{1} << 62, 2) == 62);
  CHECK(ceil_log(std::numeric_limits<std::int64_t>::max(), 2) == 63);
}

TEST_CASE("indexed bound is an exact integer log") {
  for (std::int64_t b = 2; b <= 512; ++b) {
    for (std::int64_t n = 1; n <= 2000; ++n) check_exact_log(n, b);
    // every power of b below 10^6 and its neighbours
    for (__int128 p = b; p <= 1'000'000; p *= b) {
      for (std::int64_t d : {-1, 0, 1}) check_exact_log(static_cast<std::int64_t>(p) + d, b);
    }
  }
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> n_dist(1, 1'000'000), b_dist(2, 512);
  for (int i = 0; i < 200'000; ++i) {
    const auto n = n_dist(rng), b = b_dist(rng);
    check_exact_log(n, b);
    CHECK(indexed_cost_bound(n, b) == brute_levels(n, b) + 1);
  }
}

TEST_CASE("separation ratio") {
  CHECK(separation_ratio(1, 2) == Rational(1));
  CHECK(separation_ratio(50, 10) == Rational(17, 2));
  CHECK(to_double(separation_ratio(500, 10)) == 62.625);
  Rational prev = 0;
  for (std::int64_t n = 10; n <= 1'000'000; n *= 10) {
    const Rational r = separation_ratio(n, 10);
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("cumulative costs") {
  CHECK(cumulative_sequential_cost({0, 1}) == Rational(1));
  CHECK(cumulative_sequential_cost({0, 10}) == Rational(65, 2));
  CHECK(cumulative_sequential_cost({100, 10}) == Rational(1065, 2));
  CHECK(cumulative_indexed_cost({0, 1}, 2) == 1);
  CHECK(cumulative_indexed_cost({100, 10}, 10) == 40);

  std::int64_t by_hand = 0;
  for (std::int64_t n = 1; n <= 10; ++n) by_hand += brute_levels(n, 2) + 1;
  CHECK(cumulative_indexed_cost({0, 10}, 2) == by_hand);

  for (std::int64_t n0 : {0, 1, 7, 100}) {
    Rational sum = 0;
    for (std::int64_t t = 1; t <= 300; ++t) {
      sum += brute_expected(n0 + t);
      CHECK(cumulative_sequential_cost({n0, t}) == sum);
    }
  }
  CHECK_THROWS_AS(cumulative_sequential_cost({-1, 3}), std::invalid_argument);
  CHECK_THROWS_AS(cumulative_sequential_cost({0, 0}), std::invalid_argument);
}

TEST_CASE("predicted flat reads") {
  CHECK(predicted_flat_reads({100, 10, 10}) == Rational(11, 2));
  CHECK(predicted_flat_reads({10, 10, 10}) == Rational(1));
  CHECK(predicted_flat_reads({500, 10, 10}) == Rational(51, 2));
  CHECK(predicted_flat_reads({501, 10, 10}) == Rational(26));
  CHECK(StoreShape{501, 10, 10}.pages() == 51);
  CHECK_THROWS_AS(StoreShape({0, 10, 10}).validate(), std::invalid_argument);
}

TEST_CASE("monotonicity") {
  for (std::int64_t b : {2, 3, 10, 64}) {
    for (std::int64_t n = 1; n < 5000; ++n) {
      CHECK(expected_sequential_cost(n) <= expected_sequential_cost(n + 1));
      CHECK(indexed_cost_bound(n, b) <= indexed_cost_bound(n + 1, b));
      CHECK(indexed_cost_bound(n, b + 1) <= indexed_cost_bound(n, b));
    }
  }
  for (std::int64_t t = 1; t < 200; ++t) {
    CHECK(cumulative_sequential_cost({5, t}) < cumulative_sequential_cost({5, t + 1}));
    CHECK(cumulative_indexed_cost({5, t}, 10) < cumulative_indexed_cost({5, t + 1}, 10));
    CHECK(cumulative_sequential_cost({5, t}) <= cumulative_sequential_cost({6, t}));
  }
}

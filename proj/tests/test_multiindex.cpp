#include <doctest.h>

#include <set>
#include <stdexcept>

#include "pmeim/multiindex.hpp"

using namespace pmeim;

namespace {

// Independent oracle: all vectors in {0..m}^d filtered by weight, via odometer counting.
std::int64_t brute_count(int m, int d) {
  std::vector<int> k(static_cast<std::size_t>(d), 0);
  std::int64_t count = 0;
  while (true) {
    int w = 0;
    for (int x : k) w += x;
    if (w <= m) ++count;
    int pos = 0;
    while (pos < d && k[static_cast<std::size_t>(pos)] == m) k[static_cast<std::size_t>(pos++)] = 0;
    if (pos == d) break;
    ++k[static_cast<std::size_t>(pos)];
  }
  return count;
}

}  // namespace

TEST_CASE("enumerate_kappa small sets") {
  const auto z = enumerate_kappa(0, 3);
  REQUIRE(z.size() == 1);
  CHECK(z[0] == MultiIndex{0, 0, 0});

  const auto s = enumerate_kappa(2, 2);
  const std::vector<MultiIndex> expected{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}};
  CHECK(s.items() == expected);
  CHECK(enumerate_kappa(3, 14).size() == 680);
}

TEST_CASE("enumerate_kappa rejects bad arguments") {
  CHECK_THROWS(enumerate_kappa(2, 0));
  CHECK_THROWS(enumerate_kappa(-1, 2));
  CHECK_THROWS(count_kappa(-1, 2));
  CHECK_THROWS(count_kappa(1, 0));
}

TEST_CASE("count_kappa anchors") {
  for (int m = 0; m < 8; ++m) CHECK(count_kappa(m, 1) == m + 1);
  CHECK(count_kappa(1, 10) == 11);
  CHECK(count_kappa(2, 10) == 66);
  CHECK(count_kappa(3, 10) == 286);
  CHECK(count_kappa(10, 2) == 66);
  CHECK(count_kappa(3, 14) == 680);
}

TEST_CASE("count_weight_exact") {
  CHECK(count_weight_exact(0, 5) == 1);
  CHECK(count_weight_exact(2, 2) == 3);
  CHECK(count_weight_exact(3, 14) == 560);
}

TEST_CASE("counts agree with enumeration and brute force") {
  for (int m = 0; m <= 6; ++m) {
    for (int d = 1; d <= 6; ++d) {
      CAPTURE(m);
      CAPTURE(d);
      const auto q = count_kappa(m, d);
      std::int64_t sum = 0;
      for (int p = 0; p <= m; ++p) sum += count_weight_exact(p, d);
      CHECK(static_cast<std::int64_t>(enumerate_kappa(m, d).size()) == q);
      CHECK(sum == q);
      CHECK(brute_count(m, d) == q);
    }
  }
}

TEST_CASE("set invariants: graded order, k0 first, nested prefixes, no duplicates") {
  for (int m = 1; m <= 5; ++m) {
    for (int d = 1; d <= 4; ++d) {
      const auto s = enumerate_kappa(m, d);
      CHECK(s[0].is_zero());
      std::set<std::vector<int>> seen;
      for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(s[i].weight() <= m);
        for (int x : s[i].entries()) CHECK((x >= 0 && x <= m));
        CHECK(seen.insert(s[i].entries()).second);
        if (i > 0) CHECK(s[i - 1] < s[i]);
        CHECK(s.index_of(s[i]) == static_cast<long>(i));
      }
      const auto prev = enumerate_kappa(m - 1, d);
      for (std::size_t i = 0; i < prev.size(); ++i) CHECK(prev[i] == s[i]);
    }
  }
}

TEST_CASE("polynomial bound on Q") {
  for (int m = 0; m <= 6; ++m) {
    for (int d = 2; d <= 6; ++d) {
      double fact = 1.0;
      for (int i = 2; i <= d - 1; ++i) fact *= i;
      double prod = 1.0;
      for (int i = 1; i <= d - 1; ++i) prod *= m + i;
      CHECK(static_cast<double>(count_kappa(m, d)) <= m / fact * prod + 1.0);
    }
  }
}

TEST_CASE("overflow is reported") {
  CHECK_THROWS_AS(count_kappa(200, 200), std::overflow_error);
  CHECK(binomial(62, 31) == 465428353255261088LL);
}

TEST_CASE("multi-index arithmetic") {
  const MultiIndex a{1, 0, 2};
  const MultiIndex b{0, 3, 1};
  CHECK((a + b) == MultiIndex{1, 3, 3});
  CHECK((a + b).weight() == 7);
  CHECK_THROWS(MultiIndex{-1, 2});
  CHECK(MultiIndex{0, 2} < MultiIndex{1, 1});
}

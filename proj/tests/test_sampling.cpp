#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "helpers.hpp"
#include "pmeim/error.hpp"
#include "pmeim/sampling.hpp"

using namespace pmeim;
using testutil::TempDir;

namespace {

bool is_latin(const std::vector<Param> &pts) {
  const std::size_t n = pts.size();
  for (std::size_t dim = 0; dim < pts.front().size(); ++dim) {
    std::vector<int> hits(n, 0);
    for (const auto &p : pts) {
      const auto stratum = static_cast<std::size_t>(std::floor(p[dim] * static_cast<double>(n)));
      if (stratum >= n) return false;
      ++hits[stratum];
    }
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("lhs stratification") {
  const auto s = maximin_lhs(1, 4, 123);
  REQUIRE(s.size() == 4);
  CHECK(is_latin(s.points));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    CHECK(is_latin(maximin_lhs(3, 17, seed).points));
  }
  CHECK(s.kind == SampleKind::Lhs);
  CHECK_THROWS_AS(maximin_lhs(2, 1, 0), UsageError);
}

TEST_CASE("lhs determinism per seed") {
  CHECK(maximin_lhs(2, 30, 5).points == maximin_lhs(2, 30, 5).points);
  CHECK(maximin_lhs(2, 30, 5).points != maximin_lhs(2, 30, 6).points);
}

TEST_CASE("maximin beats plain random designs") {
  const double lhs = min_pairwise_distance(maximin_lhs(2, 66, 7).points);
  const ParameterBox unit({{0, 1}, {0, 1}});
  int beaten = 0;
  for (std::uint64_t s = 0; s < 64; ++s) {
    if (lhs >= min_pairwise_distance(uniform_points(unit, 66, 7 + s))) ++beaten;
  }
  CHECK(beaten == 64);
}

TEST_CASE("box mapping") {
  const ParameterBox box({{1, 4}, {-2, 0}});
  const auto s = maximin_lhs(box, 10, 3);
  const auto u = maximin_lhs(2, 10, 3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(box.contains(s.points[i]));
    CHECK(std::abs(s.points[i][0] - (1 + 3 * u.points[i][0])) <= 1e-15);
    CHECK(std::abs(s.points[i][1] - (-2 + 2 * u.points[i][1])) <= 1e-15);
  }
}

TEST_CASE("grid and explicit samples") {
  const ParameterBox box({{1, 4}, {1, 4}});
  const auto g = grid_sample(box, 4);
  CHECK(g.size() == 16);
  CHECK(std::find(g.points.begin(), g.points.end(), Param{1, 4}) != g.points.end());
  CHECK_THROWS_AS(explicit_sample(box, {{0, 1}}), UsageError);
  CHECK_THROWS_AS(explicit_sample(box, {{2, 2}, {2, 2}}), UsageError);
  CHECK(explicit_sample(box, {{2, 2}, {3, 3}}).size() == 2);
}

TEST_CASE("doe csv round trip") {
  TempDir dir("doe");
  const auto s = maximin_lhs(3, 12, 9);
  write_doe_csv(dir / "d.csv", s);
  const auto back = read_doe_csv(dir / "d.csv");
  CHECK(back.points == s.points);
  std::ifstream in(dir / "d.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "mu1,mu2,mu3");
  CHECK_THROWS_AS(write_doe_csv(dir / "e.csv", SampleSet{}), UsageError);
  CHECK_FALSE(std::filesystem::exists(dir / "e.csv"));
  CHECK_THROWS_AS(read_doe_csv(dir / "none.csv"), IoError);
}

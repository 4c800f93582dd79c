// SPDX-License-Identifier: Apache-2.0

#include "pmeim/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "pmeim/error.hpp"
#include "pmeim/rng.hpp"

namespace pmeim {

namespace {

std::vector<Param> lhs_design(int r, int n, Rng &rng) {
  std::vector<Param> pts(static_cast<std::size_t>(n), Param(static_cast<std::size_t>(r)));
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int dim = 0; dim < r; ++dim) {
    for (int i = 0; i < n; ++i) strata[static_cast<std::size_t>(i)] = i;
    rng.shuffle(strata);
    for (int i = 0; i < n; ++i) {
      pts[static_cast<std::size_t>(i)][static_cast<std::size_t>(dim)] =
          (strata[static_cast<std::size_t>(i)] + rng.uniform()) / n;
    }
  }
  return pts;
}

}  // namespace

double min_pairwise_distance(const std::vector<Param> &points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < points[i].size(); ++a) {
        const double diff = points[i][a] - points[j][a];
        s += diff * diff;
      }
      best = std::min(best, s);
    }
  }
  return std::sqrt(best);
}

SampleSet maximin_lhs(int r, int n, std::uint64_t seed, int candidates) {
  if (r < 1) throw UsageError("design dimension must be >= 1");
  if (n < 2) throw UsageError("design size must be >= 2");
  Rng rng(seed);
  SampleSet out;
  out.kind = SampleKind::Lhs;
  out.seed = seed;
  out.points = lhs_design(r, n, rng);
  if (static_cast<std::size_t>(n) > kMaximinLimit) return out;
  double best = min_pairwise_distance(out.points);
  for (int c = 1; c < candidates; ++c) {
    auto cand = lhs_design(r, n, rng);
    const double d = min_pairwise_distance(cand);
    if (d > best) {
      best = d;
      out.points = std::move(cand);
    }
  }
  return out;
}

SampleSet maximin_lhs(const ParameterBox &box, int n, std::uint64_t seed, int candidates) {
  SampleSet s = maximin_lhs(box.dim(), n, seed, candidates);
  for (auto &p : s.points) p = box.from_unit(p);
  return s;
}

SampleSet grid_sample(const ParameterBox &box, int per_dim) {
  if (per_dim < 2) throw UsageError("grid sample needs at least 2 points per direction");
  const int r = box.dim();
  double total = std::pow(static_cast<double>(per_dim), r);
  if (total > 1e7) throw UsageError("grid sample too large");
  SampleSet s;
  s.kind = SampleKind::Grid;
  const auto count = static_cast<std::size_t>(total);
  s.points.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    Param u(static_cast<std::size_t>(r));
    std::size_t rem = idx;
    for (int a = 0; a < r; ++a) {
      u[static_cast<std::size_t>(a)] = static_cast<double>(rem % static_cast<std::size_t>(per_dim)) / (per_dim - 1);
      rem /= static_cast<std::size_t>(per_dim);
    }
    s.points.push_back(box.from_unit(u));
  }
  return s;
}

SampleSet explicit_sample(const ParameterBox &box, std::vector<Param> points) {
  std::set<Param> seen;
  for (const auto &p : points) {
    if (!box.contains(p)) throw UsageError("sample point outside the parameter box");
    if (!seen.insert(p).second) throw UsageError("duplicate sample point");
  }
  SampleSet s;
  s.kind = SampleKind::Explicit;
  s.points = std::move(points);
  return s;
}

std::vector<Param> uniform_points(const ParameterBox &box, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Param> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Param u(static_cast<std::size_t>(box.dim()));
    for (double &x : u) x = rng.uniform();
    pts.push_back(box.from_unit(u));
  }
  return pts;
}

void write_doe_csv(const std::filesystem::path &path, const SampleSet &doe) {
  if (doe.empty()) throw UsageError("refusing to write an empty design");
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  const std::size_t r = doe.points.front().size();
  for (std::size_t a = 0; a < r; ++a) out << (a ? "," : "") << "mu" << a + 1;
  out << "\n";
  char buf[32];
  for (const auto &p : doe.points) {
    for (std::size_t a = 0; a < r; ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", p[a]);
      out << (a ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

SampleSet read_doe_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty design file " + path.string());
  const auto r = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',') + 1);
  SampleSet s;
  s.kind = SampleKind::Explicit;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    Param p;
    std::string cell;
    while (std::getline(ls, cell, ',')) p.push_back(std::stod(cell));
    if (p.size() != r) throw IoError("ragged row in design file " + path.string());
    s.points.push_back(std::move(p));
  }
  return s;
}

}  // namespace pmeim

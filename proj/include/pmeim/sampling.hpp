// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pmeim/family.hpp"

namespace pmeim {

enum class SampleKind { Grid, Lhs, Explicit };

/// Finite parameter set inside a box, e.g. the training set of the greedy.
struct SampleSet {
  std::vector<Param> points;
  SampleKind kind = SampleKind::Explicit;
  std::uint64_t seed = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Latin hypercube in [0,1]^r: among `candidates` seeded designs, the one with the largest
/// minimum pairwise distance. Designs with more than `kMaximinLimit` points skip the
/// O(n^2) distance scan and return the first candidate.
inline constexpr std::size_t kMaximinLimit = 4096;
SampleSet maximin_lhs(int r, int n, std::uint64_t seed, int candidates = 64);

/// Same design mapped affinely into the box.
SampleSet maximin_lhs(const ParameterBox &box, int n, std::uint64_t seed, int candidates = 64);

/// Tensor grid with `per_dim` equispaced points per direction, endpoints included.
SampleSet grid_sample(const ParameterBox &box, int per_dim);

/// Validates user-supplied points: inside the box, no exact duplicates.
SampleSet explicit_sample(const ParameterBox &box, std::vector<Param> points);

/// i.i.d. uniform points in the box.
std::vector<Param> uniform_points(const ParameterBox &box, int n, std::uint64_t seed);

double min_pairwise_distance(const std::vector<Param> &points);

void write_doe_csv(const std::filesystem::path &path, const SampleSet &doe);
SampleSet read_doe_csv(const std::filesystem::path &path);

}  // namespace pmeim

// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmeim/family.hpp"
#include "pmeim/generators.hpp"
#include "pmeim/sampling.hpp"
#include "pmeim/surrogate.hpp"

namespace pmeim {

enum class Method { Proposed, Frobenius, Pod, Ridge };

Method parse_method(std::string_view name);
std::string to_string(Method m);

struct ProblemSpec {
  /// Generator kind; ignored when family_path is set.
  ProblemKind kind = ProblemKind::Laplace2dThermal;
  int n = 20;
  std::uint64_t seed = 0;
  GenOptions gen;
  std::filesystem::path family_path;
};

/// Either a maximum weight m (budget Q_{m,d}) or an explicit number of snapshots q.
struct Budget {
  int m = 0;
  int q = 0;
};

struct SampleSpec {
  SampleKind kind = SampleKind::Lhs;
  /// Number of points (lhs) or points per direction (grid).
  int n = 2048;
  std::uint64_t seed = 0;
};

struct BenchConfig {
  ProblemSpec problem;
  std::vector<Method> methods{Method::Proposed};
  Quantity quantity = Quantity::Solve;
  std::vector<Budget> budgets;
  int n_test = 100;
  std::uint64_t test_seed = 1;
  SampleSpec sample;
  /// Defaults to true for logdet and false otherwise.
  std::optional<bool> force_k0;
  /// Greedy stopping tolerance; 0 spends each budget in full unless the residual vanishes.
  double tol = 0.0;
  double energy_tol = 1e-10;
  double ridge_reg = 1e-8;
  std::uint64_t doe_seed = 2;
  /// When false the wall_seconds column is written as 0 so reports are reproducible.
  bool timing = false;
};

BenchConfig parse_bench_config(const std::string &json_text, const std::filesystem::path &base_dir = {});
BenchConfig load_bench_config(const std::filesystem::path &path);
/// Canonical JSON of the config, used for hashing.
std::string bench_config_json(const BenchConfig &cfg);

struct BenchRow {
  Method method = Method::Proposed;
  int q = 0;
  Quantity quantity = Quantity::Solve;
  double mean_rel_l2 = 0.0;
  double mean_rel_linf = 0.0;
  double max_rel_l2 = 0.0;
  double wall_seconds = 0.0;
  /// Empty on success; the numeric fields are NaN otherwise.
  std::string error;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<std::pair<std::string, std::string>> metadata;
};

BenchReport run_convergence(const BenchConfig &cfg);
BenchReport run_convergence(const BenchConfig &cfg, const AffineFamily &fam);

AffineFamily make_family(const ProblemSpec &spec);

/// (||e - a|| / ||e||, max|e - a| / max|e|); Frobenius norm for matrices, absolute value for scalars.
std::pair<double, double> rel_errors(const QuantityValue &exact, const QuantityValue &approx);

std::string report_csv(const BenchReport &report);
/// Writes the CSV and a PATH.meta.json sidecar with the report metadata.
void export_csv(const BenchReport &report, const std::filesystem::path &path);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

enum class ValidateLevel { Fast, Full };

std::vector<CheckResult> validate_suite(ValidateLevel level);

}  // namespace pmeim

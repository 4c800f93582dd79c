#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pmeim/bench.hpp"
#include "pmeim/error.hpp"
#include "pmeim/parallel.hpp"

using namespace pmeim;
using testutil::TempDir;

namespace {

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BenchConfig small_config(Quantity q, std::vector<Method> methods) {
  BenchConfig cfg;
  cfg.problem.kind = q == Quantity::Logdet ? ProblemKind::LogdetThermal : ProblemKind::Laplace2dThermal;
  cfg.problem.n = 6;
  cfg.methods = std::move(methods);
  cfg.quantity = q;
  cfg.budgets = {{1, 0}, {2, 0}, {3, 0}};
  cfg.n_test = 20;
  cfg.sample.n = 200;
  return cfg;
}

}  // namespace

TEST_CASE("relative errors") {
  Vector e(2), a(2);
  e << 3, 4;
  a << 3, 0;
  auto [l2, linf] = rel_errors(e, a);
  CHECK(std::abs(l2 - 0.8) <= 1e-15);
  CHECK(std::abs(linf - 1.0) <= 1e-15);
  CHECK(rel_errors(QuantityValue(e), QuantityValue(e)) == std::pair<double, double>{0.0, 0.0});
  CHECK(rel_errors(QuantityValue(Vector(Vector::Unit(2, 0))), QuantityValue(Vector(Vector::Zero(2)))) ==
        std::pair<double, double>{1.0, 1.0});
  CHECK(rel_errors(2.0, 1.5) == std::pair<double, double>{0.25, 0.25});
  Matrix m = Matrix::Identity(2, 2);
  CHECK(std::abs(rel_errors(m, Matrix(Matrix::Zero(2, 2))).first - 1.0) <= 1e-15);
  CHECK_THROWS_AS(rel_errors(0.0, 1.0), NumericalError);
  CHECK_THROWS_AS(rel_errors(QuantityValue(e), QuantityValue(1.0)), UsageError);
  CHECK_THROWS_AS(rel_errors(QuantityValue(e), QuantityValue(Vector(Vector::Ones(3)))), UsageError);
}

TEST_CASE("bench config parsing") {
  const BenchConfig cfg = parse_bench_config(R"({
    "problem": {"kind": "laplace2d_thermal", "n": 8, "seed": 3},
    "methods": ["proposed", "pod"],
    "quantity": "solve",
    "budgets": [1, {"m": 2}, {"q": 5}],
    "n_test": 7, "test_seed": 9,
    "sample": {"kind": "lhs", "n": 100, "seed": 4}
  })");
  CHECK(cfg.problem.n == 8);
  CHECK(cfg.problem.seed == 3);
  CHECK(cfg.methods == std::vector<Method>{Method::Proposed, Method::Pod});
  REQUIRE(cfg.budgets.size() == 3);
  CHECK(cfg.budgets[0].m == 1);
  CHECK(cfg.budgets[1].m == 2);
  CHECK(cfg.budgets[2].q == 5);
  CHECK(cfg.n_test == 7);
  CHECK(cfg.sample.n == 100);

  const BenchConfig again = parse_bench_config(bench_config_json(cfg));
  CHECK(bench_config_json(again) == bench_config_json(cfg));

  CHECK_THROWS_AS(parse_bench_config("{"), UsageError);
  CHECK_THROWS_AS(parse_bench_config(R"({"problem": {"kind": "laplace2d_thermal"}, "budgets": []})"), UsageError);
  CHECK_THROWS_AS(parse_bench_config(R"({"problem": {"kind": "laplace2d_thermal"}, "budgets": [1], "n_test": 0})"),
                  UsageError);
  CHECK_THROWS_AS(parse_bench_config(R"({"problem": {"kind": "nope"}, "budgets": [1]})"), UsageError);
  CHECK_THROWS_AS(parse_bench_config(
                      R"({"problem": {"kind": "laplace2d_thermal"}, "methods": ["pod"], "quantity": "logdet", "budgets": [1]})"),
                  UsageError);
  CHECK_THROWS_AS(parse_bench_config(
                      R"({"problem": {"kind": "laplace2d_thermal"}, "methods": ["magic"], "budgets": [1]})"),
                  UsageError);
  CHECK_THROWS_AS(load_bench_config("/nonexistent/bench.json"), IoError);
}

TEST_CASE("convergence run over all methods") {
  const BenchReport rep =
      run_convergence(small_config(Quantity::Solve, {Method::Ridge, Method::Proposed, Method::Pod, Method::Frobenius}));
  REQUIRE(rep.rows.size() == 12);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto &a = rep.rows[i - 1];
    const auto &b = rep.rows[i];
    CHECK(std::make_pair(to_string(a.method), a.q) < std::make_pair(to_string(b.method), b.q));
  }
  for (const auto &row : rep.rows) {
    CHECK(row.error.empty());
    CHECK(std::isfinite(row.mean_rel_l2));
    CHECK(row.mean_rel_l2 >= 0);
    CHECK(row.mean_rel_linf >= 0);
    CHECK(row.max_rel_l2 >= row.mean_rel_l2);
    CHECK(row.wall_seconds == 0.0);
  }
  std::vector<int> qs;
  for (const auto &row : rep.rows)
    if (row.method == Method::Proposed) qs.push_back(row.q);
  CHECK(qs == std::vector<int>{3, 6, 10});
  bool has_hash = false;
  for (const auto &[k, v] : rep.metadata) has_hash = has_hash || (k == "config_hash" && !v.empty());
  CHECK(has_hash);
}

TEST_CASE("logdet and inverse runs") {
  const BenchReport ld = run_convergence(small_config(Quantity::Logdet, {Method::Proposed, Method::Ridge}));
  CHECK(ld.rows.size() == 6);
  for (const auto &row : ld.rows) CHECK(row.error.empty());
  const BenchReport inv = run_convergence(small_config(Quantity::Inverse, {Method::Proposed, Method::Frobenius}));
  CHECK(inv.rows.size() == 6);
  for (const auto &row : inv.rows) CHECK(std::isfinite(row.mean_rel_l2));
}

TEST_CASE("explicit Q budget") {
  BenchConfig cfg = small_config(Quantity::Solve, {Method::Proposed});
  cfg.budgets = {{0, 4}};
  const BenchReport rep = run_convergence(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].q == 4);
}

TEST_CASE("csv export") {
  TempDir dir("bench");
  const BenchConfig cfg = small_config(Quantity::Solve, {Method::Proposed, Method::Pod});
  set_thread_count(1);
  const BenchReport one = run_convergence(cfg);
  set_thread_count(4);
  const BenchReport four = run_convergence(cfg);
  set_thread_count(0);
  export_csv(one, dir / "a.csv");
  export_csv(four, dir / "b.csv");
  const std::string a = slurp(dir / "a.csv");
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a.rfind("method,Q,quantity,mean_rel_l2,mean_rel_linf,max_rel_l2,wall_seconds\n", 0) == 0);
  CHECK(std::filesystem::exists(dir / "a.csv.meta.json"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 7);

  BenchReport empty;
  CHECK_THROWS_AS(export_csv(empty, dir / "c.csv"), UsageError);
  CHECK_FALSE(std::filesystem::exists(dir / "c.csv"));
  CHECK_THROWS_AS(export_csv(one, dir / "no" / "such" / "dir.csv"), IoError);
}

TEST_CASE("failed rows carry nan") {
  BenchReport rep;
  BenchRow row;
  row.method = Method::Pod;
  row.q = 3;
  row.mean_rel_l2 = row.mean_rel_linf = row.max_rel_l2 = std::nan("");
  row.error = "singular";
  rep.rows.push_back(row);
  const std::string csv = report_csv(rep);
  CHECK(csv.find("pod,3,solve,nan,nan,nan,0") != std::string::npos);
}

TEST_CASE("fast validation suite") {
  for (const auto &c : validate_suite(ValidateLevel::Fast)) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}

// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "pmeim/baselines.hpp"
#include "pmeim/bench.hpp"
#include "pmeim/eim.hpp"
#include "pmeim/error.hpp"
#include "pmeim/generators.hpp"
#include "pmeim/linalg.hpp"
#include "pmeim/parallel.hpp"
#include "pmeim/rng.hpp"
#include "pmeim/validators.hpp"

namespace pmeim {

namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

AffineFamily random_spd_family(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SparseMatrix> terms;
  std::vector<CoeffExpr> coeffs;
  std::vector<std::pair<double, double>> box;
  for (int l = 0; l < d; ++l) {
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-1.0, 1.0);
    const Matrix a = b.transpose() * b + n * Matrix::Identity(n, n);
    terms.push_back(a.sparseView());
    coeffs.push_back(CoeffExpr::parse("mu" + std::to_string(l + 1)));
    box.emplace_back(1.0, 2.0);
  }
  Vector rhs = Vector::Ones(n);
  return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox(box), {true, true}, rhs);
}

double rel_fro(const Matrix &a, const Matrix &b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

CheckResult check_counts() {
  for (int m = 0; m <= 6; ++m) {
    for (int d = 1; d <= 6; ++d) {
      const auto q = count_kappa(m, d);
      std::int64_t sum = 0;
      for (int p = 0; p <= m; ++p) sum += count_weight_exact(p, d);
      if (static_cast<std::int64_t>(enumerate_kappa(m, d).size()) != q || sum != q) {
        return {"kappa_counts", false, "mismatch at m=" + std::to_string(m) + " d=" + std::to_string(d)};
      }
    }
  }
  const bool anchors = count_kappa(1, 10) == 11 && count_kappa(3, 10) == 286 && count_kappa(10, 2) == 66 &&
                       count_kappa(3, 14) == 680;
  return {"kappa_counts", anchors, anchors ? "m,d <= 6 and anchors" : "anchor mismatch"};
}

CheckResult check_hand_trace() {
  const ParameterBox box({{1.0, 3.0}});
  const SampleSet sample = explicit_sample(box, {{1.0}, {2.0}, {3.0}});
  const EimModel model = eim_offline({CoeffExpr::parse("mu1")}, box, 1, sample);
  const bool ok = model.size() == 2 && model.selected_mu()[0] == Param{3.0} &&
                  model.selected_k()[0] == MultiIndex{1} && model.selected_mu()[1] == Param{1.0} &&
                  model.selected_k()[1] == MultiIndex{0};
  return {"eim_hand_trace", ok, ok ? "(3,(1)) then (1,(0))" : "unexpected selection"};
}

CheckResult check_interpolation(int n_mu) {
  const AffineFamily fam = gen_problem(ProblemKind::Laplace2dThermal, 4, 0);
  const EimModel model = eim_offline(fam, 3, maximin_lhs(fam.box(), 500, 3));
  double worst = 0.0;
  double beta = 0.0;
  for (const auto &mu : uniform_points(fam.box(), n_mu, 11)) {
    const Vector alpha = fam.eval_coeffs(mu);
    for (const auto &k : model.selected_k()) {
      const double g = g_eval(alpha, k);
      const double i = model.interpolate(mu, k);
      worst = std::max(worst, std::abs(i - g) / std::max(1.0, std::abs(g)));
      beta = std::max(beta, std::abs(model.interpolate_beta(mu, k) - i) / std::max(1.0, std::abs(i)));
    }
  }
  const bool ok = worst <= 1e-10 && beta <= 1e-11;
  return {"interpolation_property", ok, "max rel " + sci(worst) + ", beta path " + sci(beta)};
}

CheckResult check_power_exactness(int families) {
  double worst = 0.0;
  for (int f = 0; f < families; ++f) {
    const AffineFamily fam = random_spd_family(4, 2, 100 + static_cast<std::uint64_t>(f));
    const EimModel model = eim_offline(fam, 3, maximin_lhs(fam.box(), 200, 5));
    if (model.size() != count_kappa(3, 2)) return {"power_exactness", false, "greedy stopped before Q"};
    for (const auto &mu : uniform_points(fam.box(), 3, 17 + static_cast<std::uint64_t>(f))) {
      for (int p = 0; p <= 3; ++p) {
        worst = std::max(worst, rel_fro(power_interp_check(model, fam, mu, p), brute_power_expand(fam, mu, p).power));
      }
    }
  }
  return {"power_exactness", worst <= 1e-8, "max rel Frobenius " + sci(worst)};
}

CheckResult check_partition_of_unity() {
  const AffineFamily fam = gen_problem(ProblemKind::LogdetThermal, 4, 0);
  EimOptions opts;
  opts.force_k0 = true;
  const EimModel model = eim_offline(fam, 4, maximin_lhs(fam.box(), 500, 1), opts);
  double worst = 0.0;
  for (const auto &mu : uniform_points(fam.box(), 500, 23)) worst = std::max(worst, std::abs(model.lambda(mu).sum() - 1));
  return {"partition_of_unity", worst <= 1e-12, "max |sum lambda - 1| " + sci(worst)};
}

CheckResult check_richardson(int n_mu) {
  const AffineFamily fam = gen_problem(ProblemKind::Laplace2dThermal, 5, 0);
  const Param mid = fam.box().midpoint();
  RichardsonConfig cfg{fam.assemble(mid), Matrix::Zero(fam.size(), fam.size()), 30};
  const auto points = uniform_points(fam.box(), n_mu, 29);
  std::vector<RichardsonResult> runs;
  double rho = 0.0;
  double eps0 = 0.0;
  double closed = 0.0;
  for (const auto &mu : points) {
    runs.push_back(richardson_iterate(fam, mu, cfg));
    const auto &r = runs.back();
    const Matrix a = fam.assemble_dense(mu);
    const Matrix psi_inv = SparseFactor(cfg.psi, false).solve(Matrix(Matrix::Identity(fam.size(), fam.size())));
    rho = std::max(rho, norm2(Matrix::Identity(fam.size(), fam.size()) - psi_inv * a));
    eps0 = std::max(eps0, norm2(r.iterates[0] - r.inverse));
    for (std::size_t k = 0; k < r.iterates.size(); ++k) {
      closed = std::max(closed, rel_fro(r.iterates[k], r.closed_form[k]));
    }
  }
  int violations = 0;
  for (const auto &r : runs) {
    for (int k = 1; k <= cfg.steps; ++k) {
      const double err = norm2(r.iterates[static_cast<std::size_t>(k)] - r.inverse);
      if (err > eps0 * std::pow(rho, k) * (1 + 1e-8) + 1e-14) ++violations;
    }
  }
  const bool ok = violations == 0 && closed <= 1e-10 && rho < 1.0;
  return {"richardson_bound", ok,
          "rho " + sci(rho) + ", closed form " + sci(closed) + ", violations " + std::to_string(violations)};
}

CheckResult check_logdet_series(int n_mu) {
  const AffineFamily fam = gen_problem(ProblemKind::LogdetThermal, 5, 0);
  const auto points = uniform_points(fam.box(), n_mu, 31);
  int violations = 0;
  for (int steps : {5, 10, 20, 40}) {
    const LogDetSeriesConfig cfg = logdet_bounds(fam, points, steps);
    const double bound = logdet_series_bound(fam.size(), cfg);
    for (const auto &mu : points) {
      if (std::abs(logdet_series(fam, mu, cfg) - exact_logdet(fam, mu)) > bound) ++violations;
    }
  }
  return {"logdet_series_bound", violations == 0, "violations " + std::to_string(violations)};
}

CheckResult check_surrogate_exactness() {
  const AffineFamily fam = gen_problem(ProblemKind::Laplace2dThermal, 5, 0);
  EimOptions opts;
  opts.force_k0 = true;
  auto model = std::make_shared<const EimModel>(eim_offline(fam, 3, maximin_lhs(fam.box(), 300, 2), opts));
  double worst = 0.0;
  for (Quantity q : {Quantity::Solve, Quantity::Inverse, Quantity::Logdet}) {
    const Surrogate s = build_surrogate(model, fam, q);
    for (const auto &mu : model->selected_mu()) {
      worst = std::max(worst, rel_errors(exact_quantity(fam, mu, q, fam.rhs()), s.eval(mu)).first);
    }
  }
  return {"surrogate_selected_exactness", worst <= 1e-10, "max rel " + sci(worst)};
}

CheckResult check_baselines() {
  // Weights are unique only while M(mu) is numerically definite: one weight per term (m = 1)
  // on the thermal family and on a generic three-term family.
  double unit = 0.0;
  double objective = 0.0;
  const AffineFamily thermal = gen_problem(ProblemKind::Laplace2dThermal, 5, 0);
  const AffineFamily generic = random_spd_family(6, 3, 41);
  for (const auto &[fam, m] : {std::pair{&thermal, 1}, std::pair{&generic, 1}}) {
    const EimModel model = eim_offline(*fam, m, maximin_lhs(fam->box(), 300, 2));
    const FrobPrecomp pre = frob_build(*fam, model.selected_mu());
    for (int i = 0; i < pre.size(); ++i) {
      const auto &mu = model.selected_mu()[static_cast<std::size_t>(i)];
      const Vector lambda = frob_lambda(pre, *fam, mu);
      unit = std::max(unit, (lambda - Vector::Unit(pre.size(), i)).cwiseAbs().maxCoeff());
      objective = std::max(objective, frob_objective(pre, *fam, mu, lambda));
    }
  }
  const AffineFamily &fam = thermal;
  const Matrix basis = Matrix::Identity(fam.size(), fam.size());
  PodBasis full{basis, Vector::Ones(fam.size()), 0.0};
  const PodGalerkin pod(fam, full, *fam.rhs());
  double pod_err = 0.0;
  for (const auto &mu : uniform_points(fam.box(), 10, 37)) {
    const Vector exact = exact_solve(fam, mu, *fam.rhs());
    pod_err = std::max(pod_err, (pod.solve(mu) - exact).norm() / exact.norm());
  }
  const bool ok = unit <= 1e-8 && objective <= 1e-8 && pod_err <= 1e-9;
  return {"baselines_sanity", ok,
          "frobenius unit " + sci(unit) + ", objective " + sci(objective) + ", pod full rank " + sci(pod_err)};
}

BenchConfig small_bench() {
  BenchConfig cfg;
  cfg.problem.kind = ProblemKind::Laplace2dThermal;
  cfg.problem.n = 8;
  cfg.methods = {Method::Proposed, Method::Pod, Method::Ridge, Method::Frobenius};
  cfg.budgets = {{1, 0}, {2, 0}, {3, 0}};
  cfg.n_test = 20;
  cfg.sample.n = 400;
  return cfg;
}

CheckResult check_determinism() {
  const BenchConfig cfg = small_bench();
  const unsigned saved = thread_count();
  set_thread_count(1);
  const std::string a = report_csv(run_convergence(cfg));
  set_thread_count(4);
  const std::string b = report_csv(run_convergence(cfg));
  set_thread_count(saved);
  return {"bench_determinism", a == b, a == b ? "1 and 4 threads agree" : "reports differ"};
}

CheckResult check_convergence() {
  BenchConfig cfg;
  cfg.problem.kind = ProblemKind::Laplace2dThermal;
  cfg.problem.n = 20;
  for (int m = 1; m <= 10; ++m) cfg.budgets.push_back({m, 0});
  const BenchReport report = run_convergence(cfg);
  bool decreasing = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    decreasing = decreasing && report.rows[i].mean_rel_l2 < report.rows[i - 1].mean_rel_l2;
  }
  const double drop = report.rows.front().mean_rel_l2 / report.rows.back().mean_rel_l2;
  return {"thermal_convergence", decreasing && drop >= 100.0, "drop Q=3 to Q=66: " + sci(drop)};
}

}  // namespace

std::vector<CheckResult> validate_suite(ValidateLevel level) {
  const bool full = level == ValidateLevel::Full;
  std::vector<std::pair<std::string, std::function<CheckResult()>>> checks = {
      {"kappa_counts", check_counts},
      {"eim_hand_trace", check_hand_trace},
      {"interpolation_property", [full] { return check_interpolation(full ? 200 : 50); }},
      {"power_exactness", [full] { return check_power_exactness(full ? 20 : 5); }},
      {"partition_of_unity", check_partition_of_unity},
      {"richardson_bound", [full] { return check_richardson(full ? 100 : 10); }},
      {"logdet_series_bound", [full] { return check_logdet_series(full ? 50 : 10); }},
      {"surrogate_selected_exactness", check_surrogate_exactness},
      {"baselines_sanity", check_baselines},
      {"bench_determinism", check_determinism},
  };
  if (full) checks.emplace_back("thermal_convergence", check_convergence);
  std::vector<CheckResult> out;
  for (auto &[name, fn] : checks) {
    const auto start = std::chrono::steady_clock::now();
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception &e) {
      r = {name, false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.detail += " (" + sci(secs) + " s)";
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace pmeim

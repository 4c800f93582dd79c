// SPDX-License-Identifier: Apache-2.0

#include "pmeim/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pmeim/baselines.hpp"
#include "pmeim/eim.hpp"
#include "pmeim/error.hpp"
#include "pmeim/parallel.hpp"
#include "pmeim/rng.hpp"

namespace pmeim {

using ojson = nlohmann::ordered_json;

Method parse_method(std::string_view name) {
  if (name == "proposed") return Method::Proposed;
  if (name == "frobenius") return Method::Frobenius;
  if (name == "pod") return Method::Pod;
  if (name == "ridge") return Method::Ridge;
  throw UsageError("unknown method '" + std::string(name) + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Proposed:
      return "proposed";
    case Method::Frobenius:
      return "frobenius";
    case Method::Pod:
      return "pod";
    case Method::Ridge:
      return "ridge";
  }
  return "?";
}

namespace {

std::string to_string(SampleKind k) {
  switch (k) {
    case SampleKind::Grid:
      return "grid";
    case SampleKind::Lhs:
      return "lhs";
    case SampleKind::Explicit:
      return "explicit";
  }
  return "?";
}

bool supports(Method method, Quantity q) {
  switch (method) {
    case Method::Proposed:
      return true;
    case Method::Frobenius:
      return q != Quantity::Logdet;
    case Method::Pod:
      return q == Quantity::Solve;
    case Method::Ridge:
      return q != Quantity::Inverse;
  }
  return false;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string &s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

BenchConfig parse_bench_config(const std::string &json_text, const std::filesystem::path &base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError(std::string("bench config is not valid JSON: ") + e.what());
  }
  BenchConfig cfg;
  try {
    const auto &p = j.at("problem");
    if (p.contains("family")) {
      std::filesystem::path fp = p.at("family").get<std::string>();
      cfg.problem.family_path = fp.is_absolute() || base_dir.empty() ? fp : base_dir / fp;
    } else {
      cfg.problem.kind = parse_problem_kind(p.at("kind").get<std::string>());
    }
    cfg.problem.n = p.value("n", cfg.problem.n);
    cfg.problem.seed = p.value("seed", cfg.problem.seed);
    cfg.problem.gen.experiment = p.value("experiment", cfg.problem.gen.experiment);
    cfg.problem.gen.box_index = p.value("box_index", cfg.problem.gen.box_index);
    cfg.problem.gen.rel_width = p.value("rel_width", cfg.problem.gen.rel_width);

    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto &m : j.at("methods")) cfg.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("quantity")) cfg.quantity = parse_quantity(j.at("quantity").get<std::string>());
    for (const auto &b : j.at("budgets")) {
      Budget budget;
      if (b.is_number_integer()) {
        budget.m = b.get<int>();
      } else if (b.contains("m")) {
        budget.m = b.at("m").get<int>();
      } else {
        budget.q = b.at("q").get<int>();
      }
      cfg.budgets.push_back(budget);
    }
    cfg.n_test = j.value("n_test", cfg.n_test);
    cfg.test_seed = j.value("test_seed", cfg.test_seed);
    if (j.contains("sample")) {
      const auto &s = j.at("sample");
      const std::string kind = s.value("kind", std::string("lhs"));
      if (kind == "lhs") {
        cfg.sample.kind = SampleKind::Lhs;
      } else if (kind == "grid") {
        cfg.sample.kind = SampleKind::Grid;
      } else {
        throw UsageError("sample kind must be lhs or grid");
      }
      cfg.sample.n = s.value("n", cfg.sample.n);
      cfg.sample.seed = s.value("seed", cfg.sample.seed);
    }
    if (j.contains("force_k0")) cfg.force_k0 = j.at("force_k0").get<bool>();
    cfg.tol = j.value("tol", cfg.tol);
    cfg.energy_tol = j.value("energy_tol", cfg.energy_tol);
    cfg.ridge_reg = j.value("ridge_reg", cfg.ridge_reg);
    cfg.doe_seed = j.value("doe_seed", cfg.doe_seed);
    cfg.timing = j.value("timing", cfg.timing);
  } catch (const nlohmann::json::exception &e) {
    throw UsageError(std::string("bench config: ") + e.what());
  }

  if (cfg.budgets.empty()) throw UsageError("bench config: budgets must be nonempty");
  for (const auto &b : cfg.budgets) {
    if (b.m < 0 || b.q < 0 || (b.m == 0 && b.q == 0)) throw UsageError("bench config: budgets need m >= 1 or q >= 1");
  }
  if (cfg.n_test < 1) throw UsageError("bench config: n_test must be >= 1");
  if (cfg.methods.empty()) throw UsageError("bench config: methods must be nonempty");
  if (cfg.sample.n < 1) throw UsageError("bench config: sample size must be >= 1");
  for (Method m : cfg.methods) {
    if (!supports(m, cfg.quantity)) {
      throw UsageError("bench config: method " + to_string(m) + " does not support quantity " +
                       to_string(cfg.quantity));
    }
  }
  if (cfg.quantity == Quantity::Logdet && cfg.force_k0 == false) {
    throw UsageError("bench config: logdet requires force_k0");
  }
  return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open bench config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_bench_config(ss.str(), path.parent_path());
}

std::string bench_config_json(const BenchConfig &cfg) {
  ojson j;
  ojson p;
  if (!cfg.problem.family_path.empty()) {
    p["family"] = cfg.problem.family_path.string();
  } else {
    p["kind"] = to_string(cfg.problem.kind);
    p["n"] = cfg.problem.n;
    p["seed"] = cfg.problem.seed;
    p["experiment"] = cfg.problem.gen.experiment;
    p["box_index"] = cfg.problem.gen.box_index;
    p["rel_width"] = cfg.problem.gen.rel_width;
  }
  j["problem"] = p;
  j["methods"] = ojson::array();
  for (Method m : cfg.methods) j["methods"].push_back(to_string(m));
  j["quantity"] = to_string(cfg.quantity);
  j["budgets"] = ojson::array();
  for (const auto &b : cfg.budgets) {
    if (b.m > 0) {
      j["budgets"].push_back({{"m", b.m}});
    } else {
      j["budgets"].push_back({{"q", b.q}});
    }
  }
  j["n_test"] = cfg.n_test;
  j["test_seed"] = cfg.test_seed;
  j["sample"] = {{"kind", to_string(cfg.sample.kind)}, {"n", cfg.sample.n}, {"seed", cfg.sample.seed}};
  j["force_k0"] = cfg.force_k0.value_or(cfg.quantity == Quantity::Logdet);
  j["tol"] = cfg.tol;
  j["energy_tol"] = cfg.energy_tol;
  j["ridge_reg"] = cfg.ridge_reg;
  j["doe_seed"] = cfg.doe_seed;
  j["timing"] = cfg.timing;
  return j.dump();
}

AffineFamily make_family(const ProblemSpec &spec) {
  if (!spec.family_path.empty()) return load_family(spec.family_path);
  return gen_problem(spec.kind, spec.n, spec.seed, spec.gen);
}

std::pair<double, double> rel_errors(const QuantityValue &exact, const QuantityValue &approx) {
  if (exact.index() != approx.index()) throw UsageError("rel_errors: quantity kinds differ");
  if (const auto *e = std::get_if<double>(&exact)) {
    const double a = std::get<double>(approx);
    if (*e == 0.0) throw NumericalError("rel_errors: exact value is zero");
    const double r = std::abs(*e - a) / std::abs(*e);
    return {r, r};
  }
  auto compute = [](const auto &e, const auto &a) -> std::pair<double, double> {
    if (e.rows() != a.rows() || e.cols() != a.cols()) throw UsageError("rel_errors: shapes differ");
    const double n2 = e.norm();
    const double ninf = e.cwiseAbs().maxCoeff();
    if (n2 == 0.0) throw NumericalError("rel_errors: exact value is zero");
    return {(e - a).norm() / n2, (e - a).cwiseAbs().maxCoeff() / ninf};
  };
  if (const auto *e = std::get_if<Vector>(&exact)) return compute(*e, std::get<Vector>(approx));
  return compute(std::get<Matrix>(exact), std::get<Matrix>(approx));
}

namespace {

using Clock = std::chrono::steady_clock;

struct TestSet {
  std::vector<Param> points;
  std::vector<QuantityValue> exact;
};

SampleSet make_sample(const BenchConfig &cfg, const ParameterBox &box) {
  if (cfg.sample.kind == SampleKind::Grid) return grid_sample(box, cfg.sample.n);
  return maximin_lhs(box, cfg.sample.n, cfg.sample.seed);
}

std::vector<Param> test_points(const BenchConfig &cfg, const ParameterBox &box,
                               const std::vector<const std::vector<Param> *> &avoid) {
  std::set<Param> taken;
  for (const auto *set : avoid) taken.insert(set->begin(), set->end());
  auto points = uniform_points(box, cfg.n_test, cfg.test_seed);
  Rng rng(cfg.test_seed ^ 0x9e3779b97f4a7c15ULL);
  for (auto &p : points) {
    while (taken.count(p) != 0) {
      Param u(static_cast<std::size_t>(box.dim()));
      for (double &x : u) x = rng.uniform();
      p = box.from_unit(u);
    }
    taken.insert(p);
  }
  return points;
}

BenchRow failed_row(Method method, int q, Quantity quantity, const std::string &why) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::cerr << "bench: " << to_string(method) << " at Q=" << q << " failed: " << why << "\n";
  return BenchRow{method, q, quantity, nan, nan, nan, nan, why};
}

template <class Eval>
BenchRow score(Method method, int q, Quantity quantity, const TestSet &tests, Eval &&eval) {
  const std::size_t n = tests.points.size();
  std::vector<std::pair<double, double>> errs(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) errs[t] = rel_errors(tests.exact[t], eval(tests.points[t]));
  });
  BenchRow row{method, q, quantity, 0.0, 0.0, 0.0, 0.0, {}};
  for (const auto &[l2, linf] : errs) {
    row.mean_rel_l2 += l2;
    row.mean_rel_linf += linf;
    row.max_rel_l2 = std::max(row.max_rel_l2, l2);
  }
  row.mean_rel_l2 /= static_cast<double>(n);
  row.mean_rel_linf /= static_cast<double>(n);
  if (!std::isfinite(row.mean_rel_l2) || !std::isfinite(row.mean_rel_linf) || !std::isfinite(row.max_rel_l2)) {
    throw NumericalError("non-finite error statistic");
  }
  return row;
}

Matrix solve_snapshots(const AffineFamily &fam, const std::vector<Param> &mus, const Vector &rhs) {
  Matrix s(fam.size(), static_cast<Eigen::Index>(mus.size()));
  parallel_for(mus.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) s.col(static_cast<Eigen::Index>(i)) = exact_solve(fam, mus[i], rhs);
  });
  return s;
}

}  // namespace

BenchReport run_convergence(const BenchConfig &cfg) { return run_convergence(cfg, make_family(cfg.problem)); }

BenchReport run_convergence(const BenchConfig &cfg, const AffineFamily &fam) {
  const Quantity quantity = cfg.quantity;
  const bool force_k0 = cfg.force_k0.value_or(quantity == Quantity::Logdet);
  std::optional<Vector> rhs;
  if (quantity == Quantity::Solve) {
    if (!fam.rhs()) throw UsageError("bench: solve quantity needs a family with a right-hand side");
    rhs = fam.rhs();
  }
  if (quantity == Quantity::Logdet && !fam.spd_hint()) throw UsageError("bench: logdet needs an SPD family");

  const SampleSet sample = make_sample(cfg, fam.box());

  struct Plan {
    int m;
    int n_max;
  };
  std::vector<Plan> plans;
  for (const auto &b : cfg.budgets) {
    if (b.m > 0) {
      plans.push_back({b.m, static_cast<int>(count_kappa(b.m, fam.d()))});
    } else {
      int m = 1;
      while (count_kappa(m, fam.d()) < b.q) ++m;
      plans.push_back({m, b.q});
    }
  }

  // Ridge designs are drawn up front so the test set can avoid them.
  std::vector<std::vector<Param>> designs;
  const bool has_ridge = std::find(cfg.methods.begin(), cfg.methods.end(), Method::Ridge) != cfg.methods.end();

  // EIM models first: the selected parameters are needed for the disjointness check.
  std::vector<std::optional<EimModel>> models(plans.size());
  std::vector<std::string> model_errors(plans.size());
  std::vector<double> model_seconds(plans.size(), 0.0);
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto start = Clock::now();
    try {
      EimOptions opts;
      opts.tol_rel = cfg.tol;
      opts.n_max = plans[i].n_max;
      opts.force_k0 = force_k0;
      models[i].emplace(eim_offline(fam, plans[i].m, sample, opts));
    } catch (const Error &e) {
      model_errors[i] = e.what();
    }
    model_seconds[i] = std::chrono::duration<double>(Clock::now() - start).count();
    const int q = models[i] ? models[i]->size() : plans[i].n_max;
    if (has_ridge) designs.push_back(q >= 2 ? maximin_lhs(fam.box(), q, cfg.doe_seed).points : std::vector<Param>{});
  }

  std::vector<const std::vector<Param> *> avoid{&sample.points};
  for (const auto &d : designs) avoid.push_back(&d);
  TestSet tests;
  tests.points = test_points(cfg, fam.box(), avoid);
  tests.exact.resize(tests.points.size());
  parallel_for(tests.points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) tests.exact[t] = exact_quantity(fam, tests.points[t], quantity, rhs);
  });

  BenchReport report;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const int q = models[i] ? models[i]->size() : plans[i].n_max;
    for (Method method : cfg.methods) {
      const auto start = Clock::now();
      try {
        if (method != Method::Ridge && !models[i]) throw NumericalError(model_errors[i]);
        BenchRow row;
        switch (method) {
          case Method::Proposed: {
            auto model = std::make_shared<const EimModel>(*models[i]);
            const Surrogate s = build_surrogate(model, fam, quantity, rhs);
            row = score(method, q, quantity, tests, [&](const Param &mu) { return s.eval(mu); });
            break;
          }
          case Method::Frobenius: {
            const FrobPrecomp pre = frob_build(fam, models[i]->selected_mu());
            row = score(method, q, quantity, tests, [&](const Param &mu) -> QuantityValue {
              const Vector lambda = frob_lambda(pre, fam, mu);
              Matrix p = Matrix::Zero(fam.size(), fam.size());
              for (int l = 0; l < pre.size(); ++l) p += lambda[l] * pre.inverses[static_cast<std::size_t>(l)];
              if (quantity == Quantity::Inverse) return p;
              return Vector(p * *rhs);
            });
            break;
          }
          case Method::Pod: {
            const Matrix snaps = solve_snapshots(fam, models[i]->selected_mu(), *rhs);
            const PodGalerkin pod(fam, pod_build(snaps, cfg.energy_tol), *rhs);
            row = score(method, q, quantity, tests, [&](const Param &mu) -> QuantityValue { return pod.solve(mu); });
            break;
          }
          case Method::Ridge: {
            SampleSet doe;
            doe.points = designs[i];
            doe.kind = SampleKind::Lhs;
            doe.seed = cfg.doe_seed;
            if (doe.size() < 2) throw UsageError("ridge needs a design of at least two points");
            if (quantity == Quantity::Logdet) {
              Matrix y(static_cast<Eigen::Index>(doe.size()), 1);
              for (std::size_t t = 0; t < doe.size(); ++t) {
                y(static_cast<Eigen::Index>(t), 0) = exact_logdet(fam, doe.points[t]);
              }
              const double h = ridge_select_bandwidth(doe, fam.box(), y, cfg.ridge_reg);
              const RidgeModel rm = ridge_fit(doe, fam.box(), y, h, cfg.ridge_reg);
              row = score(method, q, quantity, tests,
                          [&](const Param &mu) -> QuantityValue { return ridge_predict(rm, mu)[0]; });
            } else {
              const Matrix snaps = solve_snapshots(fam, doe.points, *rhs);
              const PodBasis basis = pod_build(snaps, cfg.energy_tol);
              const Matrix coeffs = (basis.vectors.transpose() * snaps).transpose();
              const double h = ridge_select_bandwidth(doe, fam.box(), coeffs, cfg.ridge_reg);
              const RidgeModel rm = ridge_fit(doe, fam.box(), coeffs, h, cfg.ridge_reg);
              row = score(method, q, quantity, tests, [&](const Param &mu) -> QuantityValue {
                return Vector(basis.vectors * ridge_predict(rm, mu));
              });
            }
            break;
          }
        }
        double seconds = std::chrono::duration<double>(Clock::now() - start).count();
        if (method != Method::Ridge) seconds += model_seconds[i];
        row.wall_seconds = cfg.timing ? seconds : 0.0;
        report.rows.push_back(row);
      } catch (const Error &e) {
        report.rows.push_back(failed_row(method, q, quantity, e.what()));
      }
    }
  }

  std::stable_sort(report.rows.begin(), report.rows.end(), [](const BenchRow &a, const BenchRow &b) {
    const std::string ma = to_string(a.method);
    const std::string mb = to_string(b.method);
    if (ma != mb) return ma < mb;
    return a.q < b.q;
  });

  const std::string canon = bench_config_json(cfg);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
  report.metadata = {
      {"tool", "pmeim 0.1.0"},
      {"config_hash", hash},
      {"config", canon},
      {"problem", cfg.problem.family_path.empty() ? to_string(cfg.problem.kind) : cfg.problem.family_path.string()},
      {"sample_seed", std::to_string(cfg.sample.seed)},
      {"test_seed", std::to_string(cfg.test_seed)},
      {"doe_seed", std::to_string(cfg.doe_seed)},
      {"doe", "lhs-maximin"},
      {"baseline_parameters", "pod and frobenius reuse the EIM-selected parameters; ridge uses the lhs-maximin design"},
  };
  return report;
}

std::string report_csv(const BenchReport &report) {
  std::string out = "method,Q,quantity,mean_rel_l2,mean_rel_linf,max_rel_l2,wall_seconds\n";
  for (const auto &r : report.rows) {
    out += to_string(r.method) + "," + std::to_string(r.q) + "," + to_string(r.quantity) + "," + fmt(r.mean_rel_l2) +
           "," + fmt(r.mean_rel_linf) + "," + fmt(r.max_rel_l2) + "," + fmt(r.wall_seconds) + "\n";
  }
  return out;
}

void export_csv(const BenchReport &report, const std::filesystem::path &path) {
  if (report.rows.empty()) throw UsageError("refusing to export an empty report");
  const std::string csv = report_csv(report);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << csv;
  if (!out) throw IoError("write failed: " + path.string());
  ojson meta;
  for (const auto &[k, v] : report.metadata) meta[k] = v;
  ojson errors = ojson::array();
  for (const auto &r : report.rows) {
    if (!r.error.empty()) errors.push_back({{"method", to_string(r.method)}, {"Q", r.q}, {"error", r.error}});
  }
  meta["failures"] = errors;
  std::ofstream side(path.string() + ".meta.json", std::ios::trunc);
  if (!side) throw IoError("cannot write " + path.string() + ".meta.json");
  side << meta.dump(2) << "\n";
}

}  // namespace pmeim

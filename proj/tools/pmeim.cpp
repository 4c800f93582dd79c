// SPDX-License-Identifier: Apache-2.0
// Command-line front end: offline, eval, bench, doe, gen, validate.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "pmeim/bench.hpp"
#include "pmeim/eim.hpp"
#include "pmeim/error.hpp"
#include "pmeim/generators.hpp"
#include "pmeim/model_io.hpp"
#include "pmeim/parallel.hpp"
#include "pmeim/sampling.hpp"
#include "pmeim/sparse.hpp"
#include "pmeim/surrogate.hpp"

namespace {

using namespace pmeim;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_mu(const std::string &text) {
  std::vector<double> mu;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      mu.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw UsageError("--mu: cannot parse '" + item + "'");
    }
  }
  if (mu.empty()) throw UsageError("--mu: empty parameter");
  return mu;
}

struct OfflineArgs {
  std::string config, quantity = "solve", rhs, out;
  int m = 1;
  bool force_k0 = false;
  int sample_n = 2048;
  std::uint64_t sample_seed = 0;
  double tol = 1e-12;
  int n_max = 0;
};

int run_offline(const OfflineArgs &a) {
  const AffineFamily fam = load_family(a.config);
  const Quantity q = parse_quantity(a.quantity);
  std::optional<Vector> rhs;
  if (!a.rhs.empty()) rhs = read_matrix_market_vector(a.rhs);
  const SampleSet sample = maximin_lhs(fam.box(), a.sample_n, a.sample_seed);
  EimOptions opts;
  opts.tol_rel = a.tol;
  opts.n_max = a.n_max;
  opts.force_k0 = a.force_k0 || q == Quantity::Logdet;
  auto model = std::make_shared<const EimModel>(eim_offline(fam, a.m, sample, opts));
  const Surrogate s = build_surrogate(model, fam, q, rhs);
  save_model(a.out, *model, &s);
  std::cerr << "selected " << model->size() << " of " << count_kappa(a.m, fam.d()) << " terms\n";
  return 0;
}

int run_eval(const std::string &model_path, const std::string &mu_text, const std::string &out_path) {
  const LoadedModel loaded = load_model(model_path);
  const auto mu = parse_mu(mu_text);
  if (static_cast<int>(mu.size()) != loaded.model->r()) {
    throw UsageError("--mu has " + std::to_string(mu.size()) + " components, model expects " +
                     std::to_string(loaded.model->r()));
  }
  std::ostringstream out;
  if (!loaded.surrogate) {
    const Vector lambda = loaded.model->lambda(mu);
    out << "l,lambda\n";
    for (Eigen::Index l = 0; l < lambda.size(); ++l) out << l + 1 << "," << num(lambda[l]) << "\n";
  } else {
    const QuantityValue v = loaded.surrogate->eval(mu);
    if (const auto *x = std::get_if<Vector>(&v)) {
      out << "i,u\n";
      for (Eigen::Index i = 0; i < x->size(); ++i) out << i + 1 << "," << num((*x)[i]) << "\n";
    } else if (const auto *m = std::get_if<Matrix>(&v)) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index j = 0; j < m->cols(); ++j) out << (j ? "," : "") << num((*m)(i, j));
        out << "\n";
      }
    } else {
      out << "logdet\n" << num(std::get<double>(v)) << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(out_path, std::ios::trunc);
    if (!f) throw IoError("cannot write " + out_path);
    f << out.str();
  }
  return 0;
}

int run_validate(const std::string &level) {
  ValidateLevel lv;
  if (level == "fast") {
    lv = ValidateLevel::Fast;
  } else if (level == "full") {
    lv = ValidateLevel::Full;
  } else {
    throw UsageError("--level must be fast or full");
  }
  const auto results = validate_suite(lv);
  int failed = 0;
  for (const auto &r : results) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << "  " << r.detail << "\n";
    failed += r.passed ? 0 : 1;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Nonintrusive EIM surrogates for affinely parametrized matrix families"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads (0: all cores)");

  OfflineArgs off;
  auto *offline = app.add_subcommand("offline", "Run the greedy and store a surrogate model");
  offline->add_option("--config", off.config, "Family JSON")->required();
  offline->add_option("--m", off.m, "Maximum multi-index weight")->required()->check(CLI::PositiveNumber);
  offline->add_flag("--force-k0", off.force_k0, "Select the zero multi-index first");
  offline->add_option("--sample-n", off.sample_n, "Training sample size")->check(CLI::PositiveNumber);
  offline->add_option("--sample-seed", off.sample_seed, "Training sample seed");
  offline->add_option("--tol", off.tol, "Relative stopping tolerance")->check(CLI::NonNegativeNumber);
  offline->add_option("--n-max", off.n_max, "Maximum number of terms (0: no limit)")->check(CLI::NonNegativeNumber);
  offline->add_option("--quantity", off.quantity, "solve, inverse or logdet")
      ->check(CLI::IsMember({"solve", "inverse", "logdet"}));
  offline->add_option("--rhs", off.rhs, "Right-hand side (MatrixMarket)");
  offline->add_option("--out", off.out, "Model JSON")->required();

  std::string model_path, mu_text, eval_out;
  auto *eval = app.add_subcommand("eval", "Evaluate a stored model at one parameter");
  eval->add_option("--model", model_path, "Model JSON")->required();
  eval->add_option("--mu", mu_text, "Comma-separated parameter")->required();
  eval->add_option("--out", eval_out, "Output CSV (default stdout)");

  std::string bench_config, bench_out;
  bool timing = false;
  auto *bench = app.add_subcommand("bench", "Run a convergence benchmark");
  bench->add_option("--config", bench_config, "Bench JSON")->required();
  bench->add_option("--out", bench_out, "Report CSV")->required();
  bench->add_flag("--timing", timing, "Record wall-clock seconds");

  int doe_dim = 0, doe_n = 0;
  std::uint64_t doe_seed = 0;
  std::string doe_out;
  auto *doe = app.add_subcommand("doe", "Maximin Latin hypercube on the unit cube");
  doe->add_option("--dim", doe_dim, "Dimension")->required()->check(CLI::PositiveNumber);
  doe->add_option("--n", doe_n, "Number of points")->required()->check(CLI::Range(2, 1 << 24));
  doe->add_option("--seed", doe_seed, "Seed")->required();
  doe->add_option("--out", doe_out, "Output CSV")->required();

  std::string problem, gen_out;
  int gen_n = 0;
  std::uint64_t gen_seed = 0;
  GenOptions gen_opts;
  auto *gen = app.add_subcommand("gen", "Write a generated family");
  gen->add_option("--problem", problem, "laplace2d_thermal, logdet_thermal, heat_capacity10 or fiber_block14")
      ->required();
  gen->add_option("--n", gen_n, "Grid points per direction")->required();
  gen->add_option("--seed", gen_seed, "Seed")->required();
  gen->add_option("--experiment", gen_opts.experiment, "heat_capacity10 coefficient pattern (1 or 2)");
  gen->add_option("--box-index", gen_opts.box_index, "heat_capacity10 box (0..4)");
  gen->add_option("--rel-width", gen_opts.rel_width, "fiber_block14 relative box width");
  gen->add_option("--out", gen_out, "Output directory")->required();

  std::string level = "fast";
  auto *validate = app.add_subcommand("validate", "Run the built-in property checks");
  validate->add_option("--level", level, "fast or full");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    set_thread_count(threads);
    if (*offline) return run_offline(off);
    if (*eval) return run_eval(model_path, mu_text, eval_out);
    if (*bench) {
      BenchConfig cfg = load_bench_config(bench_config);
      if (timing) cfg.timing = true;
      export_csv(run_convergence(cfg), bench_out);
      return 0;
    }
    if (*doe) {
      write_doe_csv(doe_out, maximin_lhs(doe_dim, doe_n, doe_seed));
      return 0;
    }
    if (*gen) {
      save_family(gen_problem(parse_problem_kind(problem), gen_n, gen_seed, gen_opts), gen_out);
      return 0;
    }
    if (*validate) return run_validate(level);
  } catch (const IoError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NumericalError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

// SPDX-License-Identifier: Apache-2.0

#include "pmeim/family.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <string>

#include "pmeim/error.hpp"
#include "pmeim/rng.hpp"

namespace pmeim {

ParameterBox::ParameterBox(std::vector<std::pair<double, double>> intervals) : intervals_(std::move(intervals)) {
  for (const auto &[lo, hi] : intervals_) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      throw UsageError("parameter box intervals must be finite with lo < hi");
    }
  }
}

bool ParameterBox::contains(std::span<const double> mu, double rel_tol) const {
  if (mu.size() != intervals_.size()) return false;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto [lo, hi] = intervals_[i];
    const double slack = rel_tol * std::max({1.0, std::abs(lo), std::abs(hi)});
    if (mu[i] < lo - slack || mu[i] > hi + slack) return false;
  }
  return true;
}

Param ParameterBox::midpoint() const {
  Param mid(intervals_.size());
  for (std::size_t i = 0; i < mid.size(); ++i) mid[i] = 0.5 * (intervals_[i].first + intervals_[i].second);
  return mid;
}

Param ParameterBox::from_unit(std::span<const double> u) const {
  Param mu(intervals_.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto [lo, hi] = intervals_[i];
    mu[i] = lo + (hi - lo) * u[i];
  }
  return mu;
}

Param ParameterBox::to_unit(std::span<const double> mu) const {
  Param u(intervals_.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto [lo, hi] = intervals_[i];
    u[i] = (mu[i] - lo) / (hi - lo);
  }
  return u;
}

std::vector<Param> ParameterBox::corners() const {
  if (dim() > 20) throw UsageError("too many box dimensions to enumerate corners");
  std::vector<Param> out;
  const std::size_t count = std::size_t{1} << intervals_.size();
  out.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    Param p(intervals_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = (mask >> i & 1U) ? intervals_[i].second : intervals_[i].first;
    out.push_back(std::move(p));
  }
  return out;
}

AffineFamily::AffineFamily(std::vector<SparseMatrix> terms, std::vector<CoeffExpr> coeffs, ParameterBox box,
                           Options opts, std::optional<Vector> rhs)
    : terms_(std::move(terms)), coeffs_(std::move(coeffs)), box_(std::move(box)), opts_(opts), rhs_(std::move(rhs)) {
  if (terms_.empty()) throw UsageError("an affine family needs at least one term");
  if (coeffs_.size() != terms_.size()) {
    throw UsageError("family has " + std::to_string(terms_.size()) + " terms but " + std::to_string(coeffs_.size()) +
                     " coefficient expressions");
  }
  const Eigen::Index n = terms_.front().rows();
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    if (terms_[l].rows() != n || terms_[l].cols() != n) {
      throw UsageError("shape mismatch: term " + std::to_string(l + 1) + " is " + std::to_string(terms_[l].rows()) +
                       "x" + std::to_string(terms_[l].cols()) + ", expected " + std::to_string(n) + "x" +
                       std::to_string(n));
    }
    terms_[l].makeCompressed();
  }
  for (std::size_t l = 0; l < coeffs_.size(); ++l) {
    if (coeffs_[l].max_param_index() > box_.dim()) {
      throw UsageError("coefficient " + std::to_string(l + 1) + " references mu" +
                       std::to_string(coeffs_[l].max_param_index()) + " but the box has dimension " +
                       std::to_string(box_.dim()));
    }
  }
  if (rhs_ && rhs_->size() != n) throw UsageError("right-hand side length does not match the matrix order");

  std::vector<Eigen::Triplet<double>> trip;
  for (const auto &t : terms_) {
    for (int row = 0; row < t.outerSize(); ++row) {
      for (SparseMatrix::InnerIterator it(t, row); it; ++it) trip.emplace_back(it.row(), it.col(), 0.0);
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();
  slots_.resize(terms_.size());
  const auto *outer = pattern_.outerIndexPtr();
  const auto *inner = pattern_.innerIndexPtr();
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    const auto &t = terms_[l];
    auto &slot = slots_[l];
    slot.reserve(static_cast<std::size_t>(t.nonZeros()));
    for (int row = 0; row < t.outerSize(); ++row) {
      for (SparseMatrix::InnerIterator it(t, row); it; ++it) {
        const auto *pos = std::lower_bound(inner + outer[row], inner + outer[row + 1], it.col());
        slot.push_back(pos - inner);
      }
    }
  }

  // Coefficients must be finite on the box; probe corners, midpoint and scattered interior points.
  std::vector<Param> probes;
  if (box_.dim() <= 12) probes = box_.corners();
  probes.push_back(box_.midpoint());
  Rng rng(0x5eed);
  for (int s = 0; s < 64 && box_.dim() > 0; ++s) {
    Param u(static_cast<std::size_t>(box_.dim()));
    for (double &x : u) x = rng.uniform();
    probes.push_back(box_.from_unit(u));
  }
  for (const auto &p : probes) (void)eval_coeffs(p);

  if (opts_.spd) {
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(Eigen::SparseMatrix<double>(assemble(box_.midpoint())));
    if (llt.info() != Eigen::Success) {
      throw NumericalError("family marked SPD but Cholesky fails at the box midpoint");
    }
  }
}

Vector AffineFamily::eval_coeffs(std::span<const double> mu) const {
  if (static_cast<int>(mu.size()) != r()) {
    throw UsageError("parameter has dimension " + std::to_string(mu.size()) + ", family expects " +
                     std::to_string(r()));
  }
  Vector alpha(d());
  for (int l = 0; l < d(); ++l) {
    alpha[l] = coeffs_[static_cast<std::size_t>(l)].eval(mu);
    if (!std::isfinite(alpha[l])) {
      throw NumericalError("coefficient " + std::to_string(l + 1) + " (" +
                           coeffs_[static_cast<std::size_t>(l)].source() + ") is not finite");
    }
  }
  return alpha;
}

SparseMatrix AffineFamily::assemble_from_coeffs(const Vector &alpha) const {
  if (alpha.size() != d()) throw UsageError("coefficient vector length does not match the number of terms");
  SparseMatrix a = pattern_;
  double *values = a.valuePtr();
  for (std::size_t l = 0; l < terms_.size(); ++l) {
    const double c = alpha[static_cast<Eigen::Index>(l)];
    const double *tv = terms_[l].valuePtr();
    const auto &slot = slots_[l];
    for (std::size_t e = 0; e < slot.size(); ++e) values[slot[e]] += c * tv[e];
  }
  return a;
}

double g_eval(std::span<const double> alpha, const MultiIndex &k) {
  if (static_cast<int>(alpha.size()) != k.size()) throw UsageError("g_eval: alpha and k lengths differ");
  double g = 1.0;
  for (int l = 0; l < k.size(); ++l) {
    const double a = alpha[static_cast<std::size_t>(l)];
    for (int p = 0; p < k[l]; ++p) g *= a;
  }
  if (!std::isfinite(g)) throw NumericalError("g(k, mu) is not finite");
  return g;
}

namespace {

std::filesystem::path resolve(const std::filesystem::path &base, const std::string &p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

AffineFamily load_family(const std::filesystem::path &config_path) {
  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open family config " + config_path.string());
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError("family config " + config_path.string() + " is not valid JSON: " + e.what());
  }
  const auto base = config_path.parent_path();
  try {
    std::vector<SparseMatrix> terms;
    for (const auto &p : cfg.at("terms")) terms.push_back(read_matrix_market(resolve(base, p.get<std::string>())));
    std::vector<CoeffExpr> coeffs;
    for (const auto &c : cfg.at("coeffs")) coeffs.push_back(CoeffExpr::parse(c.get<std::string>()));
    std::vector<std::pair<double, double>> intervals;
    for (const auto &iv : cfg.at("param_box")) {
      if (!iv.is_array() || iv.size() != 2) throw UsageError("param_box entries must be [lo, hi] pairs");
      intervals.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    std::optional<Vector> rhs;
    if (cfg.contains("rhs") && !cfg["rhs"].is_null()) {
      rhs = read_matrix_market_vector(resolve(base, cfg["rhs"].get<std::string>()));
    }
    AffineFamily::Options opts;
    opts.spd = cfg.value("spd", false);
    opts.symmetric = cfg.value("symmetric", opts.spd);
    return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox(std::move(intervals)), opts,
                        std::move(rhs));
  } catch (const nlohmann::json::exception &e) {
    throw UsageError("family config " + config_path.string() + ": " + e.what());
  }
}

void save_family(const AffineFamily &fam, const std::filesystem::path &dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
  nlohmann::ordered_json cfg;
  cfg["terms"] = nlohmann::json::array();
  for (int l = 0; l < fam.d(); ++l) {
    const std::string name = "A" + std::to_string(l + 1) + ".mtx";
    write_matrix_market(dir / name, fam.terms()[static_cast<std::size_t>(l)], fam.symmetric_hint());
    cfg["terms"].push_back(name);
  }
  cfg["coeffs"] = nlohmann::json::array();
  for (const auto &c : fam.coeffs()) cfg["coeffs"].push_back(c.source());
  cfg["param_box"] = nlohmann::json::array();
  for (const auto &[lo, hi] : fam.box().intervals()) cfg["param_box"].push_back({lo, hi});
  if (fam.rhs()) {
    write_matrix_market_vector(dir / "rhs.mtx", *fam.rhs());
    cfg["rhs"] = "rhs.mtx";
  }
  cfg["spd"] = fam.spd_hint();
  cfg["symmetric"] = fam.symmetric_hint();
  std::ofstream out(dir / "family.json");
  if (!out) throw IoError("cannot write " + (dir / "family.json").string());
  out << cfg.dump(2) << "\n";
}

}  // namespace pmeim

#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "pmeim/family.hpp"
#include "pmeim/rng.hpp"

namespace testutil {

using namespace pmeim;

// Terms B^T B + shift I with entries of B uniform in [-1, 1]; coefficients mu1..mud on [lo, hi]^d.
inline AffineFamily random_spd_family(int n, int d, std::uint64_t seed, double lo = 1.0, double hi = 2.0,
                                      double shift = 1.0) {
  Rng rng(seed);
  std::vector<SparseMatrix> terms;
  std::vector<CoeffExpr> coeffs;
  std::vector<std::pair<double, double>> box;
  for (int l = 0; l < d; ++l) {
    Matrix b(n, n);
    for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = rng.uniform(-1.0, 1.0);
    const Matrix a = b.transpose() * b + shift * n * Matrix::Identity(n, n);
    terms.push_back(a.sparseView());
    coeffs.push_back(CoeffExpr::parse("mu" + std::to_string(l + 1)));
    box.emplace_back(lo, hi);
  }
  return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox(box), {true, true},
                      Vector(Vector::Ones(n)));
}

inline double rel_fro(const Matrix &a, const Matrix &b) { return (a - b).norm() / b.norm(); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string &tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("pmeim-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

// SPDX-License-Identifier: Apache-2.0

#include "pmeim/sparse.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pmeim/error.hpp"

namespace pmeim {

namespace {

struct Header {
  bool coordinate = true;
  bool symmetric = false;
  bool pattern = false;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

Header read_header(std::istream &in, const std::filesystem::path &path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty MatrixMarket file: " + path.string());
  std::istringstream hs(line);
  std::string banner, object, format, field, symmetry;
  hs >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix") {
    throw IoError("malformed MatrixMarket header in " + path.string());
  }
  Header h;
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format == "coordinate") {
    h.coordinate = true;
  } else if (format == "array") {
    h.coordinate = false;
  } else {
    throw IoError("unsupported MatrixMarket format '" + format + "' in " + path.string());
  }
  if (field == "pattern") {
    h.pattern = true;
  } else if (field != "real" && field != "integer" && field != "double") {
    throw IoError("unsupported MatrixMarket field '" + field + "' in " + path.string());
  }
  if (symmetry == "symmetric") {
    h.symmetric = true;
  } else if (symmetry != "general") {
    throw IoError("unsupported MatrixMarket symmetry '" + symmetry + "' in " + path.string());
  }
  return h;
}

// Skips comment lines and returns the size line.
std::string next_data_line(std::istream &in) {
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '%') continue;
    return line;
  }
  return {};
}

std::ifstream open_or_throw(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

}  // namespace

SparseMatrix read_matrix_market(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  const Header h = read_header(in, path);
  if (!h.coordinate) throw IoError("expected coordinate format for a matrix: " + path.string());
  std::istringstream size_line(next_data_line(in));
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz) || rows <= 0 || cols <= 0 || nnz < 0) {
    throw IoError("malformed MatrixMarket size line in " + path.string());
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(h.symmetric ? 2 * nnz : nnz));
  for (long e = 0; e < nnz; ++e) {
    long i = 0, j = 0;
    double v = 1.0;
    std::istringstream ls(next_data_line(in));
    if (!(ls >> i >> j) || (!h.pattern && !(ls >> v))) {
      throw IoError("truncated MatrixMarket entry list in " + path.string());
    }
    if (i < 1 || i > rows || j < 1 || j > cols) {
      throw IoError("MatrixMarket index out of range in " + path.string());
    }
    if (!std::isfinite(v)) throw IoError("non-finite MatrixMarket value in " + path.string());
    triplets.emplace_back(i - 1, j - 1, v);
    if (h.symmetric && i != j) triplets.emplace_back(j - 1, i - 1, v);
  }
  SparseMatrix a(rows, cols);
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

Vector read_matrix_market_vector(const std::filesystem::path &path) {
  auto in = open_or_throw(path);
  const Header h = read_header(in, path);
  std::istringstream size_line(next_data_line(in));
  if (!h.coordinate) {
    long rows = 0, cols = 0;
    if (!(size_line >> rows >> cols) || rows <= 0 || cols != 1) {
      throw IoError("expected an n x 1 MatrixMarket array in " + path.string());
    }
    Vector v(rows);
    for (long i = 0; i < rows; ++i) {
      std::istringstream ls(next_data_line(in));
      if (!(ls >> v[i])) throw IoError("truncated MatrixMarket array in " + path.string());
    }
    return v;
  }
  long rows = 0, cols = 0, nnz = 0;
  if (!(size_line >> rows >> cols >> nnz) || rows <= 0 || cols != 1) {
    throw IoError("expected a single-column MatrixMarket matrix in " + path.string());
  }
  Vector v = Vector::Zero(rows);
  for (long e = 0; e < nnz; ++e) {
    long i = 0, j = 0;
    double x = 0.0;
    std::istringstream ls(next_data_line(in));
    if (!(ls >> i >> j >> x) || i < 1 || i > rows || j != 1) {
      throw IoError("malformed MatrixMarket vector entry in " + path.string());
    }
    v[i - 1] += x;
  }
  return v;
}

void write_matrix_market(const std::filesystem::path &path, const SparseMatrix &a, bool symmetric) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  long nnz = 0;
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (!symmetric || it.col() <= it.row()) ++nnz;
    }
  }
  out << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
  out << a.rows() << " " << a.cols() << " " << nnz << "\n";
  char buf[64];
  for (int r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      if (symmetric && it.col() > it.row()) continue;
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() + 1 << " " << it.col() + 1 << " " << buf << "\n";
    }
  }
  if (!out) throw IoError("write failed for " + path.string());
}

void write_matrix_market_vector(const std::filesystem::path &path, const Vector &v) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "%%MatrixMarket matrix array real general\n" << v.size() << " 1\n";
  char buf[64];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    out << buf << "\n";
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace pmeim

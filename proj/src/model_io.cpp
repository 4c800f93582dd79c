// SPDX-License-Identifier: Apache-2.0

#include "pmeim/model_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pmeim/error.hpp"

namespace pmeim {

using ojson = nlohmann::ordered_json;

namespace {

ojson rows_of(const Matrix &m) {
  ojson out = ojson::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_of(const ojson &j, Eigen::Index n, const char *what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != n) {
    throw IoError(std::string("model file: ") + what + " must have " + std::to_string(n) + " rows");
  }
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto &row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw IoError(std::string("model file: ") + what + " must be square");
    }
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) v = __builtin_bswap64(v);
  return v;
}

}  // namespace

std::string model_to_json(const EimModel &model, const Surrogate *surrogate, const std::string &payload_ref) {
  ojson j;
  j["version"] = kModelVersion;
  j["d"] = model.d();
  j["m"] = model.m();
  j["r"] = model.r();
  j["forced_k0"] = model.forced_k0();
  ojson coeffs = ojson::array();
  for (const auto &c : model.coeffs()) coeffs.push_back(c.source());
  j["coeffs"] = std::move(coeffs);
  ojson box = ojson::array();
  for (const auto &[lo, hi] : model.box().intervals()) box.push_back({lo, hi});
  j["param_box"] = std::move(box);
  ojson ks = ojson::array();
  for (const auto &k : model.selected_k()) ks.push_back(k.entries());
  j["selected_k"] = std::move(ks);
  j["selected_mu"] = model.selected_mu();
  j["F"] = rows_of(model.f());
  j["B"] = rows_of(model.b());
  j["residual_history"] = model.residual_history();
  j["payload_ref"] = payload_ref.empty() ? ojson(nullptr) : ojson(payload_ref);
  if (surrogate != nullptr) {
    j["quantity"] = to_string(surrogate->mode());
    switch (surrogate->mode()) {
      case Quantity::Solve: {
        const Matrix &s = surrogate->solve_snapshots();
        ojson payload = ojson::array();
        for (Eigen::Index l = 0; l < s.cols(); ++l) {
          payload.push_back(std::vector<double>(s.col(l).data(), s.col(l).data() + s.rows()));
        }
        j["payload"] = std::move(payload);
        break;
      }
      case Quantity::Inverse:
        j["payload_shape"] = {surrogate->inverse_snapshots().size(), surrogate->inverse_snapshots().front().rows(),
                              surrogate->inverse_snapshots().front().cols()};
        break;
      case Quantity::Logdet: {
        const Vector &s = surrogate->logdet_snapshots();
        j["payload"] = std::vector<double>(s.data(), s.data() + s.size());
        break;
      }
    }
  }
  return j.dump(1) + "\n";
}

void write_matrix_blocks(const std::filesystem::path &path, const std::vector<Matrix> &blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto &b : blocks) {
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
      for (Eigen::Index k = 0; k < b.cols(); ++k) {
        const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(b(i, k)));
        out.write(reinterpret_cast<const char *>(&bits), sizeof bits);
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

std::vector<Matrix> read_matrix_blocks(const std::filesystem::path &path, std::size_t count, Eigen::Index n) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uintmax_t>(in.tellg());
  in.seekg(0);
  if (bytes != count * static_cast<std::uintmax_t>(n * n) * 8u) {
    throw IoError(path.string() + ": size does not match the payload shape");
  }
  std::vector<Matrix> out(count, Matrix(n, n));
  for (auto &b : out) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index k = 0; k < n; ++k) {
        std::uint64_t bits = 0;
        in.read(reinterpret_cast<char *>(&bits), sizeof bits);
        b(i, k) = std::bit_cast<double>(to_little(bits));
      }
    }
  }
  if (!in) throw IoError("read failed: " + path.string());
  return out;
}

void save_model(const std::filesystem::path &path, const EimModel &model, const Surrogate *surrogate) {
  std::string ref;
  if (surrogate != nullptr && surrogate->mode() == Quantity::Inverse) {
    auto bin = path;
    bin.replace_extension(".bin");
    ref = bin.filename().string();
    write_matrix_blocks(bin, surrogate->inverse_snapshots());
  }
  const std::string text = model_to_json(model, surrogate, ref);
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

LoadedModel load_model(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ojson j;
  try {
    j = ojson::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path.string() + ": " + e.what());
  }
  try {
    if (j.at("version").get<int>() != kModelVersion) throw IoError(path.string() + ": unsupported model version");
    const int d = j.at("d").get<int>();
    const int m = j.at("m").get<int>();
    const int r = j.at("r").get<int>();
    std::vector<CoeffExpr> coeffs;
    for (const auto &c : j.at("coeffs")) coeffs.push_back(CoeffExpr::parse(c.get<std::string>()));
    std::vector<std::pair<double, double>> intervals;
    for (const auto &iv : j.at("param_box")) {
      if (!iv.is_array() || iv.size() != 2) throw IoError(path.string() + ": param_box entries must be [lo, hi]");
      intervals.emplace_back(iv[0].get<double>(), iv[1].get<double>());
    }
    if (static_cast<int>(coeffs.size()) != d || static_cast<int>(intervals.size()) != r) {
      throw IoError(path.string() + ": d or r disagrees with coeffs or param_box");
    }
    std::vector<MultiIndex> ks;
    for (const auto &k : j.at("selected_k")) ks.emplace_back(k.get<std::vector<int>>());
    auto mus = j.at("selected_mu").get<std::vector<Param>>();
    const auto n = static_cast<Eigen::Index>(ks.size());
    Matrix b = matrix_of(j.at("B"), n, "B");
    Matrix f = matrix_of(j.at("F"), n, "F");
    auto history = j.at("residual_history").get<std::vector<double>>();

    auto model = std::make_shared<const EimModel>(m, std::move(coeffs), ParameterBox(std::move(intervals)),
                                                  j.at("forced_k0").get<bool>(), std::move(ks), std::move(mus),
                                                  std::move(b), std::move(history));
    const double scale = std::max(1.0, f.cwiseAbs().maxCoeff());
    if ((model->f() - f).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw IoError(path.string() + ": stored F disagrees with the selected indices and parameters");
    }

    LoadedModel out{model, std::nullopt};
    if (!j.contains("quantity")) return out;
    const Quantity q = parse_quantity(j.at("quantity").get<std::string>());
    switch (q) {
      case Quantity::Solve: {
        const auto cols = j.at("payload").get<std::vector<std::vector<double>>>();
        if (static_cast<Eigen::Index>(cols.size()) != n) throw IoError(path.string() + ": payload length");
        const auto len = cols.empty() ? 0 : static_cast<Eigen::Index>(cols.front().size());
        Matrix s(len, n);
        for (Eigen::Index l = 0; l < n; ++l) {
          const auto &c = cols[static_cast<std::size_t>(l)];
          if (static_cast<Eigen::Index>(c.size()) != len) throw IoError(path.string() + ": ragged payload");
          s.col(l) = Eigen::Map<const Vector>(c.data(), len);
        }
        out.surrogate.emplace(q, model, std::move(s));
        break;
      }
      case Quantity::Inverse: {
        const auto ref = j.at("payload_ref");
        if (!ref.is_string()) throw IoError(path.string() + ": inverse payload needs payload_ref");
        const auto shape = j.at("payload_shape").get<std::vector<std::int64_t>>();
        if (shape.size() != 3 || shape[0] != n || shape[1] != shape[2]) {
          throw IoError(path.string() + ": bad payload_shape");
        }
        auto blocks = read_matrix_blocks(path.parent_path() / ref.get<std::string>(), static_cast<std::size_t>(n),
                                         static_cast<Eigen::Index>(shape[1]));
        out.surrogate.emplace(q, model, std::move(blocks));
        break;
      }
      case Quantity::Logdet: {
        const auto v = j.at("payload").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(v.size()) != n) throw IoError(path.string() + ": payload length");
        out.surrogate.emplace(q, model, Vector(Eigen::Map<const Vector>(v.data(), n)));
        break;
      }
    }
    return out;
  } catch (const nlohmann::json::exception &e) {
    throw IoError(path.string() + ": " + e.what());
  } catch (const UsageError &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace pmeim

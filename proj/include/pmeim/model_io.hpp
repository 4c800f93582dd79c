// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "pmeim/eim.hpp"
#include "pmeim/surrogate.hpp"

namespace pmeim {

inline constexpr int kModelVersion = 1;

struct LoadedModel {
  std::shared_ptr<const EimModel> model;
  std::optional<Surrogate> surrogate;
};

/// JSON text of a model, optionally with its surrogate payload. Inverse payloads are not
/// inlined; `payload_ref` names their sidecar file.
std::string model_to_json(const EimModel &model, const Surrogate *surrogate = nullptr,
                          const std::string &payload_ref = {});

/// Writes MODEL.json and, for inverse surrogates, MODEL.bin next to it.
void save_model(const std::filesystem::path &path, const EimModel &model, const Surrogate *surrogate = nullptr);

LoadedModel load_model(const std::filesystem::path &path);

/// Row-major little-endian doubles, one n x n block per matrix.
void write_matrix_blocks(const std::filesystem::path &path, const std::vector<Matrix> &blocks);
std::vector<Matrix> read_matrix_blocks(const std::filesystem::path &path, std::size_t count, Eigen::Index n);

}  // namespace pmeim

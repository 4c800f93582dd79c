// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "pmeim/family.hpp"

namespace pmeim {

enum class ProblemKind { Laplace2dThermal, LogdetThermal, HeatCapacity10, FiberBlock14 };

ProblemKind parse_problem_kind(std::string_view name);
std::string to_string(ProblemKind kind);

struct GenOptions {
  // heat_capacity10: coefficient pattern (1: alpha_{l+1} = mu_l, 2: alpha_{l+1} = 1 - exp(-mu_l))
  // and which of the five nested boxes to use (0 narrowest .. 4 widest).
  int experiment = 1;
  int box_index = 2;
  // fiber_block14: interval length relative to the reference Lame values.
  double rel_width = 0.10;
};

/// Desk-scale SPD families on regular grids with n nodes per direction.
///
/// laplace2d_thermal  mu1 K + mu2 M on the unit square, Neumann boundary, flux load on x = 0, box (1,4)^2.
/// logdet_thermal     same K, M with 0.045(1-exp(-mu1^2)) K + (1-exp(-mu2)) M.
/// heat_capacity10    3-D grid, Dirichlet on x = L, flux on x = 0; term 1 is M/10 + 370 K and terms
///                    2..11 are lumped masses weighted by the heat-capacity modes, 10 parameters.
/// fiber_block14      3-D grid clamped at z = 0 with six fiber columns; each of the 7 subdomains owns
///                    an isotropic and a z-directional stiffness term scaled by its two Lame parameters.
///
/// The seed only drives the fiber layout of fiber_block14; the other kinds are deterministic.
AffineFamily gen_problem(ProblemKind kind, int n, std::uint64_t seed, const GenOptions &opts = {});

}  // namespace pmeim

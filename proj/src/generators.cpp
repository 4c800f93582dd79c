// SPDX-License-Identifier: Apache-2.0

#include "pmeim/generators.hpp"

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "pmeim/error.hpp"
#include "pmeim/rng.hpp"

namespace pmeim {

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "laplace2d_thermal") return ProblemKind::Laplace2dThermal;
  if (name == "logdet_thermal") return ProblemKind::LogdetThermal;
  if (name == "heat_capacity10") return ProblemKind::HeatCapacity10;
  if (name == "fiber_block14") return ProblemKind::FiberBlock14;
  throw UsageError("unsupported problem kind '" + std::string(name) + "'");
}

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Laplace2dThermal:
      return "laplace2d_thermal";
    case ProblemKind::LogdetThermal:
      return "logdet_thermal";
    case ProblemKind::HeatCapacity10:
      return "heat_capacity10";
    case ProblemKind::FiberBlock14:
      return "fiber_block14";
  }
  return "?";
}

namespace {

// Structured node grid on [0, length]^dim with finite-volume weights: each node owns
// a control cell whose extent is h per direction, halved on the boundary.
struct Grid {
  int dim;
  int n;
  double length;
  double h;

  Grid(int dim_, int n_, double length_) : dim(dim_), n(n_), length(length_), h(length_ / (n_ - 1)) {}

  int nodes() const { return dim == 2 ? n * n : n * n * n; }

  std::array<int, 3> ijk(int node) const {
    return {node % n, (node / n) % n, dim == 3 ? node / (n * n) : 0};
  }

  int node(std::array<int, 3> c) const { return c[0] + n * c[1] + (dim == 3 ? n * n * c[2] : 0); }

  std::array<double, 3> coords(int node_id) const {
    const auto c = ijk(node_id);
    return {c[0] * h, c[1] * h, c[2] * h};
  }

  double extent(int coord) const { return (coord == 0 || coord == n - 1) ? 0.5 * h : h; }

  double volume(int node_id) const {
    const auto c = ijk(node_id);
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= extent(c[static_cast<std::size_t>(a)]);
    return v;
  }

  struct Edge {
    int a;
    int b;
    int axis;
    double conductance;
  };

  // Each undirected edge once; conductance is the shared face measure divided by h.
  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (int v = 0; v < nodes(); ++v) {
      const auto c = ijk(v);
      for (int axis = 0; axis < dim; ++axis) {
        if (c[static_cast<std::size_t>(axis)] + 1 >= n) continue;
        auto cn = c;
        ++cn[static_cast<std::size_t>(axis)];
        double face = 1.0;
        for (int b = 0; b < dim; ++b) {
          if (b != axis) face *= extent(c[static_cast<std::size_t>(b)]);
        }
        out.push_back({v, node(cn), axis, face / h});
      }
    }
    return out;
  }

  // Measure of the boundary facet at `axis` == 0 owned by node_id (0 for other nodes).
  double face_measure(int node_id, int axis, int side_coord) const {
    const auto c = ijk(node_id);
    if (c[static_cast<std::size_t>(axis)] != side_coord) return 0.0;
    double m = 1.0;
    for (int b = 0; b < dim; ++b) {
      if (b != axis) m *= extent(c[static_cast<std::size_t>(b)]);
    }
    return m;
  }
};

// Maps grid nodes to unknowns after removing Dirichlet nodes (-1 when eliminated).
struct DofMap {
  std::vector<int> dof;
  int count = 0;
};

DofMap make_dofs(const Grid &g, int fixed_axis, int fixed_coord) {
  DofMap m;
  m.dof.assign(static_cast<std::size_t>(g.nodes()), -1);
  for (int v = 0; v < g.nodes(); ++v) {
    if (fixed_axis >= 0 && g.ijk(v)[static_cast<std::size_t>(fixed_axis)] == fixed_coord) continue;
    m.dof[static_cast<std::size_t>(v)] = m.count++;
  }
  return m;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void add_edge(Triplets &t, const DofMap &m, int a, int b, double w) {
  const int i = m.dof[static_cast<std::size_t>(a)];
  const int j = m.dof[static_cast<std::size_t>(b)];
  if (i >= 0) t.emplace_back(i, i, w);
  if (j >= 0) t.emplace_back(j, j, w);
  if (i >= 0 && j >= 0) {
    t.emplace_back(i, j, -w);
    t.emplace_back(j, i, -w);
  }
}

SparseMatrix build(const Triplets &t, int n) {
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

std::vector<CoeffExpr> parse_all(std::initializer_list<const char *> srcs) {
  std::vector<CoeffExpr> out;
  for (const char *s : srcs) out.push_back(CoeffExpr::parse(s));
  return out;
}

AffineFamily thermal2d(int n, bool logdet) {
  const Grid g(2, n, 1.0);
  const DofMap m = make_dofs(g, -1, 0);
  Triplets kt, mt;
  for (const auto &e : g.edges()) add_edge(kt, m, e.a, e.b, e.conductance);
  Vector b = Vector::Zero(m.count);
  for (int v = 0; v < g.nodes(); ++v) {
    mt.emplace_back(v, v, g.volume(v));
    b[v] = g.face_measure(v, 0, 0);
  }
  std::vector<SparseMatrix> terms{build(kt, m.count), build(mt, m.count)};
  auto coeffs = logdet ? parse_all({"0.045*(1-exp(-mu1^2))", "1-exp(-mu2)"}) : parse_all({"mu1", "mu2"});
  return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox({{1.0, 4.0}, {1.0, 4.0}}),
                      {.symmetric = true, .spd = true}, std::move(b));
}

AffineFamily heat_capacity(int n, const GenOptions &opts) {
  if (opts.experiment != 1 && opts.experiment != 2) throw UsageError("heat_capacity10 experiment must be 1 or 2");
  if (opts.box_index < 0 || opts.box_index > 4) throw UsageError("heat_capacity10 box_index must be in 0..4");
  const double length = 10.0;
  const Grid g(3, n, length);
  const DofMap m = make_dofs(g, 0, n - 1);  // temperature fixed on x = L
  Triplets kt;
  for (const auto &e : g.edges()) add_edge(kt, m, e.a, e.b, e.conductance);
  const SparseMatrix stiffness = build(kt, m.count);

  using Mode = double (*)(double, double, double, double);
  static constexpr std::array<Mode, 10> modes{
      [](double x, double, double, double) { return std::cos(0.2 * x); },
      [](double, double y, double, double) { return std::cos(0.25 * y); },
      [](double, double, double z, double) { return std::cos(0.3 * z); },
      [](double x, double y, double, double) { return std::cos(0.2 * (x + y)); },
      [](double x, double, double z, double) { return std::cos(0.25 * (x + z)); },
      [](double, double y, double z, double) { return std::cos(0.3 * (y + z)); },
      [](double x, double, double, double l) { return x / l; },
      [](double, double y, double, double l) { return y / l; },
      [](double, double, double z, double l) { return z / l; },
      [](double x, double y, double z, double) { return std::cos(0.1 * (x + y + z)); },
  };

  std::vector<Triplets> mass(11);
  Vector b = Vector::Zero(m.count);
  for (int v = 0; v < g.nodes(); ++v) {
    const int i = m.dof[static_cast<std::size_t>(v)];
    if (i < 0) continue;
    const auto [x, y, z] = g.coords(v);
    const double vol = g.volume(v);
    mass[0].emplace_back(i, i, vol / 10.0);
    for (std::size_t l = 0; l < modes.size(); ++l) mass[l + 1].emplace_back(i, i, modes[l](x, y, z, length) * vol / 100.0);
    b[i] = 1000.0 * g.face_measure(v, 0, 0);
  }
  std::vector<SparseMatrix> terms;
  terms.push_back(build(mass[0], m.count) + 370.0 * stiffness);
  for (std::size_t l = 1; l < mass.size(); ++l) terms.push_back(build(mass[l], m.count));

  std::vector<CoeffExpr> coeffs{CoeffExpr::parse("1")};
  for (int l = 1; l <= 10; ++l) {
    const std::string mu = "mu" + std::to_string(l);
    coeffs.push_back(CoeffExpr::parse(opts.experiment == 1 ? mu : "1-exp(-" + mu + ")"));
  }
  static constexpr std::array<double, 5> hi1{0.15, 0.2, 0.3, 0.6, 1.1};
  static constexpr std::array<double, 5> hi2{2.05, 2.1, 2.2, 2.5, 3.0};
  const auto bi = static_cast<std::size_t>(opts.box_index);
  const std::pair<double, double> iv = opts.experiment == 1 ? std::pair{0.1, hi1[bi]} : std::pair{2.0, hi2[bi]};
  return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox(std::vector(10, iv)),
                      {.symmetric = true, .spd = true}, std::move(b));
}

AffineFamily fiber_block(int n, std::uint64_t seed, const GenOptions &opts) {
  if (n < 3) throw UsageError("fiber_block14 needs n >= 3 to host six fiber columns");
  if (!(opts.rel_width > 0.0 && opts.rel_width < 1.0)) throw UsageError("fiber_block14 rel_width must be in (0, 1)");
  const Grid g(3, n, 1.0);
  const DofMap m = make_dofs(g, 2, 0);  // clamped on z = 0

  // Six distinct (i, j) columns become fibers 1..6; everything else is the matrix phase 0.
  std::vector<int> columns(static_cast<std::size_t>(n * n));
  for (int c = 0; c < n * n; ++c) columns[static_cast<std::size_t>(c)] = c;
  Rng rng(seed);
  rng.shuffle(columns);
  std::vector<int> phase_of_column(static_cast<std::size_t>(n * n), 0);
  for (int f = 0; f < 6; ++f) phase_of_column[static_cast<std::size_t>(columns[static_cast<std::size_t>(f)])] = f + 1;
  auto phase = [&](int v) {
    const auto c = g.ijk(v);
    return phase_of_column[static_cast<std::size_t>(c[0] + n * c[1])];
  };

  std::vector<Triplets> shear(7), axial(7);
  for (const auto &e : g.edges()) {
    const int p = std::max(phase(e.a), phase(e.b));
    add_edge(shear[static_cast<std::size_t>(p)], m, e.a, e.b, e.conductance);
    if (e.axis == 2) add_edge(axial[static_cast<std::size_t>(p)], m, e.a, e.b, e.conductance);
  }
  std::vector<SparseMatrix> terms;
  std::vector<CoeffExpr> coeffs;
  std::vector<std::pair<double, double>> box;
  for (int p = 0; p < 7; ++p) {
    terms.push_back(build(shear[static_cast<std::size_t>(p)], m.count));
    terms.push_back(build(axial[static_cast<std::size_t>(p)], m.count));
    coeffs.push_back(CoeffExpr::parse("mu" + std::to_string(2 * p + 1)));
    coeffs.push_back(CoeffExpr::parse("mu" + std::to_string(2 * p + 2)));
    const double lam1 = p == 0 ? 1.15e6 : 1.15e9;
    const double lam2 = p == 0 ? 7.7e5 : 7.7e8;
    box.emplace_back(lam1 * (1.0 - 0.5 * opts.rel_width), lam1 * (1.0 + 0.5 * opts.rel_width));
    box.emplace_back(lam2 * (1.0 - 0.5 * opts.rel_width), lam2 * (1.0 + 0.5 * opts.rel_width));
  }
  Vector b = Vector::Zero(m.count);
  for (int v = 0; v < g.nodes(); ++v) {
    const int i = m.dof[static_cast<std::size_t>(v)];
    if (i >= 0) b[i] = -100.0 * g.face_measure(v, 2, n - 1);
  }
  return AffineFamily(std::move(terms), std::move(coeffs), ParameterBox(std::move(box)),
                      {.symmetric = true, .spd = true}, std::move(b));
}

}  // namespace

AffineFamily gen_problem(ProblemKind kind, int n, std::uint64_t seed, const GenOptions &opts) {
  if (n < 2) throw UsageError("grid resolution n must be >= 2");
  switch (kind) {
    case ProblemKind::Laplace2dThermal:
      return thermal2d(n, false);
    case ProblemKind::LogdetThermal:
      return thermal2d(n, true);
    case ProblemKind::HeatCapacity10:
      return heat_capacity(n, opts);
    case ProblemKind::FiberBlock14:
      return fiber_block(n, seed, opts);
  }
  throw UsageError("unsupported problem kind");
}

}  // namespace pmeim

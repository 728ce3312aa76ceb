#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "enclosure/geometry.hpp"
#include "enclosure/vec3.hpp"

namespace enclosure::fdtd {

enum class Cell : std::uint8_t { Exterior = 0, Fluid = 1, Obstacle = 2 };

/// Voxel grid over the cavity's bounding box (2 cells of padding). Cells are
/// classified by center membership: fluid = inside the cavity and outside the
/// obstacle.
struct GridSpec {
    Vec3 origin;  // corner of cell (0, 0, 0)
    double h = 0.0;
    int nx = 0, ny = 0, nz = 0;
    double dt_max = 0.0;     // CFL bound h / (sqrt(3) * (1 + margin))
    double cfl_margin = 0.05;
    std::vector<Cell> cells;
    std::int64_t fluid_count = 0;

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny * nz; }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny + j) * nx + i;  // x-fastest
    }
    Vec3 center(int i, int j, int k) const {
        return origin + Vec3{(i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h};
    }
    Cell at(int i, int j, int k) const { return cells[index(i, j, k)]; }
};

/// Classifies cells, enforces the obstacle margin (>= 2 cells away from the
/// cavity boundary) and verifies fluid connectivity by flood fill.
GridSpec build_grid(const geom::Domain& omega, const geom::Domain* obstacle, int resolution);

/// Neumann data evaluated at a ghost-face centroid with the face's outward
/// unit normal at time t.
using NeumannSource = std::function<double(const Vec3& x, const Vec3& normal, double t)>;

/// Boundary samples of the solution at the surface-quadrature nodes for every
/// time level 0..n_steps (first two levels are exactly zero).
struct BoundaryTrace {
    geom::SurfaceQuadrature quad;
    double dt = 0.0;
    int n_steps = 0;
    std::vector<double> samples;  // [level * n_nodes + node]

    double horizon() const { return dt * n_steps; }
    double at(int level, std::size_t node) const {
        return samples[static_cast<std::size_t>(level) * quad.size() + node];
    }
};

struct SolveStats {
    int steps = 0;
    double dt = 0.0;
    double cfl_ratio = 0.0;  // dt * sqrt(3) / h
    double max_field = 0.0;
};

/// Laplace-in-time images of the interior field accumulated on the fly, plus
/// the final-time field and its centered time derivative.
struct VolumeFields {
    std::vector<double> taus;
    std::vector<std::vector<double>> w;  // per tau: cell array (x-fastest)
    std::vector<double> u_final;
    std::vector<double> ut_final;
};

struct SolveOptions {
    std::vector<double> volume_taus;       // empty = no volume accumulation
    std::size_t volume_budget = 40'000'000;  // max cells * taus entries
    std::vector<double>* energy_log = nullptr;  // discrete energy per step
    int snapshot_every = 0;                // dump u every k steps when > 0
    std::string snapshot_prefix;
};

/// Explicit leapfrog update on the fluid region; homogeneous Neumann on the
/// obstacle via mirror ghosts, driven Neumann on the cavity boundary via
/// offset ghosts. Records the boundary trace by trilinear interpolation from
/// fluid cells with a first-order normal correction from the Neumann data.
BoundaryTrace solve(const GridSpec& grid, const NeumannSource& source, double horizon,
                    const geom::SurfaceQuadrature& quad, SolveStats* stats = nullptr,
                    VolumeFields* volume = nullptr, const SolveOptions& options = {});

/// Discrete leapfrog energy (kinetic + compatible gradient cross term) of two
/// consecutive levels; conserved under source-free evolution.
double discrete_energy(const GridSpec& grid, const std::vector<double>& u_old,
                       const std::vector<double>& u_new, double dt);

}  // namespace enclosure::fdtd

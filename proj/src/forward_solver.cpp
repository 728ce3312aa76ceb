#include "enclosure/forward_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <sstream>

#include "enclosure/errors.hpp"
#include "enclosure/parallel.hpp"
#include "enclosure/trace_io.hpp"

namespace enclosure::fdtd {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

GridSpec build_grid(const geom::Domain& omega, const geom::Domain* obstacle, int resolution) {
    if (resolution < 8) throw GeometryError("build_grid: resolution must be >= 8");
    const geom::Box bbox = omega.bounding_box();
    const Vec3 extent = bbox.hi - bbox.lo;
    const double max_extent = std::max({extent.x, extent.y, extent.z});
    GridSpec g;
    g.h = max_extent / resolution;
    g.cfl_margin = 0.05;
    g.dt_max = g.h / (kSqrt3 * (1.0 + g.cfl_margin));
    const int pad = 2;
    g.origin = bbox.lo - Vec3{pad * g.h, pad * g.h, pad * g.h};
    g.nx = static_cast<int>(std::ceil(extent.x / g.h)) + 2 * pad;
    g.ny = static_cast<int>(std::ceil(extent.y / g.h)) + 2 * pad;
    g.nz = static_cast<int>(std::ceil(extent.z / g.h)) + 2 * pad;

    if (obstacle && !geom::strictly_inside(*obstacle, omega, 2.0 * g.h)) {
        throw GeometryError(
            "build_grid: obstacle must keep at least two grid cells of clearance "
            "inside the cavity");
    }

    g.cells.assign(g.size(), Cell::Exterior);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const Vec3 c = g.center(i, j, k);
                if (!omega.contains(c)) continue;
                if (obstacle && obstacle->contains(c)) {
                    g.cells[g.index(i, j, k)] = Cell::Obstacle;
                } else {
                    g.cells[g.index(i, j, k)] = Cell::Fluid;
                    ++g.fluid_count;
                }
            }
    if (g.fluid_count == 0) throw GeometryError("build_grid: no fluid cells");

    // Obstacle cells must stay >= 2 cells away from exterior cells.
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                if (g.at(i, j, k) != Cell::Obstacle) continue;
                for (int dk = -2; dk <= 2; ++dk)
                    for (int dj = -2; dj <= 2; ++dj)
                        for (int di = -2; di <= 2; ++di) {
                            const int ii = i + di, jj = j + dj, kk = k + dk;
                            if (ii < 0 || jj < 0 || kk < 0 || ii >= g.nx || jj >= g.ny ||
                                kk >= g.nz)
                                continue;
                            if (g.at(ii, jj, kk) == Cell::Exterior)
                                throw GeometryError(
                                    "build_grid: obstacle cell within two cells of the "
                                    "cavity boundary");
                        }
            }

    // Flood fill from any fluid cell; the fluid region must be connected.
    std::vector<std::uint8_t> seen(g.size(), 0);
    std::deque<std::size_t> queue;
    for (std::size_t c = 0; c < g.size(); ++c)
        if (g.cells[c] == Cell::Fluid) {
            queue.push_back(c);
            seen[c] = 1;
            break;
        }
    std::int64_t reached = 0;
    const std::size_t sx = 1, sy = g.nx, sz = static_cast<std::size_t>(g.nx) * g.ny;
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        ++reached;
        const int i = static_cast<int>(c % g.nx);
        const int j = static_cast<int>((c / g.nx) % g.ny);
        const int k = static_cast<int>(c / (static_cast<std::size_t>(g.nx) * g.ny));
        auto visit = [&](bool ok, std::size_t n) {
            if (ok && !seen[n] && g.cells[n] == Cell::Fluid) {
                seen[n] = 1;
                queue.push_back(n);
            }
        };
        visit(i > 0, c - sx);
        visit(i + 1 < g.nx, c + sx);
        visit(j > 0, c - sy);
        visit(j + 1 < g.ny, c + sy);
        visit(k > 0, c - sz);
        visit(k + 1 < g.nz, c + sz);
    }
    if (reached != g.fluid_count)
        throw GeometryError("build_grid: fluid region is disconnected");
    return g;
}

namespace {

struct BoundaryFace {
    std::size_t cell;
    Vec3 centroid;
    Vec3 normal;
};

// One trilinear probe at a fixed depth below a node.
struct DepthProbe {
    std::size_t corner[8] = {};
    double weight[8] = {};
    double depth = 0.0;  // gamma * h
    bool full = false;   // whole cube fluid
    double mass = 0.0;
};

DepthProbe make_probe(const GridSpec& g, const Vec3& node, const Vec3& normal, double gamma) {
    DepthProbe probe;
    const Vec3 q = node - normal * (gamma * g.h);
    const double gx = (q.x - g.origin.x) / g.h - 0.5;
    const double gy = (q.y - g.origin.y) / g.h - 0.5;
    const double gz = (q.z - g.origin.z) / g.h - 0.5;
    const int bi = static_cast<int>(std::floor(gx));
    const int bj = static_cast<int>(std::floor(gy));
    const int bk = static_cast<int>(std::floor(gz));
    if (bi < 0 || bj < 0 || bk < 0 || bi + 1 >= g.nx || bj + 1 >= g.ny || bk + 1 >= g.nz)
        return probe;
    const double fx = gx - bi, fy = gy - bj, fz = gz - bk;
    probe.depth = gamma * g.h;
    int c = 0;
    for (int dk = 0; dk <= 1; ++dk)
        for (int dj = 0; dj <= 1; ++dj)
            for (int di = 0; di <= 1; ++di, ++c) {
                const double w =
                    (di ? fx : 1.0 - fx) * (dj ? fy : 1.0 - fy) * (dk ? fz : 1.0 - fz);
                probe.corner[c] = g.index(bi + di, bj + dj, bk + dk);
                const bool fluid = g.cells[probe.corner[c]] == Cell::Fluid;
                probe.weight[c] = fluid ? w : 0.0;
                probe.mass += fluid ? w : 0.0;
            }
    probe.full = probe.mass >= 0.999;
    return probe;
}

// Surface reconstruction plan for one quadrature node: the shallowest fully
// fluid trilinear probe below the surface, corrected back to the surface with
// the known Neumann data: u(x) = u_probe + depth * f(x) + O(depth^2). Falls
// back to a renormalized partial cube if no full cube exists.
struct SamplePlan {
    DepthProbe probe;
};

SamplePlan make_sample_plan(const GridSpec& g, const Vec3& node, const Vec3& normal) {
    const double depths[] = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0};
    DepthProbe fallback;
    for (double gamma : depths) {
        const DepthProbe probe = make_probe(g, node, normal, gamma);
        if (probe.full) return {probe};
        if (probe.mass > fallback.mass) fallback = probe;
    }
    if (fallback.mass >= 0.25) {
        for (double& w : fallback.weight) w /= fallback.mass;
        return {fallback};
    }
    throw GeometryError("solve: no fluid neighborhood found for a trace node");
}

double evaluate_plan(const SamplePlan& plan, const std::vector<double>& u, double f_node) {
    double value = 0.0;
    for (int c = 0; c < 8; ++c) value += plan.probe.weight[c] * u[plan.probe.corner[c]];
    return value + plan.probe.depth * f_node;
}

}  // namespace

double discrete_energy(const GridSpec& g, const std::vector<double>& u_old,
                       const std::vector<double>& u_new, double dt) {
    const double h3 = g.h * g.h * g.h;
    double kinetic = 0.0, cross = 0.0;
    const std::size_t sx = 1, sy = g.nx, sz = static_cast<std::size_t>(g.nx) * g.ny;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const std::size_t c = g.index(i, j, k);
                if (g.cells[c] != Cell::Fluid) continue;
                const double du = (u_new[c] - u_old[c]) / dt;
                kinetic += du * du;
                auto face = [&](bool ok, std::size_t n) {
                    if (!ok || g.cells[n] != Cell::Fluid) return;
                    cross += (u_new[n] - u_new[c]) * (u_old[n] - u_old[c]);
                };
                // Each interior face counted once (positive directions).
                face(i + 1 < g.nx, c + sx);
                face(j + 1 < g.ny, c + sy);
                face(k + 1 < g.nz, c + sz);
            }
    return 0.5 * h3 * (kinetic + cross / (g.h * g.h));
}

BoundaryTrace solve(const GridSpec& grid, const NeumannSource& source, double horizon,
                    const geom::SurfaceQuadrature& quad, SolveStats* stats,
                    VolumeFields* volume, const SolveOptions& options) {
    if (!(horizon > 0.0)) throw std::invalid_argument("solve: horizon must be positive");
    if (!(grid.dt_max > 0.0) ||
        grid.dt_max * kSqrt3 > grid.h * (1.0 + 1e-12))
        throw NumericalError("solve: grid time step violates the CFL bound h/sqrt(3)");

    const int n_steps = std::max(2, static_cast<int>(std::ceil(horizon / grid.dt_max)));
    const double dt = horizon / n_steps;
    const double lambda2 = (dt / grid.h) * (dt / grid.h);

    // Enumerate driven boundary faces (fluid cell with an exterior neighbor).
    std::vector<BoundaryFace> faces;
    const std::size_t sx = 1, sy = grid.nx, sz = static_cast<std::size_t>(grid.nx) * grid.ny;
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                if (grid.cells[c] != Cell::Fluid) continue;
                const Vec3 xc = grid.center(i, j, k);
                struct Dir {
                    bool ok;
                    std::size_t n;
                    Vec3 normal;
                };
                const Dir dirs[6] = {
                    {i > 0, c - sx, {-1, 0, 0}},          {i + 1 < grid.nx, c + sx, {1, 0, 0}},
                    {j > 0, c - sy, {0, -1, 0}},          {j + 1 < grid.ny, c + sy, {0, 1, 0}},
                    {k > 0, c - sz, {0, 0, -1}},          {k + 1 < grid.nz, c + sz, {0, 0, 1}},
                };
                for (const Dir& d : dirs) {
                    const bool exterior = !d.ok || grid.cells[d.n] == Cell::Exterior;
                    if (exterior)
                        faces.push_back({c, xc + d.normal * (0.5 * grid.h), d.normal});
                }
            }

    // Sampling plans for the trace nodes.
    std::vector<SamplePlan> plans(quad.size());
    for (std::size_t n = 0; n < quad.size(); ++n)
        plans[n] = make_sample_plan(grid, quad.nodes[n], quad.normals[n]);

    // Fluid cell list for the stencil sweep, grouped by z-slab for parallelism.
    std::vector<std::size_t> fluid_cells;
    fluid_cells.reserve(grid.fluid_count);
    std::vector<std::size_t> slab_begin(grid.nz + 1, 0);
    for (int k = 0; k < grid.nz; ++k) {
        slab_begin[k] = fluid_cells.size();
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                if (grid.cells[c] == Cell::Fluid) fluid_cells.push_back(c);
            }
    }
    slab_begin[grid.nz] = fluid_cells.size();

    const std::size_t ncells = grid.size();
    std::vector<double> u_prev(ncells, 0.0), u_curr(ncells, 0.0), u_next(ncells, 0.0);
    std::vector<double> face_load(ncells, 0.0);

    BoundaryTrace trace;
    trace.quad = quad;
    trace.dt = dt;
    trace.n_steps = n_steps;
    trace.samples.assign(static_cast<std::size_t>(n_steps + 1) * quad.size(), 0.0);

    if (volume) {
        volume->taus = options.volume_taus;
        const std::size_t entries = options.volume_taus.size() * ncells;
        if (entries > options.volume_budget)
            throw NumericalError("solve: volume field budget exceeded; reduce the tau list");
        volume->w.assign(options.volume_taus.size(), std::vector<double>(ncells, 0.0));
        volume->u_final.assign(ncells, 0.0);
        volume->ut_final.assign(ncells, 0.0);
    }

    auto record_trace = [&](int level, const std::vector<double>& u) {
        // Levels 0 and 1 are identically zero (rest start); skip the normal
        // correction so they stay exactly zero.
        if (level <= 1) return;
        const double t = level * dt;
        for (std::size_t n = 0; n < quad.size(); ++n) {
            const double f_node = source(quad.nodes[n], quad.normals[n], t);
            trace.samples[static_cast<std::size_t>(level) * quad.size() + n] =
                evaluate_plan(plans[n], u, f_node);
        }
    };

    auto accumulate_volume = [&](int level, const std::vector<double>& u) {
        if (!volume) return;
        const double t = level * dt;
        const double base_w = (level == 0 || level == n_steps) ? 0.5 * dt : dt;
        for (std::size_t ti = 0; ti < volume->taus.size(); ++ti) {
            const double w = base_w * std::exp(-volume->taus[ti] * t);
            std::vector<double>& acc = volume->w[ti];
            parallel_for(0, grid.nz, [&](int slab) {
                for (std::size_t f = slab_begin[slab]; f < slab_begin[slab + 1]; ++f) {
                    const std::size_t c = fluid_cells[f];
                    acc[c] += w * u[c];
                }
            });
        }
    };

    double source_scale = 0.0;
    double max_field = 0.0;

    // Levels 0 and 1 are zero by the rest initial state.
    record_trace(0, u_prev);
    accumulate_volume(0, u_prev);
    if (n_steps >= 1) {
        record_trace(1, u_curr);
        accumulate_volume(1, u_curr);
    }
    if (options.energy_log) options.energy_log->push_back(discrete_energy(grid, u_prev, u_curr, dt));

    const int last_update_level = n_steps + 1;  // one extra step for dt u(T)
    for (int level = 2; level <= last_update_level; ++level) {
        const double t_prev_level = (level - 1) * dt;
        // Boundary forcing from the previous level enters the Laplacian.
        for (const BoundaryFace& f : faces) face_load[f.cell] = 0.0;
        for (const BoundaryFace& f : faces) {
            const double fv = source(f.centroid, f.normal, t_prev_level);
            face_load[f.cell] += grid.h * fv;
            source_scale = std::max(source_scale, std::fabs(fv));
        }

        parallel_for(0, grid.nz, [&](int slab) {
            for (std::size_t f = slab_begin[slab]; f < slab_begin[slab + 1]; ++f) {
                const std::size_t c = fluid_cells[f];
                const double uc = u_curr[c];
                double lap = face_load[c];
                // Neighbors: fluid contributes its value; obstacle mirrors the
                // center (zero flux); exterior mirrors with the ghost offset
                // already accounted in face_load.
                const std::size_t nb[6] = {c - sx, c + sx, c - sy, c + sy, c - sz, c + sz};
                for (const std::size_t n : nb)
                    if (grid.cells[n] == Cell::Fluid) lap += u_curr[n] - uc;
                u_next[c] = 2.0 * uc - u_prev[c] + lambda2 * lap;
            }
        });

        std::swap(u_prev, u_curr);
        std::swap(u_curr, u_next);

        if (level <= n_steps) {
            record_trace(level, u_curr);
            accumulate_volume(level, u_curr);
        }
        if (volume && level == n_steps) {
            volume->u_final = u_curr;
            volume->ut_final = u_prev;  // borrow: holds u^{N-1} until the next step
        }
        if (volume && level == n_steps + 1) {
            // Centered derivative at the horizon: (u^{N+1} - u^{N-1}) / (2 dt).
            for (std::size_t c = 0; c < ncells; ++c)
                volume->ut_final[c] = (u_curr[c] - volume->ut_final[c]) / (2.0 * dt);
        }
        if (options.energy_log && level <= n_steps)
            options.energy_log->push_back(discrete_energy(grid, u_prev, u_curr, dt));

        if (level % 8 == 0 || level == n_steps) {
            double m = 0.0;
            bool finite = true;
            for (std::size_t f = 0; f < fluid_cells.size(); ++f) {
                const double a = std::fabs(u_curr[fluid_cells[f]]);
                if (!std::isfinite(a)) finite = false;
                if (a > m) m = a;
            }
            max_field = std::max(max_field, m);
            const double scale = std::max(source_scale * horizon, 1e-12);
            if (!finite || m > 1e6 * scale) {
                std::ostringstream msg;
                msg << "solve: field blew up (max " << m << " at step " << level
                    << "); check the CFL ratio dt*sqrt(3)/h = " << dt * kSqrt3 / grid.h
                    << " and the Neumann data";
                throw NumericalError(msg.str());
            }
        }

        if (options.snapshot_every > 0 && level <= n_steps &&
            level % options.snapshot_every == 0) {
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%06d.bin", level);
            io::write_snapshot(options.snapshot_prefix + name, grid, u_curr, level, level * dt,
                               dt);
        }
    }

    if (stats) {
        stats->steps = n_steps;
        stats->dt = dt;
        stats->cfl_ratio = dt * kSqrt3 / grid.h;
        stats->max_field = max_field;
    }
    return trace;
}

}  // namespace enclosure::fdtd

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "enclosure/errors.hpp"
#include "enclosure/forward_solver.hpp"
#include "enclosure/reference_field.hpp"
#include "enclosure/trace_io.hpp"

using namespace enclosure;
using namespace enclosure::fdtd;

namespace {

NeumannSource reversed_pulse_source(const waves::SourcePulse& pulse, double horizon) {
    return [pulse, horizon](const Vec3& x, const Vec3& n, double t) {
        const double s = horizon - t;
        if (s <= 0.0) return 0.0;
        return n.dot(waves::gradient(pulse, x, s));
    };
}

// Relative L2(boundary x time) error of the trace against the reversed field.
double free_wave_error(const BoundaryTrace& trace, const waves::SourcePulse& pulse) {
    const double T = trace.horizon();
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= trace.n_steps; ++k) {
        const double s = T - k * trace.dt;
        for (std::size_t n = 0; n < trace.quad.size(); ++n) {
            const double exact = s > 0.0 ? waves::value(pulse, trace.quad.nodes[n], s) : 0.0;
            const double diff = trace.at(k, n) - exact;
            const double w = trace.quad.weights[n] * trace.dt;
            num += w * diff * diff;
            den += w * exact * exact;
        }
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("grid classification and fluid fraction") {
    const geom::Domain omega{geom::Box{{-1, -1, -1}, {1, 1, 1}}};

    const GridSpec empty = build_grid(omega, nullptr, 32);
    std::int64_t interior = 0;
    for (Cell c : empty.cells)
        if (c != Cell::Exterior) ++interior;
    CHECK(empty.fluid_count == interior);  // no obstacle: all interior cells are fluid

    const geom::Domain obstacle{geom::Ball{{0, 0, 0}, 0.3}};
    const GridSpec g = build_grid(omega, &obstacle, 64);
    interior = 0;
    for (Cell c : g.cells)
        if (c != Cell::Exterior) ++interior;
    const double want_fraction =
        (8.0 - 4.0 / 3.0 * std::numbers::pi * 0.027) / 8.0;
    const double got_fraction = static_cast<double>(g.fluid_count) / interior;
    CHECK(std::fabs(got_fraction - want_fraction) / want_fraction < 0.02);
}

TEST_CASE("grid margin and connectivity guards") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const geom::Domain fat{geom::Ball{{0, 0, 0}, 0.95}};
    CHECK_THROWS_AS(build_grid(omega, &fat, 32), GeometryError);
    CHECK_THROWS_AS(build_grid(omega, nullptr, 4), GeometryError);
    // A valid demo grid builds (connectivity verified internally).
    const geom::Domain obstacle{geom::Ball{{0, 0, 0}, 0.3}};
    CHECK_NOTHROW(build_grid(omega, &obstacle, 32));
}

TEST_CASE("zero data keeps the field at rest") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const GridSpec grid = build_grid(omega, nullptr, 16);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 4);
    const BoundaryTrace trace = solve(
        grid, [](const Vec3&, const Vec3&, double) { return 0.0; }, 1.0, quad);
    for (double s : trace.samples) CHECK(s == 0.0);
}

TEST_CASE("first two time levels are exactly zero") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const GridSpec grid = build_grid(omega, nullptr, 16);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 4);
    const BoundaryTrace trace = solve(grid, reversed_pulse_source(pulse, 1.9), 1.9, quad);
    for (std::size_t n = 0; n < quad.size(); ++n) {
        CHECK(trace.at(0, n) == 0.0);
        CHECK(trace.at(1, n) == 0.0);
    }
}

TEST_CASE("doubling the data doubles the trace exactly") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const GridSpec grid = build_grid(omega, nullptr, 16);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 4);
    const NeumannSource f = reversed_pulse_source(pulse, 1.9);
    const NeumannSource f2 = [&f](const Vec3& x, const Vec3& n, double t) {
        return 2.0 * f(x, n, t);
    };
    const BoundaryTrace t1 = solve(grid, f, 1.9, quad);
    const BoundaryTrace t2 = solve(grid, f2, 1.9, quad);
    REQUIRE(t1.samples.size() == t2.samples.size());
    for (std::size_t i = 0; i < t1.samples.size(); ++i)
        CHECK(t2.samples[i] == 2.0 * t1.samples[i]);
}

TEST_CASE("causality: trace silent until the reversed front reaches the boundary") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 2.2;  // strict window: arrival at t = T - 1 - eta = 0.3
    const GridSpec grid = build_grid(omega, nullptr, 32);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 6);
    const BoundaryTrace trace = solve(grid, reversed_pulse_source(pulse, T), T, quad);
    double early = 0.0, late = 0.0;
    for (int k = 0; k <= trace.n_steps; ++k) {
        for (std::size_t n = 0; n < quad.size(); ++n) {
            const double v = std::fabs(trace.at(k, n));
            if (k * trace.dt < 0.15) early = std::max(early, v);
            late = std::max(late, v);
        }
    }
    CHECK(late > 1e-3);
    CHECK(early <= 1e-12 * late);
}

TEST_CASE("free-wave validation: error decreases with resolution") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9;
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 8);
    double err16 = 0.0, err32 = 0.0;
    {
        const GridSpec grid = build_grid(omega, nullptr, 16);
        err16 = free_wave_error(solve(grid, reversed_pulse_source(pulse, T), T, quad), pulse);
    }
    {
        const GridSpec grid = build_grid(omega, nullptr, 32);
        err32 = free_wave_error(solve(grid, reversed_pulse_source(pulse, T), T, quad), pulse);
    }
    CHECK(err32 < err16);
    const double order = std::log2(err16 / err32);
    CHECK(order >= 0.8);
    CHECK(err32 < 0.10);
}

TEST_CASE("discrete energy is conserved after the drive stops") {
    const geom::Domain omega{geom::Box{{-1, -1, -1}, {1, 1, 1}}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 2.0, drive_until = 0.6;
    const GridSpec grid = build_grid(omega, nullptr, 24);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 4);
    const NeumannSource base = reversed_pulse_source(pulse, T);
    const NeumannSource gated = [&](const Vec3& x, const Vec3& n, double t) {
        return t < drive_until ? base(x, n, t) : 0.0;
    };
    std::vector<double> energy;
    SolveOptions options;
    options.energy_log = &energy;
    solve(grid, gated, T, quad, nullptr, nullptr, options);
    REQUIRE(static_cast<int>(energy.size()) >= 10);
    // Compare energy over the free phase (skip a few steps past the gate).
    const std::size_t first_free = energy.size() * 2 / 5;
    double lo = energy[first_free], hi = energy[first_free];
    for (std::size_t i = first_free; i < energy.size(); ++i) {
        lo = std::min(lo, energy[i]);
        hi = std::max(hi, energy[i]);
    }
    CHECK(hi > 0.0);
    CHECK((hi - lo) / hi < 1e-3);
}

TEST_CASE("volume accumulation: zero data, tau-zero equals plain time integral") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const GridSpec grid = build_grid(omega, nullptr, 12);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 3);

    {  // zero data -> zero volume fields
        VolumeFields vf;
        SolveOptions options;
        options.volume_taus = {0.0, 2.0};
        solve(grid, [](const Vec3&, const Vec3&, double) { return 0.0; }, 1.2, quad, nullptr,
              &vf, options);
        for (const auto& w : vf.w)
            for (double v : w) CHECK(v == 0.0);
    }

    // tau = 0 accumulation equals a post-hoc trapezoid over snapshots.
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "enclosure_snaptest";
    fs::create_directories(dir);
    VolumeFields vf;
    SolveOptions options;
    options.volume_taus = {0.0};
    options.snapshot_every = 1;
    options.snapshot_prefix = (dir / "").string();
    SolveStats stats;
    solve(grid, reversed_pulse_source(pulse, T), T, quad, &stats, &vf, options);

    std::vector<double> integral(grid.size(), 0.0);
    for (int k = 0; k <= stats.steps; ++k) {
        std::vector<double> field(grid.size(), 0.0);
        if (k >= 2) {  // levels 0 and 1 are identically zero (no snapshots)
            char name[64];
            std::snprintf(name, sizeof(name), "snapshot_%06d.bin", k);
            const io::Snapshot snap = io::read_snapshot((dir / name).string());
            CHECK(snap.step == k);
            CHECK(snap.dt == stats.dt);
            field = snap.field;
        }
        const double w = (k == 0 || k == stats.steps) ? 0.5 * stats.dt : stats.dt;
        for (std::size_t c = 0; c < field.size(); ++c) integral[c] += w * field[c];
    }
    double worst = 0.0;
    for (std::size_t c = 0; c < integral.size(); ++c)
        worst = std::max(worst, std::fabs(integral[c] - vf.w[0][c]));
    CHECK(worst < 1e-12);
    fs::remove_all(dir);
}

TEST_CASE("volume field approaches the reversed-field Laplace image") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9, tau = 2.0;
    double prev_err = -1.0;
    for (int res : {12, 24}) {
        const GridSpec grid = build_grid(omega, nullptr, res);
        const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 3);
        VolumeFields vf;
        SolveOptions options;
        options.volume_taus = {tau};
        solve(grid, reversed_pulse_source(pulse, T), T, quad, nullptr, &vf, options);
        double num = 0.0, den = 0.0;
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    const std::size_t c = grid.index(i, j, k);
                    if (grid.cells[c] != Cell::Fluid) continue;
                    const double exact =
                        reffield::laplace_point(pulse, grid.center(i, j, k), tau, T).value;
                    num += (vf.w[0][c] - exact) * (vf.w[0][c] - exact);
                    den += exact * exact;
                }
        const double err = std::sqrt(num / den);
        if (prev_err >= 0.0) CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.05);
}

TEST_CASE("volume budget guard and instability detector") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const GridSpec grid = build_grid(omega, nullptr, 16);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 3);
    {
        VolumeFields vf;
        SolveOptions options;
        options.volume_taus = {1, 2, 3, 4};
        options.volume_budget = 10;  // absurdly small
        CHECK_THROWS_AS(solve(grid, [](const Vec3&, const Vec3&, double) { return 0.0; }, 1.0,
                              quad, nullptr, &vf, options),
                        NumericalError);
    }
    {
        // Non-finite Neumann data must trip the detector.
        CHECK_THROWS_AS(solve(grid,
                              [](const Vec3&, const Vec3&, double) {
                                  return std::numeric_limits<double>::quiet_NaN();
                              },
                              1.0, quad),
                        NumericalError);
    }
    {
        // A hand-built grid violating the CFL bound is rejected up front.
        GridSpec bad = grid;
        bad.dt_max = bad.h;  // > h / sqrt(3)
        CHECK_THROWS_AS(solve(bad, [](const Vec3&, const Vec3&, double) { return 0.0; }, 1.0,
                              quad),
                        NumericalError);
    }
}

TEST_CASE("trace file round trip") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const GridSpec grid = build_grid(omega, nullptr, 12);
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 3);
    const BoundaryTrace trace = solve(grid, reversed_pulse_source(pulse, 1.9), 1.9, quad);

    namespace fs = std::filesystem;
    const fs::path path = fs::temp_directory_path() / "enclosure_trace_roundtrip.bin";
    io::write_trace(path.string(), trace);
    const BoundaryTrace back = io::read_trace(path.string());
    CHECK(back.dt == trace.dt);
    CHECK(back.n_steps == trace.n_steps);
    REQUIRE(back.samples.size() == trace.samples.size());
    for (std::size_t i = 0; i < trace.samples.size(); ++i)
        CHECK(back.samples[i] == trace.samples[i]);
    for (std::size_t n = 0; n < quad.size(); ++n) {
        CHECK(back.quad.nodes[n].x == trace.quad.nodes[n].x);
        CHECK(back.quad.weights[n] == trace.quad.weights[n]);
    }
    fs::remove(path);
}

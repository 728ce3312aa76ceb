#include "enclosure/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "enclosure/errors.hpp"
#include "enclosure/parallel.hpp"

namespace enclosure::indic {

TauGrid::TauGrid(std::vector<double> v) : values(std::move(v)) {
    if (values.empty()) throw std::invalid_argument("TauGrid: empty");
    double prev = 0.0;
    for (double t : values) {
        if (!(t > prev))
            throw std::invalid_argument("TauGrid: values must be strictly increasing and positive");
        prev = t;
    }
}

TauGrid TauGrid::linear(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("TauGrid::linear: bad range");
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    return TauGrid(std::move(v));
}

TauGrid TauGrid::log_spaced(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(hi > lo))
        throw std::invalid_argument("TauGrid::log_spaced: bad range");
    std::vector<double> v(count);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < count; ++i)
        v[i] = count == 1 ? lo : std::exp(llo + (lhi - llo) * i / (count - 1));
    return TauGrid(std::move(v));
}

IndicatorSeries compute_indicator(const fdtd::BoundaryTrace& trace,
                                  const waves::SourcePulse& pulse, const TauGrid& taus) {
    const std::size_t n_nodes = trace.quad.size();
    if (n_nodes == 0) throw std::invalid_argument("compute_indicator: empty quadrature");
    for (double s : trace.samples)
        if (!std::isfinite(s)) throw NumericalError("compute_indicator: non-finite trace");

    const double T = trace.horizon();
    IndicatorSeries series;
    series.horizon = T;
    series.tau = taus.values;
    series.value.assign(taus.size(), 0.0);
    series.inv_tau_log.assign(taus.size(), std::nan(""));
    series.scaled.assign(taus.size(), LogSigned::zero());

    parallel_for(0, static_cast<int>(taus.size()), [&](int ti) {
        const double tau = taus.values[ti];
        // Trapezoid Laplace weighting of the trace on its own time step.
        std::vector<double> w(n_nodes, 0.0);
        for (int k = 0; k <= trace.n_steps; ++k) {
            const double t = k * trace.dt;
            const double ck =
                ((k == 0 || k == trace.n_steps) ? 0.5 : 1.0) * trace.dt * std::exp(-tau * t);
            const std::size_t base = static_cast<std::size_t>(k) * n_nodes;
            for (std::size_t n = 0; n < n_nodes; ++n) w[n] += ck * trace.samples[base + n];
        }
        const auto [w_ref, dwdn] = reffield::boundary_laplace_field(pulse, trace.quad, tau, T);
        double sum = 0.0;
        for (std::size_t n = 0; n < n_nodes; ++n)
            sum += trace.quad.weights[n] * (w[n] - w_ref.at(n)) * dwdn.at(n);
        series.value[ti] = sum;
        if (sum > 0.0) series.inv_tau_log[ti] = std::log(sum) / tau;
        series.scaled[ti] = LogSigned::from_value_scaled(sum, tau * T);
    });
    return series;
}

std::vector<char> admissible_mask(const IndicatorSeries& series, const IndicatorSeries& floor,
                                  double factor) {
    if (series.size() != floor.size())
        throw std::invalid_argument("admissible_mask: series and floor sizes differ");
    std::vector<char> mask(series.size(), 0);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (std::fabs(series.tau[i] - floor.tau[i]) > 1e-12 * series.tau[i])
            throw std::invalid_argument("admissible_mask: tau grids differ");
        const bool above = std::fabs(series.value[i]) >= factor * std::fabs(floor.value[i]);
        mask[i] = (above && series.value[i] > 0.0) ? 1 : 0;
    }
    return mask;
}

Decomposition compute_decomposition(const fdtd::GridSpec& grid, const fdtd::VolumeFields& fields,
                                    std::size_t tau_index, const waves::SourcePulse& pulse,
                                    double horizon) {
    if (tau_index >= fields.taus.size())
        throw std::invalid_argument("compute_decomposition: tau index out of range");
    if (fields.u_final.empty())
        throw std::invalid_argument("compute_decomposition: volume fields are missing");
    const double tau = fields.taus[tau_index];
    const std::vector<double>& w = fields.w[tau_index];
    const double h = grid.h;
    const double h3 = h * h * h;
    const std::size_t sx = 1, sy = grid.nx, sz = static_cast<std::size_t>(grid.nx) * grid.ny;

    // Reference field and its gradient at every interior cell center.
    std::vector<double> ref_value(grid.size(), 0.0);
    std::vector<Vec3> ref_grad(grid.size());
    parallel_for(0, grid.nz, [&](int k) {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                if (grid.cells[c] == fdtd::Cell::Exterior) continue;
                const reffield::LaplacePoint ref =
                    reffield::laplace_point(pulse, grid.center(i, j, k), tau, horizon, 1e-13);
                ref_value[c] = ref.value;
                ref_grad[c] = ref.grad;
            }
    });

    // Per-slab partial sums, reduced in slab order for determinism.
    struct Partial {
        double obstacle = 0.0;
        double mismatch = 0.0;
        double rem_obstacle = 0.0;   // F0 * w_ref over D
        double rem_fr = 0.0;         // F * (w - w_ref) over the fluid region
        double rem_mismatch = 0.0;   // (F0 - F) * w_ref over the fluid region
    };
    std::vector<Partial> partials(grid.nz);

    parallel_for(0, grid.nz, [&](int k) {
        Partial acc;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                const fdtd::Cell kind = grid.cells[c];
                if (kind == fdtd::Cell::Exterior) continue;
                const Vec3 x = grid.center(i, j, k);

                if (kind == fdtd::Cell::Obstacle) {
                    acc.obstacle +=
                        h3 * (ref_grad[c].norm2() + tau * tau * ref_value[c] * ref_value[c]);
                    const double f0 = -waves::initial_profile(pulse, x);
                    acc.rem_obstacle += h3 * f0 * ref_value[c];
                    continue;
                }

                // Mismatch field R = w - w_ref, centered differences with
                // one-sided ghosts at the region boundaries.
                const double r_c = w[c] - ref_value[c];
                auto ghost = [&](std::size_t n, const Vec3& normal) {
                    if (grid.cells[n] == fdtd::Cell::Fluid) return w[n] - ref_value[n];
                    if (grid.cells[n] == fdtd::Cell::Obstacle) {
                        // Zero flux of w across the obstacle face while w_ref
                        // keeps its own normal derivative there.
                        return r_c - h * normal.dot(ref_grad[c]);
                    }
                    return r_c;  // cavity boundary: matched Neumann data
                };
                const double gx =
                    (ghost(c + sx, {1, 0, 0}) - ghost(c - sx, {-1, 0, 0})) / (2.0 * h);
                const double gy =
                    (ghost(c + sy, {0, 1, 0}) - ghost(c - sy, {0, -1, 0})) / (2.0 * h);
                const double gz =
                    (ghost(c + sz, {0, 0, 1}) - ghost(c - sz, {0, 0, -1})) / (2.0 * h);
                acc.mismatch += h3 * (gx * gx + gy * gy + gz * gz + tau * tau * r_c * r_c);

                const double f_val = fields.ut_final[c] + tau * fields.u_final[c];
                const double f0 = -waves::initial_profile(pulse, x);
                acc.rem_fr += h3 * f_val * r_c;
                acc.rem_mismatch += h3 * (f0 - f_val) * ref_value[c];
            }
        partials[k] = acc;
    });

    Decomposition out;
    double rem = 0.0;
    for (const Partial& p : partials) {
        out.obstacle_energy += p.obstacle;
        out.mismatch_energy += p.mismatch;
        rem += p.rem_obstacle + p.rem_fr + p.rem_mismatch;
    }
    out.remainder = std::exp(-tau * horizon) * rem;
    out.total = out.obstacle_energy + out.mismatch_energy + out.remainder;
    return out;
}

void write_indicator_table(const std::string& path, const IndicatorSeries& series) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open indicator table for writing: " + path);
    os << "tau\tI\tinv_tau_log_I\tsign_scaled\tlog_scaled\n";
    char line[256];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g\t%.17g\t%.17g\t%d\t%.17g\n", series.tau[i],
                      series.value[i], series.inv_tau_log[i], series.scaled[i].sign,
                      series.scaled[i].log_abs);
        os << line;
    }
    if (!os) throw ConfigError("short write to indicator table: " + path);
}

IndicatorSeries read_indicator_table(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open indicator table: " + path);
    std::string header;
    std::getline(is, header);
    if (header != "tau\tI\tinv_tau_log_I\tsign_scaled\tlog_scaled")
        throw ConfigError("unexpected indicator table header in " + path);
    IndicatorSeries series;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        // strtod handles "nan"/"inf", which iostream extraction does not.
        std::array<double, 5> col{};
        const char* p = line.c_str();
        bool ok = true;
        for (double& c : col) {
            char* end = nullptr;
            c = std::strtod(p, &end);
            if (end == p) ok = false;
            p = end;
        }
        if (!ok) throw ConfigError("malformed indicator row: " + line);
        series.tau.push_back(col[0]);
        series.value.push_back(col[1]);
        series.inv_tau_log.push_back(col[2]);
        series.scaled.push_back(LogSigned{static_cast<int>(col[3]), col[4]});
    }
    return series;
}

}  // namespace enclosure::indic

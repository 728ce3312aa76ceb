#pragma once

#include <string>
#include <vector>

#include "enclosure/forward_solver.hpp"
#include "enclosure/lognum.hpp"
#include "enclosure/reference_field.hpp"

namespace enclosure::indic {

/// Strictly increasing positive Laplace parameters.
struct TauGrid {
    std::vector<double> values;

    explicit TauGrid(std::vector<double> v);
    static TauGrid linear(double lo, double hi, int count);
    static TauGrid log_spaced(double lo, double hi, int count);
    std::size_t size() const { return values.size(); }
};

/// Boundary indicator over a tau sweep: per tau the surface integral of
/// (w - w_ref) * d(w_ref)/dn, its rate (1/tau) log I where positive, and the
/// horizon-scaled value e^{tau T} I carried in signed log form.
struct IndicatorSeries {
    std::vector<double> tau;
    std::vector<double> value;            // I(tau)
    std::vector<double> inv_tau_log;      // (1/tau) log I, NaN where I <= 0
    std::vector<LogSigned> scaled;        // e^{tau T} I
    double horizon = 0.0;

    std::size_t size() const { return tau.size(); }
};

/// Computes the indicator from a recorded boundary trace. Per tau: the trace
/// is Laplace-weighted with the trapezoid rule on the trace's own time step;
/// the reference field and its normal derivative come from the closed-form
/// time quadrature at the same nodes.
IndicatorSeries compute_indicator(const fdtd::BoundaryTrace& trace,
                                  const waves::SourcePulse& pulse, const TauGrid& taus);

/// Admissibility mask: true where |I| clears `factor` times the floor series
/// (a matched obstacle-free run) and I is positive.
std::vector<char> admissible_mask(const IndicatorSeries& series, const IndicatorSeries& floor,
                                  double factor = 5.0);

/// Interior decomposition diagnostic at one tau (obstacle known):
///   total = obstacle_energy + mismatch_energy + remainder,
/// which should track the boundary indicator as the grid refines.
struct Decomposition {
    double obstacle_energy = 0.0;   // energy of the reference field over D
    double mismatch_energy = 0.0;   // energy of (w - w_ref) over the fluid region
    double remainder = 0.0;         // e^{-tau T}-weighted source terms
    double total = 0.0;
};
Decomposition compute_decomposition(const fdtd::GridSpec& grid, const fdtd::VolumeFields& fields,
                                    std::size_t tau_index, const waves::SourcePulse& pulse,
                                    double horizon);

/// Writes the series as a TSV table with the fixed header
/// tau, I, inv_tau_log_I, sign_scaled, log_scaled.
void write_indicator_table(const std::string& path, const IndicatorSeries& series);
IndicatorSeries read_indicator_table(const std::string& path);

}  // namespace enclosure::indic

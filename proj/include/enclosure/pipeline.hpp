#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "enclosure/config.hpp"
#include "enclosure/extraction.hpp"
#include "enclosure/forward_solver.hpp"
#include "enclosure/indicator.hpp"

namespace enclosure::cli {

/// Forward solve with the time-reversed Neumann data; `with_obstacle` selects
/// whether the configured obstacle is present (the floor run turns it off).
fdtd::BoundaryTrace simulate(const ExperimentConfig& cfg, bool with_obstacle,
                             fdtd::SolveStats* stats = nullptr,
                             fdtd::VolumeFields* volume = nullptr,
                             const std::vector<double>& volume_taus = {});

struct RunOutcome {
    indic::IndicatorSeries series;
    indic::IndicatorSeries floor_series;
    std::vector<char> mask;
    std::optional<extract::ExtractionResult> extraction;
    std::string null_reason;         // set when extraction refused
    extract::Verdict trend = extract::Verdict::Indeterminate;  // qualitative verdict
    fdtd::SolveStats stats;
    std::string manifest_path;
    int exit_code = 0;               // 0 ok, 2 admissibility, 3 numerical
};

/// trace -> indicator -> extraction, with a matched obstacle-free companion
/// solve for the noise floor. Writes nothing.
RunOutcome invert(const ExperimentConfig& cfg, const fdtd::BoundaryTrace& trace);

/// Full pipeline: validate, simulate (or read the configured trace file),
/// invert, and persist indicator tables, the extraction record, the trace,
/// and the manifest under cfg.output_dir.
RunOutcome run_experiment(const ExperimentConfig& cfg);

/// Writes (tau, rate) plot data next to a run manifest; adds the reference
/// level -2 ((T - eta) - R_D) when the obstacle was configured.
std::string emit_plot_data(const std::string& manifest_path);

/// Named closed-form/oracle cross-checks; one line per check on `os`.
/// Level "quick" uses small orders, "full" the acceptance-grade orders.
/// Returns the number of failed checks.
int oracle_suite(const std::string& level, unsigned seed, std::ostream& os);

}  // namespace enclosure::cli

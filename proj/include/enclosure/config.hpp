#pragma once

#include <optional>
#include <string>

#include "enclosure/analytic_wave.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/indicator.hpp"

namespace enclosure::cli {

/// Experiment description parsed from flat key=value text. Unknown keys are
/// rejected. See README for the schema.
struct ExperimentConfig {
    std::optional<geom::Domain> omega;
    std::optional<geom::Domain> obstacle;  // absent: obstacle-free or blind run
    waves::SourcePulse pulse;
    double horizon = 0.0;
    double tau_min = 2.0, tau_max = 40.0;
    int tau_count = 16;
    bool tau_log = true;
    int resolution = 64;
    int surface_order = 16;
    long seed = 1;
    std::string output_dir = "run";
    int threads = 0;        // 0 = library default
    int snapshot_every = 0;
    std::string trace_file;  // blind-mode input trace
    double noise_factor = 5.0;
    std::string raw_text;    // exact config text (digested into the manifest)

    const geom::Domain& cavity() const;
    indic::TauGrid tau_grid() const;
};

/// Parses config text; validates shapes, containment, and the required
/// time-window condition (hard failure). The pulse-size condition is only a
/// warning at load time (it needs the obstacle, unknown in blind mode).
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Applies a "key=value" override (same keys as the file) and revalidates.
ExperimentConfig with_override(const ExperimentConfig& base, const std::string& assignment);

}  // namespace enclosure::cli

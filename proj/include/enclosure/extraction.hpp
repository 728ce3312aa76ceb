#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enclosure/analytic_wave.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/indicator.hpp"

namespace enclosure::extract {

struct ExtractionError : std::runtime_error {
    explicit ExtractionError(const std::string& what) : std::runtime_error(what) {}
};
struct InsufficientPoints : ExtractionError {
    explicit InsufficientPoints(const std::string& what) : ExtractionError(what) {}
};
struct NegativeIndicatorThroughout : ExtractionError {
    explicit NegativeIndicatorThroughout(const std::string& what) : ExtractionError(what) {}
};

enum class Verdict { Blowup, Decay, Indeterminate };
const char* to_string(Verdict v);

struct WindowPolicy {
    enum class Kind { LargestTrailingRun, Fixed };
    Kind kind = Kind::LargestTrailingRun;
    double fixed_lo = 0.0;   // used by Kind::Fixed
    double fixed_hi = 0.0;
    int min_points = 4;
};

struct ExtractionResult {
    double slope = 0.0;           // fitted d/dtau of log I
    double r_d_estimate = 0.0;    // (T - eta) + slope / 2
    double tau_lo = 0.0, tau_hi = 0.0;
    int n_points = 0;
    double r_squared = 0.0;
    Verdict verdict = Verdict::Indeterminate;
    double threshold = 0.0;       // 2 (eta + r_d_estimate)
};

/// Ordinary least squares of log I against tau over the admissible window
/// selected by the policy. The admissible mask marks positive, above-floor
/// entries; throws InsufficientPoints / NegativeIndicatorThroughout.
ExtractionResult fit_slope(const indic::IndicatorSeries& series, const std::vector<char>& mask,
                           double horizon, double pulse_radius,
                           const WindowPolicy& policy = {});

/// Trend of log(e^{tau T} I) over the admissible window: rising beyond
/// rate_tol means Blowup, falling means Decay. Requires min_points entries.
Verdict qualitative_criterion(const indic::IndicatorSeries& series,
                              const std::vector<char>& mask, const WindowPolicy& policy = {},
                              double rate_tol = 0.02);

/// Which side of the threshold 2 (eta + r_d) the horizon falls on.
Verdict expected_verdict(double horizon, double pulse_radius, double r_d);

struct AdmissibilityEntry {
    std::string name;
    std::string detail;
    double margin = 0.0;
    bool pass = false;
    bool required = false;
};

struct AdmissibilityReport {
    std::vector<AdmissibilityEntry> entries;
    bool required_pass = true;
    std::string warning;  // set in blind mode (obstacle size unknown)

    std::string to_text() const;
};

/// Evaluates the time-window conditions (required), their strict variant, and
/// the pulse-size conditions (only when the obstacle is provided).
AdmissibilityReport validate_admissibility(const geom::Domain& omega,
                                           const geom::Domain* obstacle,
                                           const waves::SourcePulse& pulse, double horizon);

/// key=value record of an extraction (or of a refused/null extraction; the
/// qualitative trend verdict is reported either way when available).
std::string extraction_record(const std::optional<ExtractionResult>& result,
                              const std::string& null_reason,
                              const std::optional<Verdict>& trend = std::nullopt);

}  // namespace enclosure::extract

#include "enclosure/extraction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace enclosure::extract {

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Blowup: return "blowup";
        case Verdict::Decay: return "decay";
        default: return "indeterminate";
    }
}

namespace {

// Indices of the fit window per policy; may return fewer than min_points.
std::vector<std::size_t> select_window(const indic::IndicatorSeries& series,
                                       const std::vector<char>& mask,
                                       const WindowPolicy& policy) {
    std::vector<std::size_t> out;
    if (series.size() != mask.size())
        throw std::invalid_argument("select_window: mask size mismatch");
    if (policy.kind == WindowPolicy::Kind::Fixed) {
        for (std::size_t i = 0; i < series.size(); ++i)
            if (mask[i] && series.tau[i] >= policy.fixed_lo && series.tau[i] <= policy.fixed_hi)
                out.push_back(i);
        return out;
    }
    // Largest contiguous admissible run ending at the last admissible point.
    std::ptrdiff_t last = -1;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) last = static_cast<std::ptrdiff_t>(i);
    if (last < 0) return out;
    std::ptrdiff_t first = last;
    while (first > 0 && mask[first - 1]) --first;
    for (std::ptrdiff_t i = first; i <= last; ++i) out.push_back(static_cast<std::size_t>(i));
    return out;
}

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

Fit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

}  // namespace

ExtractionResult fit_slope(const indic::IndicatorSeries& series, const std::vector<char>& mask,
                           double horizon, double pulse_radius, const WindowPolicy& policy) {
    bool any_positive = false;
    for (std::size_t i = 0; i < series.size(); ++i)
        if (series.value[i] > 0.0) any_positive = true;
    if (!any_positive)
        throw NegativeIndicatorThroughout(
            "indicator is nonpositive at every tau; nothing to fit (pulse too small or "
            "noise-dominated)");

    const std::vector<std::size_t> window = select_window(series, mask, policy);
    if (static_cast<int>(window.size()) < policy.min_points) {
        std::ostringstream msg;
        msg << "only " << window.size() << " admissible points, need " << policy.min_points;
        throw InsufficientPoints(msg.str());
    }

    std::vector<double> x, y;
    x.reserve(window.size());
    y.reserve(window.size());
    for (std::size_t i : window) {
        x.push_back(series.tau[i]);
        y.push_back(std::log(series.value[i]));
    }
    const Fit f = least_squares(x, y);

    ExtractionResult out;
    out.slope = f.slope;
    out.r_d_estimate = (horizon - pulse_radius) + 0.5 * f.slope;
    out.tau_lo = x.front();
    out.tau_hi = x.back();
    out.n_points = static_cast<int>(window.size());
    out.r_squared = f.r_squared;
    out.threshold = 2.0 * (pulse_radius + out.r_d_estimate);
    out.verdict = qualitative_criterion(series, mask, policy);
    return out;
}

Verdict qualitative_criterion(const indic::IndicatorSeries& series, const std::vector<char>& mask,
                              const WindowPolicy& policy, double rate_tol) {
    const std::vector<std::size_t> window = select_window(series, mask, policy);
    // A trend needs two points; the stricter minimum applies to the slope fit.
    if (window.size() < 2) return Verdict::Indeterminate;
    std::vector<double> x, y;
    for (std::size_t i : window) {
        if (series.scaled[i].sign <= 0) return Verdict::Indeterminate;
        x.push_back(series.tau[i]);
        y.push_back(series.scaled[i].log_abs);
    }
    const Fit f = least_squares(x, y);
    if (f.slope > rate_tol) return Verdict::Blowup;
    if (f.slope < -rate_tol) return Verdict::Decay;
    return Verdict::Indeterminate;
}

Verdict expected_verdict(double horizon, double pulse_radius, double r_d) {
    const double threshold = 2.0 * (pulse_radius + r_d);
    if (horizon < threshold) return Verdict::Blowup;
    if (horizon > threshold) return Verdict::Decay;
    return Verdict::Indeterminate;
}

AdmissibilityReport validate_admissibility(const geom::Domain& omega,
                                           const geom::Domain* obstacle,
                                           const waves::SourcePulse& pulse, double horizon) {
    AdmissibilityReport report;
    const double r_omega = geom::sup_radius(omega, pulse.center);
    const double tol = 1e-12 * std::max(1.0, horizon);

    {
        AdmissibilityEntry e;
        e.name = "time_window";
        e.margin = (horizon - pulse.radius) - r_omega;
        e.pass = e.margin >= -tol;
        e.required = true;
        std::ostringstream d;
        d << "horizon - pulse_radius = " << horizon - pulse.radius
          << " must reach the cavity radius " << r_omega;
        e.detail = d.str();
        report.entries.push_back(e);
    }
    {
        AdmissibilityEntry e;
        e.name = "strict_time_window";
        e.margin = (horizon - pulse.radius) - r_omega;
        e.pass = e.margin > tol;
        e.required = false;  // needed only for the decay branch
        e.detail = "strict version of time_window (decay branch of the criterion)";
        report.entries.push_back(e);
    }
    if (obstacle) {
        const double r_d = geom::sup_radius(*obstacle, pulse.center);
        {
            AdmissibilityEntry e;
            e.name = "pulse_size";
            e.margin = (pulse.radius + 2.0 * r_d) - r_omega;
            e.pass = e.margin > tol;
            e.required = false;
            std::ostringstream d;
            d << "pulse_radius + 2 * obstacle_radius = " << pulse.radius + 2.0 * r_d
              << " must exceed the cavity radius " << r_omega;
            e.detail = d.str();
            report.entries.push_back(e);
        }
        {
            // Equivalent broken-path form of the same condition.
            AdmissibilityEntry e;
            e.name = "pulse_size_path_form";
            e.margin = horizon - ((horizon - pulse.radius - r_d) + (r_omega - r_d));
            e.pass = e.margin > tol;
            e.required = false;
            e.detail = "horizon must exceed the shortest reflected path length";
            report.entries.push_back(e);
        }
    } else {
        report.warning =
            "blind mode: the pulse-size condition needs an a-priori lower bound on the "
            "obstacle radius; choose the pulse radius accordingly";
    }
    for (const auto& e : report.entries)
        if (e.required && !e.pass) report.required_pass = false;
    return report;
}

std::string AdmissibilityReport::to_text() const {
    std::ostringstream os;
    for (const auto& e : entries) {
        os << (e.pass ? "[pass] " : "[fail] ") << e.name << " (margin "
           << e.margin << (e.required ? ", required" : "") << "): " << e.detail << "\n";
    }
    if (!warning.empty()) os << "[warn] " << warning << "\n";
    return os.str();
}

std::string extraction_record(const std::optional<ExtractionResult>& result,
                              const std::string& null_reason,
                              const std::optional<Verdict>& trend) {
    std::ostringstream os;
    if (!result) {
        os << "status=null\n";
        os << "reason=" << null_reason << "\n";
        if (trend) os << "verdict=" << to_string(*trend) << "\n";
        return os.str();
    }
    char buf[640];
    std::snprintf(buf, sizeof(buf),
                  "status=ok\n"
                  "slope=%.17g\n"
                  "r_d_estimate=%.17g\n"
                  "tau_lo=%.17g\n"
                  "tau_hi=%.17g\n"
                  "n_points=%d\n"
                  "r_squared=%.17g\n"
                  "verdict=%s\n"
                  "threshold_2_eta_plus_rd=%.17g\n",
                  result->slope, result->r_d_estimate, result->tau_lo, result->tau_hi,
                  result->n_points, result->r_squared, to_string(result->verdict),
                  result->threshold);
    os << buf;
    return os.str();
}

}  // namespace enclosure::extract

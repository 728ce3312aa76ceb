#include "enclosure/analytic_wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "enclosure/quadrature.hpp"

namespace enclosure::waves {

namespace {

// Shell profile factor g(s) = (eta - s)^2 (2s + eta) / 6 for s = |r - t|;
// the product form avoids cancellation near the trailing/leading fronts.
inline double shell_profile(double eta, double s) {
    const double d = eta - s;
    return d * d * (2.0 * s + eta) / 6.0;
}

}  // namespace

double initial_profile(const SourcePulse& pulse, const Vec3& x) {
    const double r = distance(x, pulse.center);
    return r < pulse.radius ? pulse.radius - r : 0.0;
}

WaveRegion classify(const SourcePulse& pulse, double r, double t) {
    if (!(r >= 0.0) || !(t > 0.0))
        throw std::invalid_argument("classify: requires r >= 0 and t > 0");
    const double eta = pulse.radius;
    if (t - r >= eta) return WaveRegion::Lacuna;
    if (r - t >= eta) return WaveRegion::AheadOfFront;
    if (r + t < eta) return WaveRegion::Core;
    return WaveRegion::Shell;
}

double value(const SourcePulse& pulse, const Vec3& x, double t) {
    const double eta = pulse.radius;
    const double r = distance(x, pulse.center);
    switch (classify(pulse, r, t)) {
        case WaveRegion::AheadOfFront:
        case WaveRegion::Lacuna:
            return 0.0;
        case WaveRegion::Shell:
            return shell_profile(eta, std::fabs(r - t)) / (2.0 * r);
        case WaveRegion::Core:
            // (r + t)^3 - |r - t|^3 over 6r, split to stay stable for r -> 0.
            if (r < t) return eta * t - t * t - r * r / 3.0;
            return eta * t - r * t - t * t * t / (3.0 * r);
    }
    return 0.0;
}

double time_derivative(const SourcePulse& pulse, const Vec3& x, double t) {
    const double eta = pulse.radius;
    const double r = distance(x, pulse.center);
    switch (classify(pulse, r, t)) {
        case WaveRegion::AheadOfFront:
        case WaveRegion::Lacuna:
            return 0.0;
        case WaveRegion::Shell:
            return (r - t) * (eta - std::fabs(r - t)) / (2.0 * r);
        case WaveRegion::Core:
            if (r < t) return eta - 2.0 * t;
            return eta - r - t * t / r;
    }
    return 0.0;
}

double radial_derivative(const SourcePulse& pulse, double r, double t) {
    const double eta = pulse.radius;
    switch (classify(pulse, r, t)) {
        case WaveRegion::AheadOfFront:
        case WaveRegion::Lacuna:
            return 0.0;
        case WaveRegion::Shell: {
            const double s = std::fabs(r - t);
            const double sigma = (r >= t) ? 1.0 : -1.0;
            const double v = shell_profile(eta, s) / (2.0 * r);
            return sigma * s * (s - eta) / (2.0 * r) - v / r;
        }
        case WaveRegion::Core:
            if (r < t) return -2.0 * r / 3.0;
            return -t + t * t * t / (3.0 * r * r);
    }
    return 0.0;
}

Vec3 gradient(const SourcePulse& pulse, const Vec3& x, double t) {
    const Vec3 d = x - pulse.center;
    const double r = d.norm();
    if (r == 0.0) return {0.0, 0.0, 0.0};  // radial symmetry
    const double dvdr = radial_derivative(pulse, r, t);
    return d * (dvdr / r);
}

double spherical_mean(const SourcePulse& pulse, const Vec3& x, double t, int n_phi) {
    if (n_phi < 8) throw std::invalid_argument("spherical_mean: n_phi must be >= 8");
    const double eta = pulse.radius;
    const double r = distance(x, pulse.center);
    const WaveRegion region = classify(pulse, r, t);
    if (region == WaveRegion::AheadOfFront || region == WaveRegion::Lacuna) return 0.0;

    double phi_max;
    if (region == WaveRegion::Core) {
        phi_max = std::numbers::pi;  // whole sphere intersects the source ball
    } else {
        const double c = (r * r + t * t - eta * eta) / (2.0 * t * r);
        phi_max = std::acos(std::clamp(c, -1.0, 1.0));
    }

    const Rule1D rule = gauss_legendre_on(n_phi, 0.0, phi_max);
    double sum = 0.0;
    for (int i = 0; i < n_phi; ++i) {
        const double phi = rule.nodes[i];
        const double dist = std::sqrt(std::max(0.0, r * r + t * t - 2.0 * t * r * std::cos(phi)));
        sum += rule.weights[i] * std::sin(phi) * (eta - dist);
    }
    return 0.5 * t * sum;
}

}  // namespace enclosure::waves

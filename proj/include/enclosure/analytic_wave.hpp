#pragma once

#include "enclosure/vec3.hpp"

namespace enclosure::waves {

/// Cone-shaped initial velocity pulse supported on a ball: value
/// (radius - |x - center|) inside, 0 outside.
struct SourcePulse {
    Vec3 center;
    double radius = 0.0;  // pulse radius, > 0
};

/// Classification of (r, t) for the spherical pulse, r = |x - center|:
///   AheadOfFront: the leading front has not arrived (r - t >= radius);
///   Shell:        inside the active shell (|r - t| < radius < r + t);
///   Core:         whole source sphere still visible (r + t < radius);
///   Lacuna:       trailing front has passed, field is identically zero
///                 (t - r >= radius).
/// Ties on boundaries resolve in the order Lacuna, AheadOfFront, Core, Shell.
enum class WaveRegion { AheadOfFront, Shell, Core, Lacuna };

double initial_profile(const SourcePulse& pulse, const Vec3& x);

WaveRegion classify(const SourcePulse& pulse, double r, double t);

/// Field value at time t > 0. Zero ahead of the leading front and behind the
/// trailing front; cancellation-free product forms in Shell and Core.
double value(const SourcePulse& pulse, const Vec3& x, double t);

/// Time derivative of the field; equals radius - 2t at the pulse center in Core.
double time_derivative(const SourcePulse& pulse, const Vec3& x, double t);

/// Spatial gradient (radial); zero vector at the center by symmetry.
Vec3 gradient(const SourcePulse& pulse, const Vec3& x, double t);

/// Radial derivative d(value)/dr; used by gradient and exposed for tests.
double radial_derivative(const SourcePulse& pulse, double r, double t);

/// Independent check: evaluates the field as the polar-angle integral of the
/// initial profile over the intersection sphere, with an n_phi-point
/// Gauss-Legendre rule. Converges to value() as n_phi grows.
double spherical_mean(const SourcePulse& pulse, const Vec3& x, double t, int n_phi);

}  // namespace enclosure::waves

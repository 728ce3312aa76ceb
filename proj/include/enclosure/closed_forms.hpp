#pragma once

#include <utility>
#include <vector>

#include "enclosure/geometry.hpp"
#include "enclosure/vec3.hpp"

namespace enclosure::forms {

/// Laplace-domain sweep parameters; requires tau > 0 and horizon > pulse_radius.
struct LaplaceParams {
    double tau = 0.0;
    double horizon = 0.0;       // observation time T
    double pulse_radius = 0.0;  // eta

    LaplaceParams(double tau_, double horizon_, double pulse_radius_);
};

/// Spherical shell radii 0 <= r_inner < r_outer around a common center.
struct Annulus {
    double r_inner = 0.0;
    double r_outer = 0.0;

    Annulus(double r1, double r2);
};

// ---------------------------------------------------------------------------
// Radial kernels
// ---------------------------------------------------------------------------

/// sinh(tau*r)/r, extended by tau at r = 0. Overflows for tau*r beyond ~700;
/// use log_sinh_kernel there.
double sinh_kernel(double tau, double r);
double sinh_kernel(double tau, const Vec3& x, const Vec3& p);

/// log(sinh(tau*r)/r), valid for any tau*r (log-value channel).
double log_sinh_kernel(double tau, double r);

/// |d/dr sinh(tau*r)/r| = (tau*r*cosh(tau*r) - sinh(tau*r))/r^2 in log form.
double log_sinh_kernel_grad(double tau, double r);

/// e^{-tau*a} * sinh(tau*x) for a >= x >= 0 in factored form (no positive
/// exponentials are ever formed).
double exp_sinh(double tau, double a, double x);

// ---------------------------------------------------------------------------
// Shell moments and the shell potential identity
// ---------------------------------------------------------------------------

/// Radial moment factor of the shell potential, order j in {-1, 0, 1, 2}.
/// Strictly positive for r_inner < r_outer.
double shell_moment(int j, double tau, const Annulus& shell);

/// Three-term recurrence linking consecutive shell moments; exposed for tests.
double shell_moment_by_recurrence(int j, double tau, const Annulus& shell);

/// Closed form of the screened (Yukawa) potential of the density |y-p|^j over
/// the shell, evaluated at x strictly inside the inner sphere:
///   (1/4pi) \int e^{-tau|x-y|}/|x-y| |y-p|^j dy
///     = shell_moment(j)/tau^2 * sinh_kernel(tau, |x-p|).
double yukawa_shell_potential(int j, double tau, const Annulus& shell, const Vec3& x,
                              const Vec3& p);

/// The same integral by 3-D product quadrature (independent oracle).
double yukawa_shell_potential_oracle(int j, double tau, const Annulus& shell, const Vec3& x,
                                     const Vec3& p, int order);

// ---------------------------------------------------------------------------
// Source-shell coefficients (Laplace image of the time-T pulse profile)
// ---------------------------------------------------------------------------

/// Coefficients such that
///   (1/4pi) \int_{shell} e^{-tau|x-y|}/|x-y| (tau*v(y,T) - dt v(y,T)) dy
///     = (outer + inner)/tau^2 * sinh_kernel(tau, |x-p|)
/// where the outer coefficient covers radii [T, T+eta] and the inner one
/// [T-eta, T]. Each is exposed through two algebraically equal routes: the
/// moment combination and the polynomial/exponential form.
double source_coeff_outer_moments(const LaplaceParams& p);
double source_coeff_outer_poly(const LaplaceParams& p);
double source_coeff_inner_moments(const LaplaceParams& p);
double source_coeff_inner_poly(const LaplaceParams& p);

/// Sum of absolute values of the moment-combination terms: the conditioning
/// scale of the two-route comparison (the coefficient itself can cross zero,
/// where a value-relative comparison is meaningless in double precision).
double source_coeff_outer_moment_scale(const LaplaceParams& p);
double source_coeff_inner_moment_scale(const LaplaceParams& p);

/// Cubic weight polynomials of the two shell halves.
double outer_shell_poly(const LaplaceParams& p, double xi);   // multiplies e^{-tau*xi}
double inner_shell_poly(const LaplaceParams& p, double xi);

/// outer + inner via the explicit three-exponential formula.
double source_coeff_total(const LaplaceParams& p);

/// e^{tau*(T - eta)} * (outer + inner), factored so it stays finite for any
/// tau; tends to (eta - 2/tau)/tau as tau grows.
double source_coeff_total_scaled(const LaplaceParams& p);

/// Full shell integral (tau^2/4pi) \int e^{-tau|x-y|}/|x-y| (tau v - dt v) dy
/// by product quadrature over the shell [T-eta, T+eta], split at radius T.
/// Converges to source_coeff_total * sinh_kernel. x must lie strictly inside
/// the inner sphere.
double source_shell_integral_oracle(const LaplaceParams& p, const Vec3& x, const Vec3& center,
                                    int order);

/// Same oracle restricted to one half shell: which = +1 outer, -1 inner.
double source_shell_half_oracle(const LaplaceParams& p, const Vec3& x, const Vec3& center,
                                int which, int order);

// ---------------------------------------------------------------------------
// Ball potentials (screened potential of |y|^j over a centered ball)
// ---------------------------------------------------------------------------

/// Closed form of \int_{|y|<eta} e^{-tau|x-y|}/|x-y| |y|^j dy for |x| < eta,
/// j in {-1, 0, 1, 2}; centered limits at x = 0.
double yukawa_ball_potential(int j, double tau, double eta, const Vec3& x);

/// Same value assembled from the radial antiderivative table (independent
/// algebraic route, exercised against the closed form).
double yukawa_ball_potential_radial(int j, double tau, double eta, double xi);

/// Same integral by 3-D ball quadrature (oracle).
double yukawa_ball_potential_oracle(int j, double tau, double eta, const Vec3& x, int order);

// ---------------------------------------------------------------------------
// Field energy of the sinh kernel over a domain
// ---------------------------------------------------------------------------

/// log of \int_U (sinh(tau|x-p|)/|x-p|)^2 dx and of the matching squared
/// gradient integral, accumulated in the log domain. The domain is swept with
/// a polar rule around p (p must lie inside U); `order` controls the angular
/// rule, the radial rule refines with tau automatically.
struct FieldEnergyLog {
    double log_value_sq;
    double log_grad_sq;
};
FieldEnergyLog modified_helmholtz_energy(double tau, const geom::Domain& domain, const Vec3& p,
                                         int order);

}  // namespace enclosure::forms

#include "enclosure/closed_forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "enclosure/analytic_wave.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/lognum.hpp"
#include "enclosure/quadrature.hpp"

namespace enclosure::forms {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kLog2 = 0.6931471805599453;
}  // namespace

LaplaceParams::LaplaceParams(double tau_, double horizon_, double pulse_radius_)
    : tau(tau_), horizon(horizon_), pulse_radius(pulse_radius_) {
    if (!(tau > 0.0)) throw std::invalid_argument("LaplaceParams: tau must be positive");
    if (!(pulse_radius > 0.0))
        throw std::invalid_argument("LaplaceParams: pulse radius must be positive");
    if (!(horizon > pulse_radius))
        throw AdmissibilityError("LaplaceParams: horizon must exceed the pulse radius");
}

Annulus::Annulus(double r1, double r2) : r_inner(r1), r_outer(r2) {
    if (!(r_inner >= 0.0 && r_outer > r_inner))
        throw std::invalid_argument("Annulus: requires 0 <= r_inner < r_outer");
}

double sinh_kernel(double tau, double r) {
    const double z = tau * r;
    if (z < 1e-4) {
        // sinh(z)/r = tau * (1 + z^2/6 + z^4/120 + ...)
        return tau * (1.0 + z * z / 6.0);
    }
    return std::sinh(z) / r;
}

double sinh_kernel(double tau, const Vec3& x, const Vec3& p) {
    return sinh_kernel(tau, distance(x, p));
}

double log_sinh_kernel(double tau, double r) {
    const double z = tau * r;
    if (z < 1e-4) return std::log(tau) + std::log1p(z * z / 6.0);
    if (z <= 36.0) return std::log(std::sinh(z) / r);
    return z - kLog2 - std::log(r) + std::log1p(-std::exp(-2.0 * z));
}

double log_sinh_kernel_grad(double tau, double r) {
    const double z = tau * r;
    if (r == 0.0) return -std::numeric_limits<double>::infinity();
    if (z < 0.5) {
        // z*cosh(z) - sinh(z) = z^3/3 (1 + z^2/10 + z^4/280 + ...)
        const double series = 1.0 + z * z / 10.0 + z * z * z * z / 280.0;
        return 3.0 * std::log(z) - std::log(3.0) + std::log(series) - 2.0 * std::log(r);
    }
    if (z <= 36.0) return std::log(z * std::cosh(z) - std::sinh(z)) - 2.0 * std::log(r);
    const double corr = std::log1p(std::exp(-2.0 * z) * (z + 1.0) / (z - 1.0));
    return z + std::log(z - 1.0) - kLog2 + corr - 2.0 * std::log(r);
}

double exp_sinh(double tau, double a, double x) {
    if (!(a >= x && x >= 0.0)) throw std::invalid_argument("exp_sinh: requires a >= x >= 0");
    return 0.5 * (std::exp(-tau * (a - x)) - std::exp(-tau * (a + x)));
}

double shell_moment(int j, double tau, const Annulus& shell) {
    const double r1 = shell.r_inner, r2 = shell.r_outer;
    const double e1 = std::exp(-tau * r1), e2 = std::exp(-tau * r2);
    const double it = 1.0 / tau;
    switch (j) {
        case -1:
            return e1 - e2;
        case 0:
            return (r1 + it) * e1 - (r2 + it) * e2;
        case 1:
            return (r1 * r1 + 2.0 * it * r1 + 2.0 * it * it) * e1 -
                   (r2 * r2 + 2.0 * it * r2 + 2.0 * it * it) * e2;
        case 2:
            return (r1 * r1 * r1 + 3.0 * it * r1 * r1 + 6.0 * it * it * r1 + 6.0 * it * it * it) *
                       e1 -
                   (r2 * r2 * r2 + 3.0 * it * r2 * r2 + 6.0 * it * it * r2 + 6.0 * it * it * it) *
                       e2;
        default:
            throw std::invalid_argument("shell_moment: j must be in {-1, 0, 1, 2}");
    }
}

double shell_moment_by_recurrence(int j, double tau, const Annulus& shell) {
    if (j == -1) return shell_moment(-1, tau, shell);
    const double r1 = shell.r_inner, r2 = shell.r_outer;
    const double e1 = std::exp(-tau * r1), e2 = std::exp(-tau * r2);
    const double prev = shell_moment_by_recurrence(j - 1, tau, shell);
    const double k = static_cast<double>(j + 1);
    return std::pow(r1, j + 1) * e1 - std::pow(r2, j + 1) * e2 + (k / tau) * prev;
}

double yukawa_shell_potential(int j, double tau, const Annulus& shell, const Vec3& x,
                              const Vec3& p) {
    const double xi = distance(x, p);
    if (!(xi < shell.r_inner))
        throw GeometryError("shell potential: point must lie inside the inner sphere");
    return shell_moment(j, tau, shell) / (tau * tau) * sinh_kernel(tau, xi);
}

double yukawa_shell_potential_oracle(int j, double tau, const Annulus& shell, const Vec3& x,
                                     const Vec3& p, int order) {
    const double xi = distance(x, p);
    if (!(xi < shell.r_inner))
        throw GeometryError("shell potential oracle: point must lie inside the inner sphere");
    const geom::VolumeQuadrature q =
        geom::annulus_volume_quadrature(p, shell.r_inner, shell.r_outer, order);
    double sum = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        const double s = distance(x, q.nodes[i]);
        const double rho = distance(q.nodes[i], p);
        sum += q.weights[i] * std::exp(-tau * s) / s * std::pow(rho, j);
    }
    return sum / (4.0 * kPi);
}

namespace {

struct MomentCombo {
    double value;
    double scale;  // sum of absolute terms
};

// Moment-combination over the outer half shell [T, T+eta].
MomentCombo outer_combo(const LaplaceParams& p) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    const Annulus shell(T, T + eta);
    const double terms[4] = {
        (tau * (eta - 2.0 * T) * (eta + T) * (eta + T) / 12.0 + 0.5 * T * (eta + T)) *
            shell_moment(-1, tau, shell),
        (0.5 * tau * T * (eta + T) - 0.5 * (eta + 2.0 * T)) * shell_moment(0, tau, shell),
        (-0.25 * tau * (eta + 2.0 * T) + 0.5) * shell_moment(1, tau, shell),
        (tau / 6.0) * shell_moment(2, tau, shell)};
    MomentCombo out{0.0, 0.0};
    for (double t : terms) {
        out.value += t;
        out.scale += std::fabs(t);
    }
    return out;
}

// Moment-combination over the inner half shell [T-eta, T].
MomentCombo inner_combo(const LaplaceParams& p) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    const Annulus shell(T - eta, T);
    const double terms[4] = {
        (tau * (eta + 2.0 * T) * (eta - T) * (eta - T) / 12.0 + 0.5 * T * (eta - T)) *
            shell_moment(-1, tau, shell),
        (0.5 * tau * T * (eta - T) - 0.5 * (eta - 2.0 * T)) * shell_moment(0, tau, shell),
        (-0.25 * tau * (eta - 2.0 * T) - 0.5) * shell_moment(1, tau, shell),
        (-tau / 6.0) * shell_moment(2, tau, shell)};
    MomentCombo out{0.0, 0.0};
    for (double t : terms) {
        out.value += t;
        out.scale += std::fabs(t);
    }
    return out;
}

}  // namespace

double source_coeff_outer_moments(const LaplaceParams& p) { return outer_combo(p).value; }
double source_coeff_inner_moments(const LaplaceParams& p) { return inner_combo(p).value; }
double source_coeff_outer_moment_scale(const LaplaceParams& p) { return outer_combo(p).scale; }
double source_coeff_inner_moment_scale(const LaplaceParams& p) { return inner_combo(p).scale; }

double outer_shell_poly(const LaplaceParams& p, double xi) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    const double a3 = tau / 6.0;
    const double a2 = 1.0 - 0.25 * tau * (eta + 2.0 * T);
    const double a1 = 0.5 * tau * T * (eta + T) - (eta + 2.0 * T) + 2.0 / tau;
    const double a0 = tau * (eta - 2.0 * T) * (eta + T) * (eta + T) / 12.0 + T * (eta + T) -
                      (eta + 2.0 * T) / tau + 2.0 / (tau * tau);
    return ((a3 * xi + a2) * xi + a1) * xi + a0;
}

double inner_shell_poly(const LaplaceParams& p, double xi) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    const double a3 = -tau / 6.0;
    const double a2 = -(1.0 + 0.25 * tau * (eta - 2.0 * T));
    const double a1 = 0.5 * tau * T * (eta - T) - (eta - 2.0 * T) - 2.0 / tau;
    const double a0 = tau * (eta + 2.0 * T) * (eta - T) * (eta - T) / 12.0 + T * (eta - T) -
                      (eta - 2.0 * T) / tau - 2.0 / (tau * tau);
    return ((a3 * xi + a2) * xi + a1) * xi + a0;
}

double source_coeff_outer_poly(const LaplaceParams& p) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    return outer_shell_poly(p, T) * std::exp(-tau * T) -
           outer_shell_poly(p, T + eta) * std::exp(-tau * (T + eta));
}

double source_coeff_inner_poly(const LaplaceParams& p) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    return inner_shell_poly(p, T - eta) * std::exp(-tau * (T - eta)) -
           inner_shell_poly(p, T) * std::exp(-tau * T);
}

double source_coeff_total(const LaplaceParams& p) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    return 4.0 / (tau * tau) * std::exp(-tau * T) -
           (eta + 2.0 / tau) / tau * std::exp(-tau * (T + eta)) +
           (eta - 2.0 / tau) / tau * std::exp(-tau * (T - eta));
}

double source_coeff_total_scaled(const LaplaceParams& p) {
    const double tau = p.tau, eta = p.pulse_radius;
    return (eta - 2.0 / tau) / tau + 4.0 / (tau * tau) * std::exp(-tau * eta) -
           (eta + 2.0 / tau) / tau * std::exp(-2.0 * tau * eta);
}

double source_shell_half_oracle(const LaplaceParams& p, const Vec3& x, const Vec3& center,
                                int which, int order) {
    const double tau = p.tau, T = p.horizon, eta = p.pulse_radius;
    const double xi = distance(x, center);
    if (!(xi < T - eta))
        throw GeometryError("source shell oracle: point must lie inside the inner sphere");
    const double r1 = (which > 0) ? T : T - eta;
    const double r2 = (which > 0) ? T + eta : T;
    const geom::VolumeQuadrature q = geom::annulus_volume_quadrature(center, r1, r2, order);
    const waves::SourcePulse pulse{center, eta};
    double sum = 0.0;
    for (size_t i = 0; i < q.size(); ++i) {
        const Vec3& y = q.nodes[i];
        const double s = distance(x, y);
        const double profile =
            tau * waves::value(pulse, y, T) - waves::time_derivative(pulse, y, T);
        sum += q.weights[i] * std::exp(-tau * s) / s * profile;
    }
    return tau * tau / (4.0 * kPi) * sum;
}

double source_shell_integral_oracle(const LaplaceParams& p, const Vec3& x, const Vec3& center,
                                    int order) {
    return source_shell_half_oracle(p, x, center, -1, order) +
           source_shell_half_oracle(p, x, center, +1, order);
}

namespace {

// (1 - e^{-tau*xi}) / xi, extended by tau at xi = 0.
inline double one_minus_exp_over(double tau, double xi) {
    if (tau * xi < 1e-8) return tau * (1.0 - 0.5 * tau * xi);
    return -std::expm1(-tau * xi) / xi;
}

// e^{-tau*eta} sinh(tau*xi) / xi, extended by tau*e^{-tau*eta} at xi = 0.
inline double damped_sinh_over(double tau, double eta, double xi) {
    if (tau * xi < 1e-8) return tau * std::exp(-tau * eta);
    return exp_sinh(tau, eta, xi) / xi;
}

}  // namespace

double yukawa_ball_potential(int j, double tau, double eta, const Vec3& x) {
    const double xi = x.norm();
    if (!(xi < eta)) throw GeometryError("ball potential: point must lie inside the ball");
    const double pre = 4.0 * kPi / (tau * tau);
    const double ds = damped_sinh_over(tau, eta, xi);
    switch (j) {
        case -1:
            return pre * (one_minus_exp_over(tau, xi) - ds);
        case 0:
            return pre * (1.0 - (eta + 1.0 / tau) * ds);
        case 1:
            return pre * (xi + 2.0 / (tau * tau) * one_minus_exp_over(tau, xi) -
                          (eta * eta + 2.0 * eta / tau + 2.0 / (tau * tau)) * ds);
        case 2:
            return pre * (xi * xi + 6.0 / (tau * tau) -
                          (eta * eta * eta + 3.0 * eta * eta / tau + 6.0 * eta / (tau * tau) +
                           6.0 / (tau * tau * tau)) *
                              ds);
        default:
            throw std::invalid_argument("ball potential: j must be in {-1, 0, 1, 2}");
    }
}

double yukawa_ball_potential_radial(int j, double tau, double eta, double xi) {
    if (!(xi > 0.0 && xi < eta))
        throw GeometryError("radial ball potential: requires 0 < xi < eta");
    const double exi = std::exp(-tau * xi);
    const double exp_in = std::exp(-tau * (eta - xi));   // e^{-tau(eta - xi)}
    const double exp_out = std::exp(-tau * (eta + xi));  // e^{-tau(eta + xi)}
    const double t2 = tau * tau, t3 = t2 * tau, t4 = t3 * tau;
    const double quad = tau * tau * eta * eta + 2.0 * tau * eta + 2.0;

    // Radial moments of e^{-tau|xi - r|} over [0, eta].
    double near;
    switch (j) {
        case -1:
            near = 2.0 / tau - exi / tau - exp_in / tau;
            break;
        case 0:
            near = 2.0 * xi / tau + exi / t2 - exp_in * (eta + 1.0 / tau) / tau;
            break;
        case 1:
            near = (2.0 * t2 * xi * xi + 4.0 - 2.0 * exi - quad * exp_in) / t3;
            break;
        case 2:
            near = 2.0 * xi * xi * xi / tau - exp_in * eta * eta * eta / tau + 6.0 / t4 * exi -
                   3.0 / t4 * (quad * exp_in - 4.0 * tau * xi);
            break;
        default:
            throw std::invalid_argument("radial ball potential: j must be in {-1, 0, 1, 2}");
    }

    // Radial moments of e^{-tau(xi + r)} over [0, eta].
    double far;
    switch (j) {
        case -1:
            far = exi / tau - exp_out / tau;
            break;
        case 0:
            far = exi / t2 - exp_out * (eta + 1.0 / tau) / tau;
            break;
        case 1:
            far = exi * (2.0 - std::exp(-tau * eta) * quad) / t3;
            break;
        default:  // j == 2
            far = -eta * eta * eta * exp_out / tau +
                  3.0 / t4 * exi * (2.0 - std::exp(-tau * eta) * quad);
            break;
    }

    return 2.0 * kPi / (xi * tau) * (near - far);
}

double yukawa_ball_potential_oracle(int j, double tau, double eta, const Vec3& x, int order) {
    const double xi = x.norm();
    if (!(xi < eta)) throw GeometryError("ball potential oracle: point must lie inside the ball");

    // Spherical product rule with the polar axis through x. The polar variable
    // is substituted as cos(gamma) = 1 - w^2, which turns the integrable 1/s
    // spike at y ~ x into a smooth integrand (s^2 = (rho-xi)^2 + 2 rho xi w^2).
    Vec3 axis = (xi > 0.0) ? x / xi : Vec3{0, 0, 1};
    Vec3 seed = std::fabs(axis.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    Vec3 b = axis.cross(seed);
    b = b / b.norm();
    const Vec3 c = axis.cross(b);

    const Rule1D radial_lo = gauss_legendre_on(order, 0.0, xi);
    const Rule1D radial_hi = gauss_legendre_on(order, xi, eta);
    const Rule1D polar = composite_gauss_legendre(order, 0.0, std::sqrt(2.0), 2);
    const int n_az = 16;
    const double w_az = 2.0 * kPi / n_az;

    double sum = 0.0;
    for (const Rule1D* radial : {&radial_lo, &radial_hi}) {
        for (size_t ir = 0; ir < radial->nodes.size(); ++ir) {
            const double rho = radial->nodes[ir];
            const double w_r = radial->weights[ir] * std::pow(rho, 2 + j);
            for (size_t iw = 0; iw < polar.nodes.size(); ++iw) {
                const double w = polar.nodes[iw];
                const double u = 1.0 - w * w;          // cos(gamma)
                const double jac = 2.0 * w * polar.weights[iw];
                const double sxy = std::sqrt(1.0 - u * u);
                for (int ia = 0; ia < n_az; ++ia) {
                    const double phi = (ia + 0.5) * w_az;
                    const Vec3 dir =
                        axis * u + (b * std::cos(phi) + c * std::sin(phi)) * sxy;
                    const double s = distance(x, dir * rho);
                    sum += w_r * jac * w_az * std::exp(-tau * s) / std::max(s, 1e-300);
                }
            }
        }
    }
    return sum;
}

namespace {

// Exit radius of the ray p + t*w from a domain containing p.
double ray_exit(const geom::Domain& domain, const Vec3& p, const Vec3& w) {
    if (domain.is_ball()) {
        const geom::Ball& b = domain.ball();
        const Vec3 d = p - b.center;
        const double bq = w.dot(d);
        const double cq = d.norm2() - b.radius * b.radius;
        const double disc = bq * bq - cq;
        return -bq + std::sqrt(std::max(0.0, disc));
    }
    if (domain.is_box()) {
        const geom::Box& b = domain.box();
        double t = std::numeric_limits<double>::infinity();
        const double po[3] = {p.x, p.y, p.z};
        const double wo[3] = {w.x, w.y, w.z};
        const double lo[3] = {b.lo.x, b.lo.y, b.lo.z};
        const double hi[3] = {b.hi.x, b.hi.y, b.hi.z};
        for (int a = 0; a < 3; ++a) {
            if (wo[a] > 1e-14) t = std::min(t, (hi[a] - po[a]) / wo[a]);
            else if (wo[a] < -1e-14) t = std::min(t, (lo[a] - po[a]) / wo[a]);
        }
        return t;
    }
    throw GeometryError("field energy: union domains are unsupported");
}

}  // namespace

FieldEnergyLog modified_helmholtz_energy(double tau, const geom::Domain& domain, const Vec3& p,
                                         int order) {
    if (!domain.contains(p))
        throw GeometryError("field energy: the sweep center must lie inside the domain");
    const geom::SurfaceQuadrature dirs = geom::unit_sphere_rule(order);
    LogSumAccumulator value_acc, grad_acc;
    for (size_t d = 0; d < dirs.size(); ++d) {
        const double rho = ray_exit(domain, p, dirs.nodes[d]);
        if (!(rho > 0.0)) continue;
        const int panels = std::clamp(static_cast<int>(std::ceil(rho * tau / 3.0)), 2, 400);
        const Rule1D radial = composite_gauss_legendre(12, 0.0, rho, panels);
        for (size_t i = 0; i < radial.nodes.size(); ++i) {
            const double r = radial.nodes[i];
            const double log_w =
                std::log(dirs.weights[d] * radial.weights[i]) + 2.0 * std::log(std::max(r, 1e-300));
            value_acc.add_log(log_w + 2.0 * log_sinh_kernel(tau, r));
            grad_acc.add_log(log_w + 2.0 * log_sinh_kernel_grad(tau, r));
        }
    }
    return {value_acc.log_sum(), grad_acc.log_sum()};
}

}  // namespace enclosure::forms

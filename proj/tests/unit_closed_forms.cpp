#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "enclosure/closed_forms.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/geometry.hpp"

using namespace enclosure;
using namespace enclosure::forms;

namespace {
constexpr double kPi = std::numbers::pi;

double rel_diff(double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1e-300});
}
}  // namespace

TEST_CASE("sinh kernel values and extension") {
    CHECK(sinh_kernel(3.0, 0.0) == doctest::Approx(3.0));
    CHECK(sinh_kernel(2.0, 1.0) == doctest::Approx(std::sinh(2.0)).epsilon(1e-14));
    CHECK(sinh_kernel(2.0, Vec3{1, 1, 1}, Vec3{1, 1, 1}) == doctest::Approx(2.0));
    // Continuity across the series cutoff.
    CHECK(rel_diff(sinh_kernel(1.0, 0.99e-4), sinh_kernel(1.0, 1.01e-4)) < 1e-7);
}

TEST_CASE("log channel of the sinh kernel") {
    // Moderate arguments agree with the direct kernel.
    for (double tau : {0.5, 3.0, 20.0}) {
        for (double r : {1e-6, 0.1, 1.0, 1.7}) {
            CHECK(log_sinh_kernel(tau, r) ==
                  doctest::Approx(std::log(sinh_kernel(tau, r))).epsilon(1e-12));
        }
    }
    // Large arguments: sinh(z) ~ e^z / 2.
    CHECK(log_sinh_kernel(1000.0, 1.0) == doctest::Approx(1000.0 - std::log(2.0)).epsilon(1e-12));
    // Gradient kernel against a centered difference of the plain kernel.
    const double tau = 4.0, r = 0.7, h = 1e-6;
    const double fd = (sinh_kernel(tau, r + h) - sinh_kernel(tau, r - h)) / (2.0 * h);
    CHECK(log_sinh_kernel_grad(tau, r) == doctest::Approx(std::log(fd)).epsilon(1e-8));
}

TEST_CASE("shell moments: pinned values, positivity, recurrences") {
    CHECK(shell_moment(-1, 3.0, Annulus(1.0, 1.0 + 1e-12)) < 1e-11);
    CHECK(shell_moment(0, 1.0, Annulus(1.0, 2.0)) ==
          doctest::Approx(2.0 * std::exp(-1.0) - 3.0 * std::exp(-2.0)).epsilon(1e-13));

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> tau_d(0.5, 50.0), r_d(0.1, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const double tau = tau_d(rng);
        double r1 = r_d(rng), r2 = r_d(rng);
        if (r1 > r2) std::swap(r1, r2);
        if (r2 - r1 < 1e-6) r2 += 1e-3;
        const Annulus shell(r1, r2);
        for (int j : {-1, 0, 1, 2}) {
            const double direct = shell_moment(j, tau, shell);
            CHECK(direct > 0.0);
            const double rec = shell_moment_by_recurrence(j, tau, shell);
            CHECK(rel_diff(direct, rec) < 1e-13);
        }
    }
    CHECK_THROWS(shell_moment(3, 1.0, Annulus(0.5, 1.0)));
}

TEST_CASE("shell potential closed form equals 3-D quadrature") {
    const double tau = 3.0;
    const Annulus shell(1.0, 1.5);
    const Vec3 p{0.2, -0.1, 0.4};
    const Vec3 x = p + Vec3{0.4, 0.0, 0.0};
    for (int j : {-1, 0, 1, 2}) {
        const double closed = yukawa_shell_potential(j, tau, shell, x, p);
        const double oracle = yukawa_shell_potential_oracle(j, tau, shell, x, p, 48);
        CHECK(rel_diff(closed, oracle) < 1e-6);
    }
    CHECK_THROWS_AS(yukawa_shell_potential(0, tau, shell, p + Vec3{1.2, 0, 0}, p),
                    GeometryError);
}

TEST_CASE("source coefficients: moment and polynomial paths agree") {
    {
        const LaplaceParams p(5.0, 2.0, 0.5);
        CHECK(rel_diff(source_coeff_outer_moments(p), source_coeff_outer_poly(p)) < 1e-12);
        CHECK(rel_diff(source_coeff_inner_moments(p), source_coeff_inner_poly(p)) < 1e-12);
    }
    // The coefficients cross zero inside the parameter space; near such zeros
    // a value-relative comparison measures cancellation roundoff instead of
    // the identity, so draws where the value is tiny against the term scale
    // are redrawn (a wrong formula still fails at every ordinary draw).
    std::mt19937 rng(53);
    std::uniform_real_distribution<double> tau_d(0.5, 40.0), eta_d(0.2, 1.5), ratio_d(1.05, 4.0);
    int accepted = 0;
    while (accepted < 1000) {
        const double eta = eta_d(rng);
        const LaplaceParams q(tau_d(rng), eta * ratio_d(rng), eta);
        const double outer = source_coeff_outer_moments(q);
        const double inner = source_coeff_inner_moments(q);
        if (std::fabs(outer) < 1e-3 * source_coeff_outer_moment_scale(q)) continue;
        if (std::fabs(inner) < 1e-3 * source_coeff_inner_moment_scale(q)) continue;
        CHECK(rel_diff(outer, source_coeff_outer_poly(q)) < 1e-11);
        CHECK(rel_diff(inner, source_coeff_inner_poly(q)) < 1e-11);
        ++accepted;
    }
}

TEST_CASE("source polynomial endpoint identities") {
    // Conditioning: the cubic evaluates through terms of size tau*T^3 while
    // the endpoint values are of size eta/tau, so keep tau*T moderate.
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> tau_d(0.5, 8.0), eta_d(0.3, 1.5), gap_d(0.05, 1.5);
    for (int k = 0; k < 200; ++k) {
        const double eta = eta_d(rng);
        const LaplaceParams p(tau_d(rng), eta + gap_d(rng), eta);
        const double tau = p.tau, T = p.horizon;
        // Trailing-edge value of the inner polynomial.
        CHECK(rel_diff(inner_shell_poly(p, T - eta), (eta - 2.0 / tau) / tau) < 1e-12);
        // Leading-edge value of the outer polynomial.
        CHECK(rel_diff(outer_shell_poly(p, T + eta), (eta + 2.0 / tau) / tau) < 1e-12);
        // Midpoint difference.
        CHECK(rel_diff(outer_shell_poly(p, T) - inner_shell_poly(p, T), 4.0 / (tau * tau)) <
              1e-9);
    }
}

TEST_CASE("total source coefficient: explicit formula and scaling") {
    const LaplaceParams p(5.0, 2.0, 0.5);
    const double split = source_coeff_outer_poly(p) + source_coeff_inner_poly(p);
    CHECK(rel_diff(source_coeff_total(p), split) < 1e-12);

    // Scaled channel is consistent where both are representable.
    CHECK(rel_diff(source_coeff_total_scaled(p),
                   source_coeff_total(p) * std::exp(p.tau * (p.horizon - p.pulse_radius))) <
          1e-12);

    // Large-tau behavior: tau * scaled -> eta; within 2% at tau = 200/eta.
    for (auto [T, eta] : {std::pair{2.0, 0.5}, {1.9, 0.9}, {3.5, 0.25}}) {
        const double tau = 200.0 / eta;
        const LaplaceParams q(tau, T, eta);
        const double limit = tau * source_coeff_total_scaled(q);
        CHECK(std::fabs(limit - eta) / eta < 0.02);
    }
    // Well beyond the overflow range of e^{tau*(T-eta)} the scaled form stays finite.
    const LaplaceParams big(5000.0, 2.0, 0.5);
    CHECK(std::isfinite(source_coeff_total_scaled(big)));
}

TEST_CASE("source shell integral oracle matches the closed form") {
    const LaplaceParams p(4.0, 1.5, 0.4);
    const Vec3 center{0.0, 0.0, 0.0};
    for (double xi : {0.3, 0.8}) {
        const Vec3 x{xi, 0.0, 0.0};
        const double oracle = source_shell_integral_oracle(p, x, center, 64);
        const double closed = source_coeff_total(p) * sinh_kernel(p.tau, xi);
        CHECK(rel_diff(oracle, closed) < 1e-5);
    }
    // The two half-shell pieces are additive and match their own closed forms.
    const Vec3 x{0.5, 0.2, -0.1};
    const double inner = source_shell_half_oracle(p, x, center, -1, 48);
    const double outer = source_shell_half_oracle(p, x, center, +1, 48);
    const double whole = source_shell_integral_oracle(p, x, center, 48);
    CHECK(rel_diff(inner + outer, whole) < 1e-8);
    const double kern = sinh_kernel(p.tau, x.norm());
    CHECK(rel_diff(inner, source_coeff_inner_poly(p) * kern) < 1e-5);
    CHECK(rel_diff(outer, source_coeff_outer_poly(p) * kern) < 1e-5);
}

TEST_CASE("ball potentials: center limit and oracle equivalence") {
    // j = 0 at the center: pre-computed closed value pi * (1 - 3 e^{-2}).
    const double v0_center = yukawa_ball_potential(0, 2.0, 1.0, Vec3{1e-9, 0, 0});
    CHECK(v0_center == doctest::Approx(kPi * (1.0 - 3.0 * std::exp(-2.0))).epsilon(1e-8));
    // ... and the 3-D quadrature agrees at a nearby point.
    const double near = yukawa_ball_potential_oracle(0, 2.0, 1.0, Vec3{1e-3, 0, 0}, 32);
    CHECK(rel_diff(near, v0_center) < 1e-4);

    const Vec3 x{0.5, 0.0, 0.0};
    for (int j : {-1, 0, 1, 2}) {
        const double closed = yukawa_ball_potential(j, 3.0, 1.0, x);
        const double oracle = yukawa_ball_potential_oracle(j, 3.0, 1.0, x, 32);
        CHECK(rel_diff(closed, oracle) < 1e-4);
    }
}

TEST_CASE("ball potentials: radial antiderivative path agrees to 1e-12") {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> tau_d(0.5, 30.0), eta_d(0.3, 2.0), frac(0.05, 0.95);
    for (int k = 0; k < 300; ++k) {
        const double tau = tau_d(rng), eta = eta_d(rng);
        const double xi = eta * frac(rng);
        for (int j : {-1, 0, 1, 2}) {
            const double closed = yukawa_ball_potential(j, tau, eta, Vec3{xi, 0, 0});
            const double radial = yukawa_ball_potential_radial(j, tau, eta, xi);
            CHECK(rel_diff(closed, radial) < 1e-12);
        }
    }
    CHECK_THROWS_AS(yukawa_ball_potential(0, 1.0, 0.5, Vec3{0.6, 0, 0}), GeometryError);
}

TEST_CASE("field energy: radius recovery and translation invariance") {
    const geom::Domain unit{geom::Ball{{0, 0, 0}, 1.0}};
    double prev = 0.0;
    for (double tau : {20.0, 40.0, 80.0}) {
        const FieldEnergyLog e = modified_helmholtz_energy(tau, unit, {0, 0, 0}, 48);
        const double est = e.log_value_sq / (2.0 * tau);
        CHECK(est > prev);  // monotone approach from below
        prev = est;
        // Exact 1-D reduction: int = 4 pi (sinh(2 tau)/(4 tau) - 1/2).
        const double exact =
            std::log(4.0 * kPi * (std::sinh(2.0 * tau) / (4.0 * tau) - 0.5));
        CHECK(std::fabs(e.log_value_sq - exact) < 1e-8);
    }
    CHECK(std::fabs(prev - 1.0) < 0.05);

    // Translating the domain and the center together changes nothing.
    const Vec3 shift{1.5, -2.0, 0.25};
    const geom::Domain moved{geom::Ball{shift, 1.0}};
    const FieldEnergyLog a = modified_helmholtz_energy(15.0, unit, {0, 0, 0}, 32);
    const FieldEnergyLog b = modified_helmholtz_energy(15.0, moved, shift, 32);
    CHECK(rel_diff(a.log_value_sq, b.log_value_sq) < 1e-10);
    CHECK(rel_diff(a.log_grad_sq, b.log_grad_sq) < 1e-10);

    // Box domain: the sweep tends to the corner radius sqrt(3).
    const geom::Domain box{geom::Box{{-1, -1, -1}, {1, 1, 1}}};
    double prev_box = 0.0;
    for (double tau : {20.0, 40.0, 80.0}) {
        const FieldEnergyLog e = modified_helmholtz_energy(tau, box, {0, 0, 0}, 96);
        const double est = e.log_value_sq / (2.0 * tau);
        CHECK(est > prev_box);
        prev_box = est;
    }
    CHECK(prev_box < std::sqrt(3.0));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "enclosure/closed_forms.hpp"
#include "enclosure/errors.hpp"
#include "enclosure/quadrature.hpp"
#include "enclosure/reference_field.hpp"

using namespace enclosure;
using namespace enclosure::reffield;

namespace {

geom::SurfaceQuadrature single_node(const Vec3& x, const Vec3& n) {
    geom::SurfaceQuadrature q;
    q.nodes = {x};
    q.normals = {n};
    q.weights = {1.0};
    return q;
}

}  // namespace

TEST_CASE("time grid and admissibility checks") {
    CHECK_THROWS(TimeGrid(1, 0.1));
    CHECK_THROWS(TimeGrid(10, 0.0));
    const TimeGrid tg(10, 0.1);
    CHECK(tg.horizon() == doctest::Approx(1.0));

    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    // Equality margin: horizon - pulse = cavity radius exactly.
    CHECK(time_window_margin(omega, pulse, 1.9) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_NOTHROW(require_time_window(omega, pulse, 1.9));
    CHECK_THROWS_AS(require_time_window(omega, pulse, 1.7), AdmissibilityError);
}

TEST_CASE("neumann data values and vanishing windows") {
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const waves::SourcePulse pulse{{0, 0, 0}, 0.5};
    const double T = 1.6;  // strict window: T - eta = 1.1 > 1
    const TimeGrid tg(160, T / 160);
    const geom::SurfaceQuadrature quad = single_node({1, 0, 0}, {1, 0, 0});
    const BoundaryField f = neumann_data(pulse, omega, quad, tg);

    REQUIRE(f.n_times == 161);
    // Pinned interior sample: t = 0.7 -> reversed time 0.9.
    const int k07 = 70;
    CHECK(tg.time(k07) == doctest::Approx(0.7));
    const double expected = waves::gradient(pulse, {1, 0, 0}, T - 0.7).x;
    CHECK(f.at(0, k07) == doctest::Approx(expected).epsilon(1e-13));
    // Cross-check the gradient with a centered difference of the field.
    const double step = 1e-5;
    const double fd = (waves::value(pulse, {1 + step, 0, 0}, 0.9) -
                       waves::value(pulse, {1 - step, 0, 0}, 0.9)) /
                      (2 * step);
    CHECK(f.at(0, k07) == doctest::Approx(fd).epsilon(1e-6));

    // Early times: the trailing front has swallowed the boundary.
    for (int k = 0; k * tg.dt <= T - 1.0 - pulse.radius; ++k) CHECK(f.at(0, k) == 0.0);
    // Late times: the reversed wave has not yet reached the boundary
    // (reversed time below r - eta).
    for (int k = tg.n_steps; T - tg.time(k) < 1.0 - pulse.radius; --k)
        CHECK(f.at(0, k) == 0.0);
    // Time reversal is a pure reindexing of the forward normal derivative.
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> pick(0, tg.n_steps - 1);
    for (int trial = 0; trial < 20; ++trial) {
        const int k = pick(rng);
        const double s = T - tg.time(k);
        CHECK(f.at(0, k) == waves::gradient(pulse, {1, 0, 0}, s).x);
    }
}

TEST_CASE("laplace point: small-tau limit equals the plain time integral") {
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9;
    const Vec3 x{0.8, 0.2, -0.1};
    const LaplacePoint lp = laplace_point(pulse, x, 1e-9, T, 1e-14);
    const double direct = integrate_adaptive(
        [&](double t) {
            const double s = T - t;
            return s > 0.0 ? waves::value(pulse, x, s) : 0.0;
        },
        0.0, T, {}, 1e-14, 24);
    CHECK(lp.value == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("laplace field is positive and decreasing in tau per node") {
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9;
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 6);
    double prev_sum = -1.0;
    std::vector<double> prev;
    for (double tau : {1.0, 2.0, 4.0, 8.0}) {
        const auto [w, dwdn] = boundary_laplace_field(pulse, quad, tau, T);
        (void)dwdn;
        double sum = 0.0;
        for (std::size_t n = 0; n < quad.size(); ++n) {
            CHECK(w.at(n) >= 0.0);  // the reversed field is nonnegative
            if (!prev.empty()) CHECK(w.at(n) <= prev[n] * (1.0 + 1e-12));
            sum += w.at(n);
        }
        if (prev_sum >= 0.0) CHECK(sum < prev_sum);
        prev_sum = sum;
        prev.resize(quad.size());
        for (std::size_t n = 0; n < quad.size(); ++n) prev[n] = w.at(n);
    }
}

TEST_CASE("laplace point matches the closed-form chain inside the quiet ball") {
    // Inside the region already passed by the trailing front, tau^2 w equals
    // the source coefficient times the sinh kernel up to an exponentially
    // small remainder; parameters chosen so that remainder is < 1e-6.
    const double T = 1.5, eta = 0.4, tau = 18.0;
    const waves::SourcePulse pulse{{0.3, -0.2, 0.1}, eta};
    const forms::LaplaceParams params(tau, T, eta);
    for (double xi : {0.6, 0.9}) {
        const Vec3 x = pulse.center + Vec3{0.0, xi, 0.0};
        const LaplacePoint lp = laplace_point(pulse, x, tau, T, 1e-18);
        const double closed = forms::source_coeff_total(params) / (tau * tau) *
                              forms::sinh_kernel(tau, xi);
        CHECK(lp.value == doctest::Approx(closed).epsilon(1e-5));
    }
}

TEST_CASE("normal derivative matches finite differences of the field") {
    const waves::SourcePulse pulse{{0, 0, 0}, 0.9};
    const double T = 1.9, tau = 3.0;
    const geom::Domain omega{geom::Ball{{0, 0, 0}, 1.0}};
    const geom::SurfaceQuadrature quad = geom::surface_quadrature(omega, 4);
    const auto [w, dwdn] = boundary_laplace_field(pulse, quad, tau, T);
    (void)w;
    std::mt19937 rng(17);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(quad.size()) - 1);
    const double step = 1e-5;
    for (int trial = 0; trial < 8; ++trial) {
        const int n = pick(rng);
        const Vec3 x = quad.nodes[n];
        const Vec3 nu = quad.normals[n];
        const double plus = laplace_point(pulse, x + nu * step, tau, T, 1e-15).value;
        const double minus = laplace_point(pulse, x - nu * step, tau, T, 1e-15).value;
        const double fd = (plus - minus) / (2 * step);
        CHECK(std::fabs(dwdn.at(n) - fd) < 1e-5 * (1.0 + std::fabs(fd)));
    }
}

TEST_CASE("obstacle energy: positivity, translation covariance, decay slope") {
    const double T = 1.9, eta = 0.9;
    const waves::SourcePulse pulse{{0, 0, 0}, eta};
    const geom::Domain obstacle{geom::Ball{{0, 0, 0}, 0.3}};

    const double e15 = obstacle_field_energy(pulse, obstacle, 15.0, T, 12);
    const double e30 = obstacle_field_energy(pulse, obstacle, 30.0, T, 12);
    CHECK(e15 > 0.0);
    CHECK(e30 > 0.0);

    // Decay slope of log J approaches -2 ((T - eta) - R_D) = -1.4. The energy
    // carries a tau^-5 prefactor, so the [15, 30] window sits 0.23 shallow of
    // the limit; the [40, 80] window is within 10%.
    const double slope_lo = (std::log(e30) - std::log(e15)) / 15.0;
    CHECK(std::fabs(slope_lo - (-1.4)) < 0.25);
    const double e40 = obstacle_field_energy(pulse, obstacle, 40.0, T, 12);
    const double e80 = obstacle_field_energy(pulse, obstacle, 80.0, T, 12);
    const double slope_hi = (std::log(e80) - std::log(e40)) / 40.0;
    CHECK(std::fabs(slope_hi - (-1.4)) < 0.14);
    // Rate estimates move toward the limit as tau grows.
    CHECK(std::fabs(slope_hi - (-1.4)) < std::fabs(slope_lo - (-1.4)));

    // Shifting pulse and obstacle together leaves the energy unchanged.
    const Vec3 shift{0.4, -1.0, 2.0};
    const waves::SourcePulse pulse2{pulse.center + shift, eta};
    const geom::Domain obstacle2{geom::Ball{shift, 0.3}};
    const double e15_shift = obstacle_field_energy(pulse2, obstacle2, 15.0, T, 12);
    CHECK(e15_shift == doctest::Approx(e15).epsilon(1e-8));

    CHECK_THROWS_AS(
        obstacle_field_energy(pulse, geom::Domain{geom::Box{{0, 0, 0}, {1, 1, 1}}}, 2.0, T, 8),
        GeometryError);
}

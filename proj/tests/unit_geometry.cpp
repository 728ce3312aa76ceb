#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "enclosure/errors.hpp"
#include "enclosure/geometry.hpp"

using namespace enclosure;
using namespace enclosure::geom;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("sup radius per shape") {
    const Domain box{Box{{-1, -1, -1}, {1, 1, 1}}};
    CHECK(sup_radius(box, {0, 0, 0}) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));

    const Domain unit{Ball{{0, 0, 0}, 1.0}};
    CHECK(sup_radius(unit, {0, 0, 0}) == doctest::Approx(1.0));

    const Domain off{Ball{{0.5, 0, 0}, 0.2}};
    CHECK(sup_radius(off, {0, 0, 0}) == doctest::Approx(0.7));

    const Domain pair{std::vector<Ball>{{{0.5, 0, 0}, 0.1}, {{-0.4, 0.2, 0}, 0.15}}};
    CHECK(sup_radius(pair, {0, 0, 0}) ==
          doctest::Approx(std::max(0.6, std::hypot(0.4, 0.2) + 0.15)));
}

TEST_CASE("sup radius translation consistency") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const Vec3 shift{u(rng), u(rng), u(rng)};
        const Vec3 p{u(rng), u(rng), u(rng)};
        const Ball b{{u(rng), u(rng), u(rng)}, 0.3 + std::fabs(u(rng))};
        const Domain d0{b};
        const Domain d1{Ball{b.center + shift, b.radius}};
        CHECK(sup_radius(d0, p) == doctest::Approx(sup_radius(d1, p + shift)).epsilon(1e-13));

        const Vec3 lo{u(rng), u(rng), u(rng)};
        const Box box{lo, lo + Vec3{1.0 + std::fabs(u(rng)), 0.5, 2.0}};
        const Domain bx0{box};
        const Domain bx1{Box{box.lo + shift, box.hi + shift}};
        CHECK(sup_radius(bx0, p) == doctest::Approx(sup_radius(bx1, p + shift)).epsilon(1e-13));
    }
}

TEST_CASE("obstacle radius stays below cavity radius") {
    const Domain omega{Ball{{0, 0, 0}, 1.0}};
    const Domain d{Ball{{0.2, 0.1, 0.0}, 0.3}};
    REQUIRE(strictly_inside(d, omega, 0.05));
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const Vec3 p{u(rng), u(rng), u(rng)};
        CHECK(sup_radius(d, p) < sup_radius(omega, p));
    }
}

TEST_CASE("domain invariants rejected") {
    CHECK_THROWS_AS((void)Domain(Ball{{0, 0, 0}, 0.0}), GeometryError);
    CHECK_THROWS_AS((void)Domain(Box{{0, 0, 0}, {1, 0, 1}}), GeometryError);
    CHECK_THROWS_AS((void)Domain(std::vector<Ball>{}), GeometryError);
    // overlapping members
    CHECK_THROWS_AS((void)Domain(std::vector<Ball>{{{0, 0, 0}, 0.5}, {{0.4, 0, 0}, 0.5}}),
                    GeometryError);
}

TEST_CASE("surface quadrature: areas") {
    const Domain unit{Ball{{0, 0, 0}, 1.0}};
    const SurfaceQuadrature qb = surface_quadrature(unit, 8);
    CHECK(qb.total_weight() == doctest::Approx(4.0 * kPi).epsilon(1e-6));

    const Domain box{Box{{0, 0, 0}, {1, 1, 1}}};
    const SurfaceQuadrature qx = surface_quadrature(box, 4);
    CHECK(qx.total_weight() == doctest::Approx(6.0).epsilon(1e-12));

    for (const Vec3& n : qb.normals) CHECK(std::fabs(n.norm() - 1.0) < 1e-12);
    for (double w : qb.weights) CHECK(w > 0.0);
    for (double w : qx.weights) CHECK(w > 0.0);

    const Domain uni{std::vector<Ball>{{{0, 0, 0}, 0.2}, {{1, 0, 0}, 0.2}}};
    CHECK_THROWS_AS(surface_quadrature(uni, 8), GeometryError);
}

TEST_CASE("surface quadrature: divergence identity") {
    // For any closed surface, int x . n dS = 3 * volume.
    const Domain unit{Ball{{0.3, -0.2, 0.1}, 1.0}};
    const SurfaceQuadrature q = surface_quadrature(unit, 8);
    double flux = 0.0;
    for (size_t i = 0; i < q.size(); ++i) flux += q.weights[i] * q.nodes[i].dot(q.normals[i]);
    CHECK(flux == doctest::Approx(3.0 * unit.volume()).epsilon(1e-6));

    const Domain box{Box{{-0.5, 0.0, 0.25}, {0.75, 2.0, 1.25}}};
    const SurfaceQuadrature qx = surface_quadrature(box, 6);
    flux = 0.0;
    for (size_t i = 0; i < qx.size(); ++i) flux += qx.weights[i] * qx.nodes[i].dot(qx.normals[i]);
    CHECK(flux == doctest::Approx(3.0 * box.volume()).epsilon(1e-12));
}

TEST_CASE("surface quadrature integrates sphere polynomials exactly") {
    const Domain unit{Ball{{0, 0, 0}, 1.0}};
    const int order = 10;
    const SurfaceQuadrature q = surface_quadrature(unit, order);
    // Monomials x^a y^b z^c with a+b+c <= order; odd powers integrate to 0,
    // even powers to 4*pi * prod (e-1)!! / (a+b+c+1)!! with e in {a,b,c}.
    auto dfact = [](int n) {
        double r = 1.0;
        for (int k = n; k > 1; k -= 2) r *= k;
        return r;
    };
    for (int a = 0; a <= order; ++a)
        for (int b = 0; a + b <= order; ++b)
            for (int c = 0; a + b + c <= order; ++c) {
                double got = 0.0;
                for (size_t i = 0; i < q.size(); ++i) {
                    const Vec3& n = q.nodes[i];
                    got += q.weights[i] * std::pow(n.x, a) * std::pow(n.y, b) * std::pow(n.z, c);
                }
                double want = 0.0;
                if (a % 2 == 0 && b % 2 == 0 && c % 2 == 0) {
                    want = 4.0 * kPi * dfact(a - 1) * dfact(b - 1) * dfact(c - 1) /
                           dfact(a + b + c + 1);
                }
                CHECK(std::fabs(got - want) < 1e-10 * (1.0 + std::fabs(want)));
            }
}

TEST_CASE("ball volume quadrature") {
    const Ball unit{{0, 0, 0}, 1.0};
    const VolumeQuadrature q = ball_volume_quadrature(unit, 12);
    CHECK(q.total_weight() == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-8));

    // int |y| dy over the unit ball = 4*pi/4 = pi.
    double moment = 0.0;
    for (size_t i = 0; i < q.size(); ++i) moment += q.weights[i] * q.nodes[i].norm();
    CHECK(moment == doctest::Approx(kPi).epsilon(1e-6));

    // Discontinuous indicator of a half-radius sub-ball: volume pi/6. The
    // jump drops convergence to O(1/order), hence the high order here.
    const VolumeQuadrature qf = ball_volume_quadrature(unit, 64);
    double sub = 0.0;
    for (size_t i = 0; i < qf.size(); ++i)
        if (qf.nodes[i].norm() < 0.5) sub += qf.weights[i];
    CHECK(sub == doctest::Approx(kPi / 6.0).epsilon(1e-3));
}

TEST_CASE("box and annulus volume quadrature") {
    const Box box{{-1, 0, 2}, {1, 3, 2.5}};
    const VolumeQuadrature q = box_volume_quadrature(box, 6);
    CHECK(q.total_weight() == doctest::Approx(2.0 * 3.0 * 0.5).epsilon(1e-12));

    const VolumeQuadrature a = annulus_volume_quadrature({1, 2, 3}, 0.5, 1.25, 16);
    const double want = 4.0 / 3.0 * kPi * (std::pow(1.25, 3) - std::pow(0.5, 3));
    CHECK(a.total_weight() == doctest::Approx(want).epsilon(1e-10));
}

#include "doctest.h"

#include "simleo/propagation.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace simleo;

namespace {

// Independent per-entry evaluation of the diffraction coefficient.
cplx rs_oracle(const Vec3& s, const Vec3& d, double dx, double dy, double lambda)
{
    const double rx = d[0] - s[0], ry = d[1] - s[1], rz = d[2] - s[2];
    const double dist = std::hypot(rx, ry, rz);
    const double cos_a = std::abs(rz) / dist;
    const cplx j{0.0, 1.0};
    return dx * dy * cos_a / dist * (1.0 / (2.0 * std::numbers::pi * dist) - j / lambda) *
           std::exp(j * 2.0 * std::numbers::pi * dist / lambda);
}

const Vec3 z_normal{0.0, 0.0, 1.0};

} // namespace

TEST_CASE("rs_coefficient on axis at one wavelength")
{
    for (double lambda : {1.0, 0.0749}) {
        SimGeometry g = testing::small_geometry(2, 2, 1);
        g.wavelength = lambda;
        g.atom_dx = g.atom_dy = lambda / 2.0;
        const cplx w = rs_coefficient({0, 0, 0}, {0, 0, lambda}, z_normal, g);
        const cplx expect = (lambda / 4.0) * cplx{1.0 / (2.0 * std::numbers::pi * lambda), -1.0 / lambda} *
                            std::polar(1.0, 2.0 * std::numbers::pi);
        CHECK(std::abs(w - expect) <= 1e-14 * std::abs(expect));
    }
}

TEST_CASE("rs_coefficient: normal incidence has cos = 1 at any distance")
{
    const SimGeometry g = testing::small_geometry(2, 2, 1);
    for (double d : {0.3, 1.0, 7.5, 40.0}) {
        const cplx w = rs_coefficient({0.2, -0.1, 0.0}, {0.2, -0.1, d}, z_normal, g);
        const cplx full = (g.atom_dx * g.atom_dy / d) * cplx{1.0 / (2.0 * std::numbers::pi * d), -1.0} *
                          std::polar(1.0, 2.0 * std::numbers::pi * d);
        CHECK(std::abs(w - full) <= 1e-13 * std::abs(full));
    }
}

TEST_CASE("rs_coefficient decays with distance and rejects coincident points")
{
    const SimGeometry g = testing::small_geometry(2, 2, 1);
    const double near = std::abs(rs_coefficient({0, 0, 0}, {0, 0, 2.0}, z_normal, g));
    const double far = std::abs(rs_coefficient({0, 0, 0}, {0, 0, 10.0}, z_normal, g));
    CHECK(far < near);
    CHECK_THROWS_AS(rs_coefficient({1, 2, 3}, {1, 2, 3}, z_normal, g), std::domain_error);
}

TEST_CASE("rs_coefficient is translation invariant and magnitude reciprocal")
{
    const SimGeometry g = testing::small_geometry(2, 2, 1);
    Rng rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 a{u(rng), u(rng), 0.0};
        const Vec3 b{u(rng), u(rng), 1.0 + std::abs(u(rng))};
        const Vec3 t{u(rng), u(rng), u(rng)};
        const Vec3 at{a[0] + t[0], a[1] + t[1], a[2] + t[2]};
        const Vec3 bt{b[0] + t[0], b[1] + t[1], b[2] + t[2]};
        const cplx w = rs_coefficient(a, b, z_normal, g);
        CHECK(std::abs(rs_coefficient(at, bt, z_normal, g) - w) <= 1e-12 * std::abs(w));
        CHECK(std::abs(rs_coefficient(b, a, z_normal, g)) == doctest::Approx(std::abs(w)).epsilon(1e-13));
    }
}

TEST_CASE("geometry layout")
{
    const SimGeometry g = testing::small_geometry(3, 3, 4, 2, 2);
    CHECK(g.layer_spacing() == doctest::Approx(1.25));
    const Vec3 centre = g.atom_position(2, 4);
    CHECK(centre[0] == 0.0);
    CHECK(centre[1] == 0.0);
    CHECK(centre[2] == doctest::Approx(2.5));
    const Vec3 corner = g.atom_position(1, 0);
    CHECK(corner[0] == doctest::Approx(-0.5));
    CHECK(corner[1] == doctest::Approx(-0.5));
    const Vec3 ant = g.antenna_position(3);
    CHECK(ant[0] == doctest::Approx(0.5));
    CHECK(ant[1] == doctest::Approx(0.5));
    CHECK(ant[2] == 0.0);

    const SimGeometry sq = SimGeometry::square(0.075, 4, 225, 9);
    CHECK(sq.atoms_x == 15);
    CHECK(sq.antennas_x == 3);
    CHECK(sq.atom_dx == doctest::Approx(0.0375));
    CHECK(sq.antenna_spacing == doctest::Approx(0.075));
    CHECK(sq.thickness == doctest::Approx(0.375));
    CHECK_THROWS_AS(SimGeometry::square(0.075, 4, 200, 9), std::invalid_argument);
    CHECK_THROWS_AS(SimGeometry::square(0.075, 4, 225, 8), std::invalid_argument);

    SimGeometry bad = g;
    bad.layers = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = g;
    bad.wavelength = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("build_propagation: single layer has no inter-layer hops")
{
    const SimGeometry g = testing::small_geometry(3, 3, 1);
    const PropagationModel p = build_propagation(g);
    CHECK(p.inter_layer.empty());
    CHECK(p.antenna_to_first.rows() == 9);
    CHECK(p.antenna_to_first.cols() == 4);
}

TEST_CASE("build_propagation matches a per-entry scalar oracle")
{
    for (auto [ax, ay, layers] : {std::tuple{2, 2, 2}, {3, 2, 3}, {4, 4, 2}}) {
        const SimGeometry g = testing::small_geometry(ax, ay, layers, 2, 3);
        const PropagationModel p = build_propagation(g);
        REQUIRE(p.inter_layer.size() == static_cast<std::size_t>(layers - 1));
        const double s = g.layer_spacing();
        auto atom = [&](std::size_t l, std::size_t n) {
            const double x = (static_cast<double>(n / ay) - (ax - 1) / 2.0) * 0.5;
            const double y = (static_cast<double>(n % ay) - (ay - 1) / 2.0) * 0.5;
            return Vec3{x, y, static_cast<double>(l) * s};
        };
        for (std::size_t l = 2; l <= static_cast<std::size_t>(layers); ++l) {
            const CMatrix& w = p.inter_layer[l - 2];
            for (std::size_t n = 0; n < g.atoms_per_layer(); ++n)
                for (std::size_t src = 0; src < g.atoms_per_layer(); ++src) {
                    const cplx ref = rs_oracle(atom(l - 1, src), atom(l, n), 0.5, 0.5, 1.0);
                    CHECK(std::abs(w(n, src) - ref) <= 1e-12 * std::abs(ref));
                }
        }
        for (std::size_t n = 0; n < g.atoms_per_layer(); ++n)
            for (std::size_t m = 0; m < g.num_antennas(); ++m) {
                const double x = (static_cast<double>(m / 3) - 0.5) * 1.0;
                const double y = (static_cast<double>(m % 3) - 1.0) * 1.0;
                const cplx ref = rs_oracle({x, y, 0.0}, atom(1, n), 0.5, 0.5, 1.0);
                CHECK(std::abs(p.antenna_to_first(n, m) - ref) <= 1e-12 * std::abs(ref));
            }
    }
}

TEST_CASE("build_propagation: symmetric atoms see equal magnitudes from the axis antenna")
{
    // 1x1 antenna on the axis; atoms n and N-1-n are point-symmetric.
    const SimGeometry g = testing::small_geometry(4, 4, 2, 1, 1);
    const PropagationModel p = build_propagation(g);
    const std::size_t n_atoms = g.atoms_per_layer();
    for (std::size_t n = 0; n < n_atoms; ++n) {
        CHECK(std::abs(p.antenna_to_first(n, 0)) ==
              doctest::Approx(std::abs(p.antenna_to_first(n_atoms - 1 - n, 0))).epsilon(1e-13));
    }
}

TEST_CASE("build_propagation is bitwise deterministic")
{
    const SimGeometry g = testing::small_geometry(3, 3, 3);
    const PropagationModel a = build_propagation(g);
    const PropagationModel b = build_propagation(g);
    CHECK(a.antenna_to_first == b.antenna_to_first);
    REQUIRE(a.inter_layer.size() == b.inter_layer.size());
    for (std::size_t i = 0; i < a.inter_layer.size(); ++i) CHECK(a.inter_layer[i] == b.inter_layer[i]);
}

#include "doctest.h"

#include "simleo/channel.hpp"
#include "simleo/units.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace simleo;

TEST_CASE("user at nadir")
{
    const UserPosition p = user_position(0.0, 0.3, 1.0e6);
    CHECK(p.slant_range == doctest::Approx(1.0e6).epsilon(1e-12));
    CHECK(p.elevation == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(p.off_nadir == doctest::Approx(0.0));
}

TEST_CASE("spherical geometry agrees with the law of cosines")
{
    const double re = units::earth_radius;
    const double h = 1.0e6;
    for (double c : {0.001, 0.01, 0.0235, 0.04}) {
        const UserPosition p = user_position(c, 1.0, h);
        const double r = std::sqrt(re * re + (re + h) * (re + h) - 2.0 * re * (re + h) * std::cos(c));
        CHECK(p.slant_range == doctest::Approx(r).epsilon(1e-12));
        CHECK(p.slant_range > h);
        // Angles of the Earth-centre / satellite / UT triangle sum to pi.
        const double at_ut = std::numbers::pi / 2.0 + p.elevation;
        CHECK(c + p.off_nadir + at_ut == doctest::Approx(std::numbers::pi).epsilon(1e-12));
        CHECK(p.elevation > 0.0);
        CHECK(p.elevation <= std::numbers::pi / 2.0);
    }
}

TEST_CASE("path gain and noise power")
{
    const double beta = path_gain(0.0749, 1.0e6, std::pow(10.0, 0.6), 1.0);
    const double expect = std::pow(10.0, 0.6) * std::pow(0.0749 / (4.0 * std::numbers::pi * 1.0e6), 2.0);
    CHECK(beta == doctest::Approx(expect).epsilon(1e-14));
    CHECK(path_gain(0.0749, 2.0e6, 2.0, 1.0) * 4.0 == doctest::Approx(path_gain(0.0749, 1.0e6, 2.0, 1.0)).epsilon(1e-15));
    CHECK(units::noise_power(50e6, 290.0) == doctest::Approx(1.380649e-23 * 5e7 * 290.0).epsilon(1e-15));
    CHECK(units::noise_power(50e6, 290.0) == doctest::Approx(2.002e-13).epsilon(1e-3));
    CHECK(units::wavelength(4e9) == doctest::Approx(0.0749).epsilon(1e-3));
}

TEST_CASE("steering vector")
{
    const SimGeometry g = SimGeometry::square(0.075, 2, 25, 4);
    for (const cplx& v : steering_vector(std::numbers::pi / 2.0, 1.234, g)) {
        CHECK(std::abs(v - cplx{1.0, 0.0}) < 1e-12);
    }
    const CVector a = steering_vector(1.1, 0.4, g);
    for (const cplx& v : a) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-15));
    // Atoms n and N-1-n sit at opposite positions: their phases are conjugate.
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(std::abs(a[n] - std::conj(a[a.size() - 1 - n])) < 1e-12);
    }
}

TEST_CASE("Rician table")
{
    const RicianTable sub = default_rician_table(Environment::suburban);
    const RicianTable urb = default_rician_table(Environment::urban);
    double prev = -1e9;
    for (double e = 0.0; e <= 90.0; e += 2.5) {
        CHECK(sub.kappa_db(e) > urb.kappa_db(e));
        CHECK(sub.kappa_db(e) >= prev);
        prev = sub.kappa_db(e);
    }
    const RicianTable t = RicianTable::parse("10:0, 30:10");
    CHECK(t.kappa_db(20.0) == doctest::Approx(5.0));
    CHECK(t.kappa_db(0.0) == doctest::Approx(0.0));
    CHECK(t.kappa_db(80.0) == doctest::Approx(10.0));
    CHECK(t.kappa_linear(30.0) == doctest::Approx(10.0));
    CHECK(RicianTable::parse(t.to_string()).points() == t.points());
    CHECK_THROWS_AS(RicianTable::parse("10-3"), std::invalid_argument);
    CHECK_THROWS_AS(RicianTable::parse("10:x"), std::invalid_argument);
    CHECK_THROWS_AS(RicianTable::parse("10:1,10:2"), std::invalid_argument);
    CHECK(parse_environment("urban") == Environment::urban);
    CHECK_THROWS_AS(parse_environment("rural"), std::invalid_argument);
}

TEST_CASE("sample_scenario")
{
    const SimGeometry g = SimGeometry::square(units::wavelength(4e9), 2, 16, 4);
    const LinkParams link;
    const Scenario a = sample_scenario(11, 50, g, link);
    const Scenario b = sample_scenario(11, 50, g, link);
    CHECK(a.stats.los == b.stats.los);
    CHECK(a.stats.beta == b.stats.beta);
    const double max_angle = 0.5 * link.disk_diameter_m / units::earth_radius;
    const double sigma2 = units::noise_power(link.bandwidth_hz, link.noise_temp_k);
    for (std::size_t k = 0; k < 50; ++k) {
        const UserPosition& u = a.geometry.users[k];
        CHECK(u.central_angle <= max_angle);
        CHECK(u.slant_range >= link.altitude_m);
        CHECK(a.stats.beta[k] == doctest::Approx(path_gain(g.wavelength, u.slant_range, std::pow(10.0, 0.6), 1.0)));
        CHECK(a.stats.noise_power[k] == doctest::Approx(sigma2));
        CHECK(a.stats.kappa[k] == doctest::Approx(link.suburban.kappa_linear(units::rad_to_deg(u.elevation))));
    }
    CHECK(sample_scenario(12, 50, g, link).stats.beta != a.stats.beta);
    CHECK_THROWS_AS(sample_scenario(1, 0, g, link), std::invalid_argument);

    LinkParams urban = link;
    urban.environment = Environment::urban;
    const Scenario c = sample_scenario(11, 50, g, urban);
    for (std::size_t k = 0; k < 50; ++k) CHECK(c.stats.kappa[k] < a.stats.kappa[k]);
}

TEST_CASE("draw_channels: infinite Rician factor is deterministic LoS")
{
    Rng rng(4);
    ChannelStats s = testing::random_stats(3, 9, rng);
    for (auto& k : s.kappa) k = INFINITY;
    const ChannelDraw d = draw_channels(s, 99);
    for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < 9; ++n) {
            CHECK(std::abs(d.h(k, n) - std::sqrt(s.beta[k]) * s.los(k, n)) < 1e-15);
        }
}

TEST_CASE("draw_channels first and second moments")
{
    Rng rng(8);
    ChannelStats s = testing::random_stats(1, 16, rng);
    s.kappa = {units::db_to_linear(3.0)};
    const std::size_t draws = 100000;
    const std::size_t n = 16;
    double energy = 0.0;
    CMatrix cov(n, n);
    for (std::size_t i = 0; i < draws; ++i) {
        const ChannelDraw d = draw_channels(s, derive_seed(5, 0, i));
        const auto h = d.h.row(0);
        for (std::size_t a = 0; a < n; ++a) {
            energy += std::norm(h[a]);
            for (std::size_t b = 0; b < n; ++b) cov(a, b) += h[a] * std::conj(h[b]);
        }
    }
    energy /= static_cast<double>(draws);
    CHECK(std::abs(energy - s.beta[0] * n) < 0.02 * s.beta[0] * n);
    CMatrix expect(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            cov(a, b) /= static_cast<double>(draws);
            expect(a, b) = s.beta[0] * s.los(0, a) * std::conj(s.los(0, b));
        }
    CHECK(frobenius_distance(cov, expect) < 0.05 * frobenius_norm(expect));
}

TEST_CASE("ChannelStats subset and validation")
{
    Rng rng(1);
    const ChannelStats s = testing::random_stats(5, 4, rng);
    const std::vector<std::size_t> pick{3, 1};
    const ChannelStats sub = s.subset(pick);
    CHECK(sub.users() == 2);
    CHECK(sub.beta[0] == s.beta[3]);
    CHECK(sub.los_vector(1) == s.los_vector(1));
    const std::vector<std::size_t> bad{7};
    CHECK_THROWS_AS(s.subset(bad), std::out_of_range);
    ChannelStats broken = s;
    broken.noise_power[2] = 0.0;
    CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

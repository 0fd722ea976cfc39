#include "doctest.h"

#include "simleo/baselines.hpp"
#include "support.hpp"

#include <cmath>
#include <numeric>
#include <set>

using namespace simleo;

namespace {

double column_norm(const CMatrix& f, std::size_t c)
{
    double n = 0.0;
    for (std::size_t r = 0; r < f.rows(); ++r) n += std::norm(f(r, c));
    return std::sqrt(n);
}

double power_sum(const std::vector<double>& p) { return std::accumulate(p.begin(), p.end(), 0.0); }

} // namespace

TEST_CASE("centered_atoms picks the atoms nearest the axis")
{
    const SimGeometry g = SimGeometry::square(1.0, 2, 25, 4);
    const auto one = centered_atoms(g, 1);
    CHECK(one == std::vector<std::size_t>{12});
    const auto five = centered_atoms(g, 5);
    CHECK(five == std::vector<std::size_t>{12, 7, 11, 13, 17});
    CHECK_THROWS_AS(centered_atoms(g, 26), std::invalid_argument);
}

TEST_CASE("digital_channel")
{
    Rng rng(2);
    const ChannelStats s = testing::random_stats(3, 9, rng);
    const std::vector<std::size_t> atoms{4, 0};
    const CMatrix h = digital_channel(s, atoms);
    CHECK(h.rows() == 3);
    CHECK(h.cols() == 2);
    CHECK(std::abs(h(1, 0) - std::sqrt(s.beta[1]) * std::conj(s.los(1, 4))) < 1e-15);
    CHECK(std::abs(h(2, 1) - std::sqrt(s.beta[2]) * std::conj(s.los(2, 0))) < 1e-15);
}

TEST_CASE("zero-forcing with one user is the matched filter")
{
    Rng rng(3);
    const CMatrix h = testing::random_cmatrix(1, 6, rng);
    const std::vector<double> noise{0.1};
    const DigitalPrecoder z = zf_precoder(h, 2.0, noise);
    const double hn = norm2(h.row(0));
    for (std::size_t m = 0; m < 6; ++m) CHECK(std::abs(z.directions(m, 0) - std::conj(h(0, m)) / hn) < 1e-12);
    CHECK(z.power[0] == doctest::Approx(2.0));
    CHECK(digital_sum_rate(h, z, noise, 2.0) == doctest::Approx(std::log2(1.0 + 2.0 * hn * hn / 0.1)));
}

TEST_CASE("zero-forcing nulls interference")
{
    Rng rng(4);
    for (int t = 0; t < 50; ++t) {
        const CMatrix h = testing::random_cmatrix(4, 9, rng);
        const std::vector<double> noise(4, 0.5);
        const DigitalPrecoder z = zf_precoder(h, 3.0, noise);
        const ObjectiveContext ctx = digital_context(h, z, noise);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(column_norm(z.directions, k) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(z.power[k] >= 0.0);
            for (std::size_t j = 0; j < 4; ++j)
                if (j != k) CHECK(ctx.alpha(k, j) < 1e-9 * ctx.alpha(k, k));
        }
        CHECK(power_sum(z.power) == doctest::Approx(3.0).epsilon(1e-12));
    }
}

TEST_CASE("zero-forcing with orthogonal rows")
{
    // DFT rows are orthogonal, so ZF directions are the matched filters.
    const std::size_t m = 4;
    CMatrix h(2, m);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t a = 0; a < m; ++a) h(k, a) = std::polar(1.0, 2.0 * M_PI * k * a / m);
    const std::vector<double> noise{1.0, 1.0};
    const DigitalPrecoder z = zf_precoder(h, 4.0, noise);
    for (std::size_t k = 0; k < 2; ++k)
        for (std::size_t a = 0; a < m; ++a) CHECK(std::abs(z.directions(a, k) - std::conj(h(k, a)) / 2.0) < 1e-12);
    CHECK(z.power[0] == doctest::Approx(2.0));
    CHECK(z.power[1] == doctest::Approx(2.0));
}

TEST_CASE("zero-forcing rejects rank-deficient channels and bad inputs")
{
    CMatrix h(2, 3);
    for (std::size_t a = 0; a < 3; ++a) h(0, a) = h(1, a) = cplx{1.0, static_cast<double>(a)};
    const std::vector<double> noise{1.0, 1.0};
    CHECK_THROWS_AS(zf_precoder(h, 1.0, noise), std::domain_error);
    Rng rng(5);
    const CMatrix wide = testing::random_cmatrix(4, 3, rng);
    const std::vector<double> n4(4, 1.0);
    CHECK_THROWS_AS(zf_precoder(wide, 1.0, n4), std::invalid_argument);
    const CMatrix ok = testing::random_cmatrix(2, 3, rng);
    CHECK_THROWS_AS(zf_precoder(ok, 0.0, noise), std::invalid_argument);
    const std::vector<double> n1{1.0};
    CHECK_THROWS_AS(mmse_precoder(ok, 1.0, n1), std::invalid_argument);
}

TEST_CASE("MMSE approaches zero-forcing directions as noise vanishes")
{
    Rng rng(6);
    const CMatrix h = testing::random_cmatrix(3, 5, rng);
    const std::vector<double> quiet(3, 1e-12);
    const DigitalPrecoder mm = mmse_precoder(h, 1.0, quiet);
    const DigitalPrecoder zf = zf_precoder(h, 1.0, quiet);
    for (std::size_t k = 0; k < 3; ++k) {
        cplx overlap{};
        for (std::size_t a = 0; a < 5; ++a) overlap += std::conj(zf.directions(a, k)) * mm.directions(a, k);
        CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mm.power[k] == doctest::Approx(1.0 / 3.0));
    }
}

TEST_CASE("MMSE beats zero-forcing at low SNR on average")
{
    Rng rng(7);
    // Entries have E|h|^2 = 2; P_T / K * 2 / noise = 1 puts each entry at 0 dB.
    const std::vector<double> noise(4, 2.0);
    const double p_total = 4.0;
    double sum_mmse = 0.0, sum_zf = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CMatrix h = testing::random_cmatrix(4, 4, rng);
        const DigitalPrecoder mm = mmse_precoder(h, p_total, noise);
        const DigitalPrecoder zf = zf_precoder(h, p_total, noise);
        sum_mmse += digital_sum_rate(h, mm, noise, p_total);
        sum_zf += digital_sum_rate(h, zf, noise, p_total);
    }
    CHECK(sum_mmse > sum_zf);
}

TEST_CASE("random controls are valid and deterministic")
{
    ControlShape shape;
    shape.atoms = 16;
    shape.layers = 3;
    shape.total_users = 11;
    shape.group_capacity = 4;
    shape.num_antennas = 6;
    const RandomControls a = random_controls(123, shape);
    const RandomControls b = random_controls(123, shape);
    const RandomControls c = random_controls(124, shape);
    CHECK(a.phases.theta == b.phases.theta);
    CHECK(a.grouping.groups == b.grouping.groups);
    CHECK(a.assignment.antennas == b.assignment.antennas);
    CHECK(a.phases.theta != c.phases.theta);
    CHECK_NOTHROW(a.grouping.validate(11));
    CHECK(a.grouping.group_count() == 3);
    CHECK_NOTHROW(a.assignment.validate(6));
    CHECK(a.assignment.antennas.size() == a.grouping.groups.front().size());
    for (double v : a.phases.theta.data()) {
        CHECK(v > 0.0);
        CHECK(v <= 2.0 * M_PI);
    }
}

TEST_CASE("random assignment covers all antennas uniformly")
{
    Rng rng(8);
    std::vector<std::size_t> hits(5, 0);
    for (int t = 0; t < 5000; ++t) {
        const AntennaAssignment a = random_assignment(2, 5, rng);
        CHECK(std::set<std::size_t>(a.antennas.begin(), a.antennas.end()).size() == 2);
        for (auto v : a.antennas) ++hits[v];
    }
    for (auto h : hits) CHECK(std::abs(static_cast<double>(h) - 2000.0) < 150.0);
    CHECK_THROWS_AS(random_assignment(6, 5, rng), std::invalid_argument);
}

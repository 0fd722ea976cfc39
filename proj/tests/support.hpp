#pragma once

// Shared fixtures for the unit and acceptance suites.

#include "simleo/beamformer.hpp"
#include "simleo/channel.hpp"
#include "simleo/optimizer.hpp"
#include "simleo/propagation.hpp"
#include "simleo/random.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <cstddef>
#include <numeric>
#include <vector>

namespace simleo::testing {

// Unit-wavelength geometry with an arbitrary rectangular atom grid.
inline SimGeometry small_geometry(std::size_t atoms_x, std::size_t atoms_y, std::size_t layers,
                                  std::size_t antennas_x = 2, std::size_t antennas_y = 2)
{
    SimGeometry g;
    g.wavelength = 1.0;
    g.layers = layers;
    g.atoms_x = atoms_x;
    g.atoms_y = atoms_y;
    g.atom_dx = 0.5;
    g.atom_dy = 0.5;
    g.antennas_x = antennas_x;
    g.antennas_y = antennas_y;
    g.antenna_spacing = 1.0;
    g.thickness = 5.0;
    return g;
}

inline CMatrix random_cmatrix(std::size_t rows, std::size_t cols, Rng& rng)
{
    std::normal_distribution<double> nd(0.0, 1.0);
    CMatrix m(rows, cols);
    for (auto& v : m.data()) v = {nd(rng), nd(rng)};
    return m;
}

// Random unit-modulus LoS rows, random beta in [0.5, 2]; noise picked so
// the uniform-power average SNR is moderate for the given problem.
inline ChannelStats random_stats(std::size_t users, std::size_t atoms, Rng& rng)
{
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> b(0.5, 2.0);
    ChannelStats s;
    s.los = CMatrix(users, atoms);
    for (auto& v : s.los.data()) v = std::polar(1.0, ph(rng));
    for (std::size_t k = 0; k < users; ++k) {
        s.beta.push_back(b(rng));
        s.kappa.push_back(10.0);
        s.noise_power.push_back(1.0);
    }
    return s;
}

// Scales noise so that mean own gain * P/K over noise is about snr_linear.
inline void calibrate_noise(ChannelStats& stats, const SumRateProblem& problem, const PhaseConfig& phases,
                            double total_power, double snr_linear)
{
    const ObjectiveContext ctx = problem.context(phases);
    double own = 0.0;
    for (std::size_t k = 0; k < ctx.users(); ++k) own += ctx.alpha(k, k);
    own /= static_cast<double>(ctx.users());
    const double sigma2 = own * (total_power / static_cast<double>(ctx.users())) / snr_linear;
    for (auto& n : stats.noise_power) n = sigma2;
}

inline std::vector<std::size_t> first_antennas(std::size_t k)
{
    std::vector<std::size_t> a(k);
    std::iota(a.begin(), a.end(), 0);
    return a;
}

inline double max_abs(const RMatrix& m)
{
    double v = 0.0;
    for (double x : m.data()) v = std::max(v, std::abs(x));
    return v;
}

// Objective rebuilt from the dense cascade with explicit loops; shares no
// code with SumRateProblem or the gradient routes.
inline double oracle_objective(const ChannelStats& stats, const PropagationModel& prop,
                               const std::vector<std::size_t>& antennas, const PhaseConfig& phases,
                               const std::vector<double>& p)
{
    const CascadeState cs = compose_cascade(phases, prop);
    const std::size_t k_users = stats.users();
    const std::size_t n = stats.atoms();
    std::vector<std::vector<double>> alpha(k_users, std::vector<double>(k_users));
    for (std::size_t k = 0; k < k_users; ++k)
        for (std::size_t j = 0; j < k_users; ++j) {
            cplx s{};
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    s += std::conj(stats.los(k, a)) * cs.G(a, b) * prop.antenna_to_first(b, antennas[j]);
            alpha[k][j] = stats.beta[k] * std::norm(s);
        }
    double r = 0.0;
    for (std::size_t k = 0; k < k_users; ++k) {
        double interference = stats.noise_power[k];
        for (std::size_t j = 0; j < k_users; ++j)
            if (j != k) interference += alpha[k][j] * p[j];
        r += std::log2(1.0 + alpha[k][k] * p[k] / interference);
    }
    return r;
}

// Self-contained random optimisation instance. Heap-held model keeps the
// propagator's reference valid when the instance moves.
struct Instance {
    SimGeometry geometry;
    std::unique_ptr<PropagationModel> prop;
    std::unique_ptr<FieldPropagator> propagator;
    ChannelStats stats;
    std::vector<std::size_t> antennas;
    PhaseConfig phases;
    PowerAllocation power;

    SumRateProblem problem() const { return SumRateProblem(stats, *propagator, antennas); }
};

inline Instance make_instance(std::size_t atoms_x, std::size_t atoms_y, std::size_t layers, std::size_t users,
                              Rng& rng, double snr_linear = 10.0)
{
    Instance in;
    in.geometry = small_geometry(atoms_x, atoms_y, layers, 2, 2);
    in.prop = std::make_unique<PropagationModel>(build_propagation(in.geometry));
    in.propagator = std::make_unique<FieldPropagator>(*in.prop);
    in.stats = random_stats(users, atoms_x * atoms_y, rng);
    in.antennas = first_antennas(users);
    in.phases = PhaseConfig::random(atoms_x * atoms_y, layers, rng);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    in.power.total_power = 1.0;
    double sum = 0.0;
    for (std::size_t k = 0; k < users; ++k) {
        in.power.p.push_back(u(rng));
        sum += in.power.p.back();
    }
    for (auto& v : in.power.p) v /= sum;
    calibrate_noise(in.stats, in.problem(), in.phases, 1.0, snr_linear);
    return in;
}

// Random shape with N <= 16, L <= 3, K <= 4.
inline Instance random_small_instance(Rng& rng)
{
    std::uniform_int_distribution<std::size_t> side(1, 4);
    std::uniform_int_distribution<std::size_t> layers(1, 3);
    std::uniform_int_distribution<std::size_t> users(1, 4);
    std::size_t ax = side(rng), ay = side(rng);
    if (ax * ay < 2) ay = 2;
    return make_instance(ax, ay, layers(rng), users(rng), rng);
}

// Central differences of oracle_objective, step h.
inline RMatrix finite_difference_gradient(const Instance& in, double h)
{
    RMatrix g(in.phases.atoms(), in.phases.layers());
    for (std::size_t n = 0; n < g.rows(); ++n)
        for (std::size_t l = 0; l < g.cols(); ++l) {
            PhaseConfig plus = in.phases, minus = in.phases;
            plus.theta(n, l) += h;
            minus.theta(n, l) -= h;
            g(n, l) = (oracle_objective(in.stats, *in.prop, in.antennas, plus, in.power.p) -
                       oracle_objective(in.stats, *in.prop, in.antennas, minus, in.power.p)) /
                      (2.0 * h);
        }
    return g;
}

// Entry-wise relative error; entries far below the gradient scale are measured
// against 1e-3 of the largest entry instead of their own size.
inline double gradient_relative_error(const RMatrix& analytic, const RMatrix& reference)
{
    const double floor = 1e-3 * max_abs(reference);
    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double ref = reference.data()[i];
        const double denom = std::max(std::abs(ref), floor);
        if (denom == 0.0) continue;
        worst = std::max(worst, std::abs(analytic.data()[i] - ref) / denom);
    }
    return worst;
}


// Minimum over all partitions of 0..n-1 into at most `groups` groups of at
// most `capacity` users of the largest intra-group CoC.
inline double exhaustive_grouping_optimum(const RMatrix& coc, std::size_t capacity, std::size_t groups)
{
    const std::size_t n = coc.rows();
    std::vector<std::vector<std::size_t>> parts;
    double best = INFINITY;
    auto rec = [&](auto&& self, std::size_t user, double worst) -> void {
        if (worst >= best) return;
        if (user == n) {
            best = worst;
            return;
        }
        for (std::size_t g = 0; g < parts.size(); ++g) {
            if (parts[g].size() >= capacity) continue;
            double w = worst;
            for (std::size_t m : parts[g]) w = std::max(w, coc(user, m));
            parts[g].push_back(user);
            self(self, user + 1, w);
            parts[g].pop_back();
        }
        if (parts.size() < groups) {
            parts.push_back({user});
            self(self, user + 1, worst);
            parts.pop_back();
        }
    };
    rec(rec, 0, 0.0);
    return best;
}

// Enumerates every injective row -> column map; returns the minimum total and
// the lexicographically smallest minimiser (sums accumulated in row order).
inline std::pair<double, std::vector<std::size_t>> brute_force_assignment(const RMatrix& cost)
{
    const std::size_t k = cost.rows(), m = cost.cols();
    std::vector<std::size_t> cur;
    std::vector<char> used(m, 0);
    double best = INFINITY;
    std::vector<std::size_t> best_cols;
    auto rec = [&](auto&& self, double acc) -> void {
        if (cur.size() == k) {
            if (acc < best) {
                best = acc;
                best_cols = cur;
            }
            return;
        }
        for (std::size_t c = 0; c < m; ++c) {
            if (used[c]) continue;
            used[c] = 1;
            cur.push_back(c);
            self(self, acc + cost(cur.size() - 1, c));
            cur.pop_back();
            used[c] = 0;
        }
    };
    rec(rec, 0.0);
    return {best, best_cols};
}

} // namespace simleo::testing

#include "simleo/harness.hpp"
#include "simleo/kernels.hpp"
#include "simleo/scheduler.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace simleo {

namespace {

struct SmallInstance {
    SimGeometry geometry;
    std::unique_ptr<PropagationModel> prop;
    std::unique_ptr<FieldPropagator> propagator;
    ChannelStats stats;
    std::vector<std::size_t> antennas;
};

SmallInstance small_instance(Rng& rng, std::size_t ax, std::size_t ay, std::size_t layers, std::size_t users)
{
    SmallInstance in;
    in.geometry = planar_geometry(1.0, layers, ax * ay, std::max<std::size_t>(4, users), 5.0);
    in.prop = std::make_unique<PropagationModel>(build_propagation(in.geometry));
    in.propagator = std::make_unique<FieldPropagator>(*in.prop);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI), b(0.5, 2.0);
    in.stats.los = CMatrix(users, ax * ay);
    for (auto& v : in.stats.los.data()) v = std::polar(1.0, ph(rng));
    for (std::size_t k = 0; k < users; ++k) {
        in.stats.beta.push_back(b(rng));
        in.stats.kappa.push_back(10.0);
        in.stats.noise_power.push_back(1.0);
    }
    in.antennas.resize(users);
    std::iota(in.antennas.begin(), in.antennas.end(), 0);
    // Noise at 10 dB below the uniform-power mean own gain.
    const SumRateProblem problem(in.stats, *in.propagator, in.antennas);
    const ObjectiveContext ctx = problem.context(PhaseConfig::zeros(ax * ay, layers));
    double own = 0.0;
    for (std::size_t k = 0; k < users; ++k) own += ctx.alpha(k, k);
    for (auto& n : in.stats.noise_power) n = own / static_cast<double>(users * users) / 10.0;
    return in;
}

SelftestCheck check(std::string name, bool ok, std::string detail)
{
    return {std::move(name), ok, std::move(detail)};
}

SelftestCheck kernel_check(Rng& rng)
{
    if (!kernels::avx2_available()) return check("kernels: avx2 matches scalar", true, "avx2 unavailable, skipped");
    std::normal_distribution<double> nd;
    const std::size_t m = 7, k = 5, n = 3;
    std::vector<cplx> a(m * k), b(k * n), cs(m * n), cv(m * n);
    for (auto& v : a) v = {nd(rng), nd(rng)};
    for (auto& v : b) v = {nd(rng), nd(rng)};
    kernels::scalar::cgemm(a.data(), b.data(), cs.data(), m, k, n);
    kernels::avx2::cgemm(a.data(), b.data(), cv.data(), m, k, n);
    double err = 0.0;
    for (std::size_t i = 0; i < cs.size(); ++i) err = std::max(err, std::abs(cs[i] - cv[i]));
    return check("kernels: avx2 matches scalar", err < 1e-12, fmt::format("max abs diff {:.3g}", err));
}

SelftestCheck gradient_check(Rng& rng)
{
    double worst = 0.0;
    for (int t = 0; t < 3; ++t) {
        const SmallInstance in = small_instance(rng, 2, 3, 2, 3);
        const SumRateProblem problem(in.stats, *in.propagator, in.antennas);
        PhaseConfig phases = PhaseConfig::random(6, 2, rng);
        const PowerAllocation p = PowerAllocation::uniform(3, 1.0);
        const RMatrix g = problem.gradient(phases, p);
        double scale = 0.0;
        for (double v : g.data()) scale = std::max(scale, std::abs(v));
        const double h = 1e-5;
        for (std::size_t n = 0; n < 6; ++n)
            for (std::size_t l = 0; l < 2; ++l) {
                PhaseConfig plus = phases, minus = phases;
                plus.theta(n, l) += h;
                minus.theta(n, l) -= h;
                const double fd = (problem.objective(plus, p) - problem.objective(minus, p)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - g(n, l)) / std::max(std::abs(fd), 1e-3 * scale));
            }
    }
    return check("gradient matches central differences", worst < 1e-5, fmt::format("max rel err {:.3g}", worst));
}

SelftestCheck common_phase_check(Rng& rng)
{
    double worst_sum = 0.0, worst_obj = 0.0;
    for (int t = 0; t < 5; ++t) {
        const SmallInstance in = small_instance(rng, 3, 3, 3, 2);
        const SumRateProblem problem(in.stats, *in.propagator, in.antennas);
        PhaseConfig phases = PhaseConfig::random(9, 3, rng);
        const PowerAllocation p = PowerAllocation::uniform(2, 1.0);
        const RMatrix g = problem.gradient(phases, p);
        double scale = 0.0;
        for (double v : g.data()) scale += std::abs(v);
        for (std::size_t l = 0; l < 3; ++l) {
            double s = 0.0;
            for (std::size_t n = 0; n < 9; ++n) s += g(n, l);
            worst_sum = std::max(worst_sum, std::abs(s) / scale);
        }
        const double r0 = problem.objective(phases, p);
        for (std::size_t n = 0; n < 9; ++n) phases.theta(n, 1) += 0.9;
        worst_obj = std::max(worst_obj, std::abs(problem.objective(phases, p) - r0) / r0);
    }
    return check("common layer phase leaves the objective unchanged", worst_sum < 1e-8 && worst_obj < 1e-10,
                 fmt::format("gradient sum {:.3g}, objective change {:.3g}", worst_sum, worst_obj));
}

SelftestCheck waterfill_check(Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    bool nonneg = true;
    for (int t = 0; t < 100; ++t) {
        const std::size_t k = 1 + t % 6;
        ObjectiveContext ctx;
        ctx.alpha = RMatrix(k, k);
        for (auto& v : ctx.alpha.data()) v = u(rng);
        ctx.noise.assign(k, 0.1 + u(rng));
        PowerAllocation p = PowerAllocation::uniform(k, 5.0);
        for (int s = 0; s < 5; ++s) p = waterfill_step(ctx, p);
        worst = std::max(worst, std::abs(p.sum() - 5.0) / 5.0);
        for (double v : p.p) nonneg = nonneg && v >= 0.0;
    }
    return check("water-filling keeps the power budget", worst <= 1e-9 && nonneg,
                 fmt::format("max budget error {:.3g}", worst));
}

SelftestCheck hungarian_check(Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t mismatches = 0;
    for (int t = 0; t < 30; ++t) {
        const std::size_t k = 1 + t % 4, m = k + t % 3;
        RMatrix c(k, m);
        for (auto& v : c.data()) v = u(rng);
        std::vector<std::size_t> cols(m);
        std::iota(cols.begin(), cols.end(), 0);
        double best = INFINITY;
        do {
            double s = 0.0;
            for (std::size_t i = 0; i < k; ++i) s += c(i, cols[i]);
            best = std::min(best, s);
        } while (std::next_permutation(cols.begin(), cols.end()));
        if (std::abs(hungarian_assign(c).cost - best) > 1e-12) ++mismatches;
    }
    return check("Hungarian assignment equals enumeration", mismatches == 0, fmt::format("{} mismatches", mismatches));
}

SelftestCheck grouping_check(Rng& rng)
{
    std::size_t invalid = 0;
    for (int t = 0; t < 20; ++t) {
        const SmallInstance in = small_instance(rng, 2, 2, 1, 7);
        const GroupingPlan plan = greedy_grouping(in.stats, 3);
        try {
            plan.validate(7);
        } catch (const std::invalid_argument&) {
            ++invalid;
        }
    }
    return check("greedy grouping yields partitions", invalid == 0, fmt::format("{} invalid plans", invalid));
}

SelftestCheck ao_check(Rng& rng)
{
    bool monotone = true;
    std::size_t above = 0;
    for (int t = 0; t < 3; ++t) {
        const SmallInstance in = small_instance(rng, 2, 4, 2, 2);
        AoSettings settings;
        settings.max_outer = 30;
        const AoResult r = alternating_optimize(in.stats, *in.propagator, in.antennas, 1.0, settings, rng());
        for (const auto& it : r.trace) monotone = monotone && it.after_phase >= it.after_power;
        const ErgodicEstimate e = evaluate_ergodic_rate(r.phases, r.power.p, in.stats, *in.propagator, in.antennas,
                                                        1000, rng());
        if (e.mean > r.objective + 3.0 * e.std_error) ++above;
    }
    return check("AO phase steps never decrease; ergodic rate below bound", monotone && above == 0,
                 fmt::format("monotone {}, {} trials above bound", monotone, above));
}

} // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<SelftestCheck> out;
    out.push_back(kernel_check(rng));
    out.push_back(gradient_check(rng));
    out.push_back(common_phase_check(rng));
    out.push_back(waterfill_check(rng));
    out.push_back(hungarian_check(rng));
    out.push_back(grouping_check(rng));
    out.push_back(ao_check(rng));
    return out;
}

} // namespace simleo

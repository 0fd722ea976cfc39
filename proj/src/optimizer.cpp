#include "simleo/optimizer.hpp"

#include "simleo/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace simleo {

PowerAllocation PowerAllocation::uniform(std::size_t users, double total_power)
{
    if (users == 0) {
        throw std::invalid_argument("PowerAllocation::uniform: no users");
    }
    PowerAllocation out;
    out.p.assign(users, total_power / static_cast<double>(users));
    out.total_power = total_power;
    return out;
}

double PowerAllocation::sum() const
{
    return std::accumulate(p.begin(), p.end(), 0.0);
}

void PowerAllocation::validate() const
{
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument("power allocation has a negative or non-finite entry");
        }
    }
    if (std::abs(sum() - total_power) > 1e-9 * total_power) {
        throw std::invalid_argument("power allocation does not meet the budget");
    }
}

ObjectiveContext make_objective_context(const ChannelStats& stats, const CMatrix& response)
{
    const std::size_t k = stats.users();
    if (response.rows() != k || response.cols() != k) {
        throw std::invalid_argument("make_objective_context: response must be K x K");
    }
    ObjectiveContext ctx;
    ctx.alpha = RMatrix(k, k);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            ctx.alpha(i, j) = stats.beta[i] * std::norm(response(i, j));
        }
    }
    ctx.noise = stats.noise_power;
    return ctx;
}

namespace {

void check_sizes(const ObjectiveContext& ctx, const PowerAllocation& p)
{
    if (p.users() != ctx.users() || ctx.alpha.rows() != ctx.users() || ctx.alpha.cols() != ctx.users()) {
        throw std::invalid_argument("objective: power vector and gain matrix disagree in size");
    }
}

// sum_{k'} alpha(k, k') p_k' + noise_k
double total_received(const ObjectiveContext& ctx, const PowerAllocation& p, std::size_t k)
{
    double acc = ctx.noise[k];
    for (std::size_t j = 0; j < ctx.users(); ++j) {
        acc += ctx.alpha(k, j) * p.p[j];
    }
    return acc;
}

} // namespace

std::vector<double> average_sinr(const ObjectiveContext& ctx, const PowerAllocation& p)
{
    check_sizes(ctx, p);
    std::vector<double> out(ctx.users());
    for (std::size_t k = 0; k < ctx.users(); ++k) {
        const double signal = ctx.alpha(k, k) * p.p[k];
        double interference = ctx.noise[k];
        for (std::size_t j = 0; j < ctx.users(); ++j) {
            if (j != k) interference += ctx.alpha(k, j) * p.p[j];
        }
        out[k] = signal / interference;
    }
    return out;
}

double objective(const ObjectiveContext& ctx, const PowerAllocation& p)
{
    double r = 0.0;
    for (double g : average_sinr(ctx, p)) {
        r += std::log2(1.0 + g);
    }
    return r;
}

std::vector<double> waterfill_levels(std::span<const double> floors, double budget, double* level)
{
    if (!(budget >= 0.0)) {
        throw std::invalid_argument("waterfill_levels: budget must be >= 0");
    }
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < floors.size(); ++i) {
        if (std::isfinite(floors[i])) order.push_back(i);
    }
    if (order.empty()) {
        throw std::domain_error("water-filling: no user has a non-zero own gain");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return floors[a] < floors[b]; });

    // Active set is a prefix of the sorted floors; the level follows in closed form.
    double prefix = 0.0;
    double t = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        prefix += floors[order[j]];
        t = (budget + prefix) / static_cast<double>(j + 1);
        if (j + 1 == order.size() || t <= floors[order[j + 1]]) break;
    }
    std::vector<double> out(floors.size(), 0.0);
    for (std::size_t i : order) {
        out[i] = std::max(0.0, t - floors[i]);
    }
    if (level) *level = t;
    return out;
}

PowerAllocation waterfill_step(const ObjectiveContext& ctx, const PowerAllocation& p)
{
    check_sizes(ctx, p);
    const std::size_t k = ctx.users();
    std::vector<double> floors(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double own = ctx.alpha(i, i);
        const double interference = total_received(ctx, p, i) - own * p.p[i];
        floors[i] = own > 0.0 ? interference / own : std::numeric_limits<double>::infinity();
    }
    const std::vector<double> candidate = waterfill_levels(floors, p.total_power);
    const double w = 1.0 / static_cast<double>(k);
    PowerAllocation out;
    out.total_power = p.total_power;
    out.p.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.p[i] = w * candidate[i] + (1.0 - w) * p.p[i];
    }
    return out;
}

SumRateProblem::SumRateProblem(const ChannelStats& stats, const FieldPropagator& propagator,
                               std::span<const std::size_t> antennas)
    : stats_(&stats), propagator_(&propagator)
{
    stats.validate();
    if (antennas.size() != stats.users()) {
        throw std::invalid_argument("SumRateProblem: need one antenna per user");
    }
    if (stats.atoms() != propagator.atoms()) {
        throw std::invalid_argument("SumRateProblem: LoS vectors and SIM disagree on atoms per layer");
    }
    inputs_ = antenna_columns(propagator.model(), antennas);
    observe_ = stats.los_columns();
    observe_adj_ = stats.los_adjoint_rows();
}

CMatrix SumRateProblem::response(const PhaseConfig& phases) const
{
    return matmul(observe_adj_, propagator_->forward(phases, inputs_));
}

ObjectiveContext SumRateProblem::context(const PhaseConfig& phases) const
{
    return make_objective_context(*stats_, response(phases));
}

double SumRateProblem::objective(const PhaseConfig& phases, const PowerAllocation& p) const
{
    return simleo::objective(context(phases), p);
}

RMatrix SumRateProblem::gradient(const PhaseConfig& phases, const PowerAllocation& p) const
{
    std::vector<CMatrix> forward;
    const CMatrix out = propagator_->forward(phases, inputs_, &forward);
    const std::vector<CMatrix> backward = propagator_->backward(phases, observe_);
    return gradient_from_fields(*stats_, phases, p, forward, backward, matmul(observe_adj_, out));
}

RMatrix gradient_from_fields(const ChannelStats& stats, const PhaseConfig& phases,
                             const PowerAllocation& p, std::span<const CMatrix> forward,
                             std::span<const CMatrix> backward, const CMatrix& response)
{
    const std::size_t k_users = stats.users();
    const std::size_t n_atoms = phases.atoms();
    const std::size_t n_layers = phases.layers();
    if (forward.size() != n_layers || backward.size() != n_layers) {
        throw std::invalid_argument("gradient_from_fields: need one field block per layer");
    }

    const ObjectiveContext ctx = make_objective_context(stats, response);
    std::vector<double> total(k_users);
    std::vector<double> interference(k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
        total[k] = total_received(ctx, p, k);
        interference[k] = total[k] - ctx.alpha(k, k) * p.p[k];
    }

    // d alpha(k,k') / d theta_n = 2 beta_k Im{exp(-j theta_n) conj(u_n,k') v_n,k S(k,k')},
    // so the whole derivative folds into one complex weight per (k, k').
    CMatrix weight(k_users, k_users);
    for (std::size_t k = 0; k < k_users; ++k) {
        for (std::size_t j = 0; j < k_users; ++j) {
            double factor = 1.0 / total[k];
            if (j != k) factor -= 1.0 / interference[k];
            weight(k, j) = 2.0 * stats.beta[k] * p.p[j] * factor * response(k, j);
        }
    }

    const double log2e = std::numbers::log2e;
    RMatrix grad(n_atoms, n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        const CMatrix& u = forward[l];
        const CMatrix& v = backward[l];
        for (std::size_t n = 0; n < n_atoms; ++n) {
            cplx acc{};
            for (std::size_t k = 0; k < k_users; ++k) {
                cplx inner{};
                for (std::size_t j = 0; j < k_users; ++j) {
                    inner += std::conj(u(n, j)) * weight(k, j);
                }
                acc += v(n, k) * inner;
            }
            grad(n, l) = log2e * (std::polar(1.0, -phases.theta(n, l)) * acc).imag();
        }
    }
    return grad;
}

RMatrix gradient_theta(const ChannelStats& stats, const CascadeState& cascade,
                       const PropagationModel& prop, std::span<const std::size_t> antennas,
                       const PhaseConfig& phases, const PowerAllocation& p)
{
    if (cascade.A.size() != phases.layers() || cascade.B.size() != phases.layers()) {
        throw std::invalid_argument("gradient_theta: cascade does not match phase layers");
    }
    const CMatrix inputs = antenna_columns(prop, antennas);
    const CMatrix observe = stats.los_columns();
    std::vector<CMatrix> forward;
    std::vector<CMatrix> backward;
    for (std::size_t l = 0; l < phases.layers(); ++l) {
        forward.push_back(matmul(cascade.A[l], inputs));
        backward.push_back(matmul(adjoint(cascade.B[l]), observe));
    }
    const CMatrix response = matmul(stats.los_adjoint_rows(), matmul(cascade.G, inputs));
    return gradient_from_fields(stats, phases, p, forward, backward, response);
}

PhaseStep armijo_phase_step(const SumRateProblem& problem, const PhaseConfig& phases,
                            const PowerAllocation& p, const RMatrix& gradient,
                            double current_objective, const ArmijoSettings& settings)
{
    if (gradient.rows() != phases.atoms() || gradient.cols() != phases.layers()) {
        throw std::invalid_argument("armijo_phase_step: gradient shape mismatch");
    }
    double grad_sq = 0.0;
    for (double g : gradient.data()) grad_sq += g * g;
    if (!(grad_sq > 0.0)) {
        return {phases, current_objective, 0.0};
    }
    double mu = settings.initial_step;
    for (std::size_t i = 0; i <= settings.max_halvings; ++i) {
        PhaseConfig candidate = phases;
        for (std::size_t e = 0; e < candidate.theta.size(); ++e) {
            candidate.theta.data()[e] += mu * gradient.data()[e];
        }
        candidate.wrap();
        const double value = problem.objective(candidate, p);
        if (value >= current_objective + settings.sufficient_increase * mu * grad_sq) {
            return {std::move(candidate), value, mu};
        }
        mu *= settings.shrink;
    }
    return {phases, current_objective, 0.0};
}

AoResult alternating_optimize(const ChannelStats& stats, const FieldPropagator& propagator,
                              std::span<const std::size_t> antennas, double total_power,
                              const AoSettings& settings, std::uint64_t seed)
{
    const SumRateProblem problem(stats, propagator, antennas);
    Rng rng(seed);
    PhaseConfig phases = PhaseConfig::random(problem.atoms(), problem.layers(), rng);
    return alternating_optimize_from(problem, std::move(phases),
                                     PowerAllocation::uniform(stats.users(), total_power), settings);
}

namespace {

double relative_change(double now, double before)
{
    return std::abs(now - before) / std::max(std::abs(before), 1e-300);
}

} // namespace

AoResult alternating_optimize_from(const SumRateProblem& problem, PhaseConfig phases,
                                   PowerAllocation power, const AoSettings& settings)
{
    power.validate();
    ObjectiveContext ctx = problem.context(phases);
    double current = objective(ctx, power);

    AoResult result;
    result.initial_objective = current;
    result.objective = current;
    result.phases = phases;
    result.power = power;

    auto keep_best = [&](double value) {
        if (value > result.objective) {
            result.objective = value;
            result.phases = phases;
            result.power = power;
        }
    };

    for (std::size_t it = 0; it < settings.max_outer; ++it) {
        const double best_before = result.objective;
        const double iterate_before = current;

        AoIteration rec;
        if (settings.optimize_power) {
            for (std::size_t s = 0; s < settings.waterfill_sweeps; ++s) {
                power = waterfill_step(ctx, power);
            }
            current = objective(ctx, power);
            keep_best(current);
        }
        rec.after_power = current;

        if (settings.optimize_phases) {
            const RMatrix grad = problem.gradient(phases, power);
            PhaseStep step = armijo_phase_step(problem, phases, power, grad, current, settings.armijo);
            rec.step = step.step;
            if (step.step > 0.0) {
                phases = std::move(step.phases);
                ctx = problem.context(phases);
                current = step.objective;
                keep_best(current);
            }
        }
        rec.after_phase = current;
        result.trace.push_back(rec);
        result.iterations = it + 1;

        if (relative_change(result.objective, best_before) < settings.tolerance &&
            relative_change(current, iterate_before) < settings.tolerance) {
            break;
        }
    }
    return result;
}

} // namespace simleo

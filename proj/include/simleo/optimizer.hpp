#pragma once

#include "simleo/beamformer.hpp"
#include "simleo/channel.hpp"
#include "simleo/matrix.hpp"
#include "simleo/propagation.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace simleo {

/// Per-user transmit powers under a total budget.
struct PowerAllocation {
    std::vector<double> p;
    double total_power = 0.0;

    static PowerAllocation uniform(std::size_t users, double total_power);
    std::size_t users() const noexcept { return p.size(); }
    double sum() const;
    /// Non-negative entries summing to total_power within 1e-9 relative.
    void validate() const;
};

/// Gain matrix of the statistical SINR proxy:
/// alpha(k, k') = beta_k |h_los,k^H G w_k'|^2, plus per-user noise power.
struct ObjectiveContext {
    RMatrix alpha;
    std::vector<double> noise;

    std::size_t users() const noexcept { return noise.size(); }
};

/// alpha(k, k') = beta_k |response(k, k')|^2, response(k, k') = h_los,k^H G w_k'.
ObjectiveContext make_objective_context(const ChannelStats& stats, const CMatrix& response);

std::vector<double> average_sinr(const ObjectiveContext& ctx, const PowerAllocation& p);

/// Sum over users of log2(1 + average SINR), bits/s/Hz.
double objective(const ObjectiveContext& ctx, const PowerAllocation& p);

/// Classical water-filling: c_k = (level - floor_k)^+ with sum c_k = budget.
/// Infinite floors never receive power. Throws if every floor is infinite.
std::vector<double> waterfill_levels(std::span<const double> floors, double budget,
                                     double* level = nullptr);

/// One damped iterative water-filling sweep: each user's floor is its current
/// interference-plus-noise over its own gain; the result is c/K + (1 - 1/K) p.
PowerAllocation waterfill_step(const ObjectiveContext& ctx, const PowerAllocation& p);

/// Statistical sum-rate problem for one group of users served from fixed
/// antennas. Holds references to stats and propagator; both must outlive it.
class SumRateProblem {
public:
    SumRateProblem(const ChannelStats& stats, const FieldPropagator& propagator,
                   std::span<const std::size_t> antennas);

    std::size_t users() const noexcept { return stats_->users(); }
    std::size_t atoms() const noexcept { return propagator_->atoms(); }
    std::size_t layers() const noexcept { return propagator_->layers(); }
    const ChannelStats& stats() const noexcept { return *stats_; }

    /// K x K matrix of h_los,k^H G w_k'.
    CMatrix response(const PhaseConfig& phases) const;
    ObjectiveContext context(const PhaseConfig& phases) const;
    double objective(const PhaseConfig& phases, const PowerAllocation& p) const;
    /// Analytic d(objective)/d(theta), N x L.
    RMatrix gradient(const PhaseConfig& phases, const PowerAllocation& p) const;

private:
    const ChannelStats* stats_;
    const FieldPropagator* propagator_;
    CMatrix inputs_;        // N x K, antenna -> first-layer columns
    CMatrix observe_;       // N x K, h_los columns
    CMatrix observe_adj_;   // K x N, h_los^H rows
};

/// Gradient from the per-layer fields A_l W (forward) and B_l^H H (backward)
/// and the response matrix. Shared by both gradient routes below.
RMatrix gradient_from_fields(const ChannelStats& stats, const PhaseConfig& phases,
                             const PowerAllocation& p, std::span<const CMatrix> forward,
                             std::span<const CMatrix> backward, const CMatrix& response);

/// Gradient through the cached cascade factors A_l, B_l.
RMatrix gradient_theta(const ChannelStats& stats, const CascadeState& cascade,
                       const PropagationModel& prop, std::span<const std::size_t> antennas,
                       const PhaseConfig& phases, const PowerAllocation& p);

struct ArmijoSettings {
    double initial_step = 1.0;
    double shrink = 0.5;
    double sufficient_increase = 1e-4;
    std::size_t max_halvings = 30;
};

struct PhaseStep {
    PhaseConfig phases;
    double objective = 0.0;
    double step = 0.0;  // accepted mu; 0 when no step was admissible
};

/// Backtracking ascent step theta <- wrap(theta + mu * grad). Never returns a
/// configuration with a lower objective than current_objective.
PhaseStep armijo_phase_step(const SumRateProblem& problem, const PhaseConfig& phases,
                            const PowerAllocation& p, const RMatrix& gradient,
                            double current_objective, const ArmijoSettings& settings = {});

struct AoSettings {
    std::size_t waterfill_sweeps = 5;
    std::size_t max_outer = 200;
    double tolerance = 1e-4;
    ArmijoSettings armijo;
    bool optimize_power = true;
    bool optimize_phases = true;
};

struct AoIteration {
    double after_power = 0.0;
    double after_phase = 0.0;
    double step = 0.0;
};

struct AoResult {
    PhaseConfig phases;
    PowerAllocation power;
    double objective = 0.0;           // best seen
    double initial_objective = 0.0;
    std::vector<AoIteration> trace;
    std::size_t iterations = 0;
};

/// Alternating optimisation from a random start drawn from seed.
AoResult alternating_optimize(const ChannelStats& stats, const FieldPropagator& propagator,
                              std::span<const std::size_t> antennas, double total_power,
                              const AoSettings& settings, std::uint64_t seed);

/// Same, starting from given phases and powers.
AoResult alternating_optimize_from(const SumRateProblem& problem, PhaseConfig phases,
                                   PowerAllocation power, const AoSettings& settings);

} // namespace simleo

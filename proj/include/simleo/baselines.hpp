#pragma once

#include "simleo/beamformer.hpp"
#include "simleo/channel.hpp"
#include "simleo/matrix.hpp"
#include "simleo/optimizer.hpp"
#include "simleo/random.hpp"
#include "simleo/scheduler.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace simleo {

/// Digital precoder: unit-norm columns (one per user) plus per-user powers.
struct DigitalPrecoder {
    CMatrix directions;  // M_a x K
    std::vector<double> power;
};

/// Indices of the `count` last-layer atoms closest to the stack axis, ties by index.
std::vector<std::size_t> centered_atoms(const SimGeometry& geometry, std::size_t count);

/// Effective K x M_a channel for antennas placed on the given last-layer atoms:
/// H(k, m) = sqrt(beta_k) conj(h_los,k[atom m]).
CMatrix digital_channel(const ChannelStats& stats, std::span<const std::size_t> atoms);

/// Zero-forcing directions H^H (H H^H)^-1, column-normalised, water-filled powers.
/// Throws std::domain_error when H is not full row rank.
DigitalPrecoder zf_precoder(const CMatrix& h, double total_power, std::span<const double> noise);

/// Regularised directions H^H (H H^H + (K mean(noise) / P_T) I)^-1, uniform power.
DigitalPrecoder mmse_precoder(const CMatrix& h, double total_power, std::span<const double> noise);

/// alpha(k, k') = |h_k f_k'|^2 for use with objective().
ObjectiveContext digital_context(const CMatrix& h, const DigitalPrecoder& precoder,
                                 std::span<const double> noise);

double digital_sum_rate(const CMatrix& h, const DigitalPrecoder& precoder, std::span<const double> noise,
                        double total_power);

GroupingPlan random_grouping(std::size_t total_users, std::size_t capacity, Rng& rng);

/// `users` distinct antennas out of `num_antennas`, uniformly.
AntennaAssignment random_assignment(std::size_t users, std::size_t num_antennas, Rng& rng);

struct RandomControls {
    PhaseConfig phases;
    GroupingPlan grouping;
    AntennaAssignment assignment;
};

struct ControlShape {
    std::size_t atoms = 1;
    std::size_t layers = 1;
    std::size_t total_users = 1;
    std::size_t group_capacity = 1;
    std::size_t num_antennas = 1;
};

/// Uniform random phases, grouping and first-group assignment; deterministic per seed.
RandomControls random_controls(std::uint64_t seed, const ControlShape& shape);

} // namespace simleo

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

/// |x^H y| / (|x| |y|), in [0, 1]. Throws std::domain_error on a zero vector.
double coc(std::span<const cplx> x, std::span<const cplx> y);

/// Symmetric K x K CoC matrix of the statistical proxies sqrt(beta_k) h_los,k.
RMatrix coc_matrix(const ChannelStats& stats);

/// Disjoint user groups covering 0..total-1, each of at most `capacity` users.
struct GroupingPlan {
    std::vector<std::vector<std::size_t>> groups;
    std::size_t capacity = 0;

    std::size_t group_count() const noexcept { return groups.size(); }
    /// Throws std::invalid_argument unless the groups partition 0..total-1.
    void validate(std::size_t total_users) const;
};

std::size_t group_count_for(std::size_t total_users, std::size_t capacity);

/// Largest pairwise CoC inside any group (0 for singleton groups).
double grouping_objective(const GroupingPlan& plan, const RMatrix& coc);

/// Greedy min-max CoC grouping.
///
/// Users are visited in order of decreasing mean CoC to the rest of the
/// population; each joins the non-full group whose intra-group maximum CoC
/// grows the least. Ties go to the lower user / group index.
GroupingPlan greedy_grouping(const RMatrix& coc, std::size_t capacity);
GroupingPlan greedy_grouping(const ChannelStats& stats, std::size_t capacity);

/// leak(k, m) = sum_{k' != k} beta_k' |h_los,k'^H G w_m|^2 for a group's stats.
RMatrix leakage_matrix(const ChannelStats& group_stats, const CMatrix& cascade, const PropagationModel& prop);

struct Assignment {
    std::vector<std::size_t> columns;  // row k -> column columns[k]
    double cost = 0.0;
};

/// Minimum-cost injective row -> column assignment (rows <= cols).
/// Among equal-cost optima the lexicographically smallest column vector wins.
Assignment hungarian_assign(const RMatrix& cost);

/// One user -> antenna map for a single group.
struct AntennaAssignment {
    std::vector<std::size_t> antennas;  // antennas[i] serves the i-th user of the group
    double leakage = 0.0;
    std::size_t draw = 0;               // index of the winning random draw

    void validate(std::size_t num_antennas) const;
};

struct AntennaDraw {
    PhaseConfig phases;
    Assignment assignment;
};

struct AntennaSelection {
    AntennaAssignment best;
    std::vector<AntennaDraw> draws;
};

/// Leakage-minimising antenna selection over `draws` random phase draws.
AntennaSelection select_antennas(const ChannelStats& group_stats, const FieldPropagator& propagator,
                                 std::size_t draws, std::uint64_t seed);

} // namespace simleo

#pragma once

#include "simleo/beamformer.hpp"
#include "simleo/channel.hpp"
#include "simleo/optimizer.hpp"
#include "simleo/propagation.hpp"
#include "simleo/random.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace simleo {

/// Invalid configuration; field() names the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument("config field '" + field + "': " + message), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class SweepAxis { none, layers, atoms_per_layer, power_dbw, total_users, users, layers_fixed_total };
enum class GroupingScheme { none, greedy, random };
enum class SelectionScheme { leakage, random, first };
enum class BeamformingScheme { optimized, random_phase, zf, mmse };

/// One experiment: scenario parameters, algorithm settings, trial counts and
/// an optional one-dimensional sweep.
struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 20;
    std::size_t mc_draws = 1000;

    double power_dbw = 30.0;
    std::size_t atoms_per_layer = 225;
    std::size_t layers = 4;
    std::size_t antennas = 9;
    std::size_t users = 9;
    std::size_t total_users = 36;
    std::size_t group_size = 9;
    std::size_t total_atoms = 1200;

    double carrier_hz = 4.0e9;
    double thickness_wavelengths = 5.0;
    LinkParams link;

    AoSettings ao;
    std::size_t antenna_draws = 10;

    GroupingScheme grouping = GroupingScheme::none;
    SelectionScheme antenna_selection = SelectionScheme::leakage;
    BeamformingScheme beamforming = BeamformingScheme::optimized;
    std::size_t digital_antennas = 0;  // 0: one per served user

    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;

    bool record_wallclock = false;

    /// Flat "key = value" text; '#' starts a comment. Unknown or repeated keys throw.
    static ScenarioConfig parse(std::string_view text);
    static ScenarioConfig load(const std::filesystem::path& path);

    /// Sets one key from its textual value. Throws ConfigError.
    void set(std::string_view key, std::string_view value);

    /// Canonical text form; parse(to_string()) reproduces the config.
    std::string to_string() const;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    /// Sweep values, or {0} when there is no sweep axis.
    std::vector<double> sweep_points() const;

    /// Copy with the sweep axis set to value (sweep cleared).
    ScenarioConfig at(double value) const;

    SimGeometry geometry() const;
    double total_power_w() const;
    /// Users drawn per scenario: users without grouping, total_users with it.
    std::size_t scenario_users() const;
    /// Users served simultaneously per group.
    std::size_t group_capacity() const;
};

/// Documented config keys, in canonical order.
struct ConfigKey {
    std::string name;
    std::string description;
};
const std::vector<ConfigKey>& config_keys();

std::string sweep_axis_name(SweepAxis axis);
std::string grouping_name(GroupingScheme g);
std::string selection_name(SelectionScheme s);
std::string beamforming_name(BeamformingScheme b);

/// Most nearly square factorisation a x b = n with a <= b.
std::pair<std::size_t, std::size_t> near_square_factors(std::size_t n);

/// Geometry with near-square grids, atom pitch lambda/2, antenna pitch lambda.
SimGeometry planar_geometry(double wavelength, std::size_t layers, std::size_t atoms, std::size_t antennas,
                            double thickness_wavelengths);

struct ErgodicEstimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Monte-Carlo estimate of E[sum_k log2(1 + SINR_k)] over Rician fading.
///
/// field is the N x K last-layer field per stream (G W for the SIM, the
/// precoder placed on its atoms for digital baselines). Each draw scales user
/// k's channel by an independent fading factor c_k. Throws for draws = 0.
ErgodicEstimate evaluate_ergodic_rate(const ChannelStats& stats, const CMatrix& field, std::span<const double> power,
                                      std::size_t draws, std::uint64_t seed);

ErgodicEstimate evaluate_ergodic_rate(const PhaseConfig& phases, std::span<const double> power,
                                      const ChannelStats& stats, const FieldPropagator& propagator,
                                      std::span<const std::size_t> antennas, std::size_t draws, std::uint64_t seed);

/// Seed for (stream, trial, purpose, group); independent of the sweep value so
/// that trials are paired across sweep points.
std::uint64_t trial_seed(std::uint64_t master, SeedStream stream, std::size_t trial, std::size_t purpose = 0,
                         std::size_t group = 0);

struct GroupOutcome {
    std::vector<std::size_t> users;
    std::vector<std::size_t> antennas;  // SIM antennas, or last-layer atoms for digital baselines
    std::optional<double> leakage;
    double objective = 0.0;
    ErgodicEstimate ergodic;
    std::size_t iterations = 0;
    std::vector<double> trace;  // objective before the first and after each outer iteration
};

struct TrialResult {
    std::size_t point = 0;  // index into the sweep values
    double sweep_value = 0.0;
    std::size_t trial = 0;
    std::uint64_t seed = 0;  // scenario seed
    double objective_bound = 0.0;
    double ergodic_rate_mc = 0.0;
    double std_error = 0.0;
    std::size_t iterations = 0;
    double wallclock_ms = 0.0;
    std::vector<GroupOutcome> groups;
};

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<TrialResult> rows;  // sorted by (sweep point, trial)
};

/// Prebuilt propagation state for one sweep point.
struct PointModel {
    ScenarioConfig config;
    SimGeometry geometry;
    PropagationModel prop;
    FieldPropagator propagator;

    explicit PointModel(const ScenarioConfig& cfg);
    PointModel(const PointModel&) = delete;
    PointModel& operator=(const PointModel&) = delete;
};

/// One trial at one sweep point: scenario drop, grouping, per-group antenna
/// selection and beamforming, Monte-Carlo evaluation. Per-trial values are
/// means over groups (groups share time slots).
TrialResult run_trial(const PointModel& model, std::size_t point, double sweep_value, std::size_t trial);

/// All (sweep point, trial) pairs on `threads` workers (0: hardware count).
ExperimentResult run_experiment(const ScenarioConfig& config, std::size_t threads);

struct AggregateRow {
    double sweep_value = 0.0;
    std::size_t trials = 0;
    double objective_mean = 0.0;
    double objective_ci95 = 0.0;
    double ergodic_mean = 0.0;
    double ergodic_ci95 = 0.0;
    double iterations_mean = 0.0;
};

/// Mean and two-sided 95% Student-t half-width of the mean.
std::pair<double, double> mean_ci95(std::span<const double> values);

/// Rows must be grouped by sweep value; groups keep their order of appearance.
std::vector<AggregateRow> aggregate(std::span<const TrialResult> rows);

std::string results_csv(std::span<const TrialResult> rows);
std::string aggregate_csv(std::span<const AggregateRow> rows);
std::string trace_csv(std::span<const TrialResult> rows);
std::string groups_csv(std::span<const TrialResult> rows);
std::string summary_table(const ExperimentResult& result);

/// Writes results.csv, aggregate.csv, trace.csv, groups.csv, summary.txt and config.txt.
void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// Parses the per-trial columns of results.csv. Throws std::runtime_error on malformed input.
std::vector<TrialResult> parse_results_csv(std::string_view text);

struct VerifyReport {
    bool ok = false;
    std::size_t rows = 0;
    std::string message;
};

/// Re-aggregates results.csv in dir and compares with aggregate.csv byte for byte.
VerifyReport verify_outputs(const std::filesystem::path& dir);

struct GroupDemoRow {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double greedy_objective = 0.0;   // largest intra-group CoC
    double random_objective = 0.0;
    double selected_leakage = 0.0;   // sum over groups, leakage-minimising selection
    double random_leakage = 0.0;     // sum over groups, random antennas on the same draws
};

/// Grouping and antenna selection only, no beamforming optimisation.
std::vector<GroupDemoRow> run_group_demo(const ScenarioConfig& config, std::size_t threads);
std::string group_demo_csv(std::span<const GroupDemoRow> rows);
std::string group_demo_summary(std::span<const GroupDemoRow> rows);

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Fast invariant suite over small random instances.
std::vector<SelftestCheck> run_selftest(std::uint64_t seed);

} // namespace simleo

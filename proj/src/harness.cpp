#include "simleo/harness.hpp"
#include "simleo/baselines.hpp"
#include "simleo/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>

namespace simleo {

namespace {

// Purposes inside the random_controls stream.
constexpr std::size_t purpose_grouping = 0;
constexpr std::size_t purpose_assignment = 1;
constexpr std::size_t purpose_phases = 2;

bool is_digital(BeamformingScheme b) { return b == BeamformingScheme::zf || b == BeamformingScheme::mmse; }

std::size_t worker_count(std::size_t requested, std::size_t tasks)
{
    std::size_t n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return std::max<std::size_t>(1, std::min(n, tasks));
}

// Runs body(i) for i in [0, count) on a worker pool; rethrows the first failure.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body body)
{
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
            }
        }
    };
    const std::size_t n = worker_count(threads, count);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
}

GroupingPlan make_grouping(const ScenarioConfig& cfg, const ChannelStats& stats, std::size_t trial)
{
    switch (cfg.grouping) {
    case GroupingScheme::none: {
        GroupingPlan plan;
        plan.capacity = stats.users();
        plan.groups.emplace_back(stats.users());
        std::iota(plan.groups[0].begin(), plan.groups[0].end(), 0);
        return plan;
    }
    case GroupingScheme::greedy: return greedy_grouping(stats, cfg.group_size);
    case GroupingScheme::random: {
        Rng rng(trial_seed(cfg.seed, SeedStream::random_controls, trial, purpose_grouping));
        return random_grouping(stats.users(), cfg.group_size, rng);
    }
    }
    throw std::logic_error("unknown grouping scheme");
}

GroupOutcome run_digital_group(const PointModel& model, const ChannelStats& gs, std::size_t trial, std::size_t group)
{
    const ScenarioConfig& cfg = model.config;
    const double pt = cfg.total_power_w();
    const std::size_t k = gs.users();
    const std::size_t used = cfg.digital_antennas == 0 ? k : cfg.digital_antennas;

    GroupOutcome out;
    out.antennas = centered_atoms(model.geometry, used);
    const CMatrix h = digital_channel(gs, out.antennas);
    const DigitalPrecoder prec = cfg.beamforming == BeamformingScheme::zf ? zf_precoder(h, pt, gs.noise_power)
                                                                          : mmse_precoder(h, pt, gs.noise_power);
    out.objective = digital_sum_rate(h, prec, gs.noise_power, pt);
    out.trace = {out.objective};

    CMatrix field(gs.atoms(), k);
    for (std::size_t m = 0; m < used; ++m)
        for (std::size_t j = 0; j < k; ++j) field(out.antennas[m], j) = prec.directions(m, j);
    out.ergodic = evaluate_ergodic_rate(gs, field, prec.power, cfg.mc_draws,
                                        trial_seed(cfg.seed, SeedStream::monte_carlo, trial, 0, group));
    return out;
}

GroupOutcome run_sim_group(const PointModel& model, const ChannelStats& gs, std::size_t trial, std::size_t group)
{
    const ScenarioConfig& cfg = model.config;
    const double pt = cfg.total_power_w();
    const std::size_t k = gs.users();

    GroupOutcome out;
    switch (cfg.antenna_selection) {
    case SelectionScheme::leakage: {
        const AntennaSelection sel = select_antennas(
            gs, model.propagator, cfg.antenna_draws, trial_seed(cfg.seed, SeedStream::antenna_draws, trial, 0, group));
        out.antennas = sel.best.antennas;
        out.leakage = sel.best.leakage;
        break;
    }
    case SelectionScheme::random: {
        Rng rng(trial_seed(cfg.seed, SeedStream::random_controls, trial, purpose_assignment, group));
        out.antennas = random_assignment(k, cfg.antennas, rng).antennas;
        break;
    }
    case SelectionScheme::first:
        out.antennas.resize(k);
        std::iota(out.antennas.begin(), out.antennas.end(), 0);
        break;
    }

    AoResult ao;
    if (cfg.beamforming == BeamformingScheme::optimized) {
        ao = alternating_optimize(gs, model.propagator, out.antennas, pt, cfg.ao,
                                  trial_seed(cfg.seed, SeedStream::ao_init, trial, 0, group));
    } else {
        // Random phases held fixed; power still water-filled.
        Rng rng(trial_seed(cfg.seed, SeedStream::random_controls, trial, purpose_phases, group));
        PhaseConfig phases = PhaseConfig::random(model.geometry.atoms_per_layer(), model.geometry.layers, rng);
        AoSettings settings = cfg.ao;
        settings.optimize_phases = false;
        const SumRateProblem problem(gs, model.propagator, out.antennas);
        ao = alternating_optimize_from(problem, std::move(phases), PowerAllocation::uniform(k, pt), settings);
    }
    out.objective = ao.objective;
    out.iterations = ao.iterations;
    out.trace.push_back(ao.initial_objective);
    for (const auto& it : ao.trace) out.trace.push_back(it.after_phase);
    out.ergodic = evaluate_ergodic_rate(ao.phases, ao.power.p, gs, model.propagator, out.antennas, cfg.mc_draws,
                                        trial_seed(cfg.seed, SeedStream::monte_carlo, trial, 0, group));
    return out;
}

} // namespace

std::uint64_t trial_seed(std::uint64_t master, SeedStream stream, std::size_t trial, std::size_t purpose,
                         std::size_t group)
{
    const std::uint64_t base = derive_seed(master, stream, trial);
    if (purpose == 0 && group == 0) return base;
    return derive_seed(base, purpose, group);
}

ErgodicEstimate evaluate_ergodic_rate(const ChannelStats& stats, const CMatrix& field, std::span<const double> power,
                                      std::size_t draws, std::uint64_t seed)
{
    if (draws == 0) {
        throw std::invalid_argument("evaluate_ergodic_rate: draws must be >= 1");
    }
    const std::size_t k = stats.users();
    if (field.rows() != stats.atoms() || field.cols() != k || power.size() != k) {
        throw std::invalid_argument("evaluate_ergodic_rate: dimension mismatch");
    }
    // Mean gains alpha(k, j) = beta_k |h_los,k^H f_j|^2; a draw scales row k by |c_k|^2.
    const CMatrix response = matmul(stats.los_adjoint_rows(), field);
    RMatrix alpha(k, k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) alpha(i, j) = stats.beta[i] * std::norm(response(i, j));
    std::vector<double> signal(k), interference(k);
    for (std::size_t i = 0; i < k; ++i) {
        signal[i] = alpha(i, i) * power[i];
        for (std::size_t j = 0; j < k; ++j)
            if (j != i) interference[i] += alpha(i, j) * power[j];
    }

    Rng rng(seed);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        double rate = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double g = std::norm(draw_fading(stats.kappa[i], rng));
            rate += std::log2(1.0 + g * signal[i] / (g * interference[i] + stats.noise_power[i]));
        }
        sum += rate;
        sum_sq += rate * rate;
    }
    const double n = static_cast<double>(draws);
    ErgodicEstimate out;
    out.mean = sum / n;
    if (draws > 1) {
        const double var = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
        out.std_error = std::sqrt(var / n);
    }
    return out;
}

ErgodicEstimate evaluate_ergodic_rate(const PhaseConfig& phases, std::span<const double> power,
                                      const ChannelStats& stats, const FieldPropagator& propagator,
                                      std::span<const std::size_t> antennas, std::size_t draws, std::uint64_t seed)
{
    const CMatrix field = propagator.forward(phases, antenna_columns(propagator.model(), antennas));
    return evaluate_ergodic_rate(stats, field, power, draws, seed);
}

PointModel::PointModel(const ScenarioConfig& cfg)
    : config(cfg), geometry(cfg.geometry()), prop(build_propagation(geometry)), propagator(prop)
{
}

TrialResult run_trial(const PointModel& model, std::size_t point, double sweep_value, std::size_t trial)
{
    const auto start = std::chrono::steady_clock::now();
    const ScenarioConfig& cfg = model.config;

    TrialResult r;
    r.point = point;
    r.sweep_value = sweep_value;
    r.trial = trial;
    r.seed = trial_seed(cfg.seed, SeedStream::scenario, trial);
    const Scenario scenario = sample_scenario(r.seed, cfg.scenario_users(), model.geometry, cfg.link);
    const GroupingPlan plan = make_grouping(cfg, scenario.stats, trial);

    double var_sum = 0.0;
    for (std::size_t g = 0; g < plan.group_count(); ++g) {
        const ChannelStats gs = scenario.stats.subset(plan.groups[g]);
        GroupOutcome o = is_digital(cfg.beamforming) ? run_digital_group(model, gs, trial, g)
                                                     : run_sim_group(model, gs, trial, g);
        o.users = plan.groups[g];
        r.objective_bound += o.objective;
        r.ergodic_rate_mc += o.ergodic.mean;
        var_sum += o.ergodic.std_error * o.ergodic.std_error;
        r.iterations += o.iterations;
        r.groups.push_back(std::move(o));
    }
    const double groups = static_cast<double>(plan.group_count());
    r.objective_bound /= groups;
    r.ergodic_rate_mc /= groups;
    r.std_error = std::sqrt(var_sum) / groups;
    if (cfg.record_wallclock) {
        r.wallclock_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    return r;
}

ExperimentResult run_experiment(const ScenarioConfig& config, std::size_t threads)
{
    config.validate();
    const std::vector<double> points = config.sweep_points();
    std::vector<std::unique_ptr<PointModel>> models;
    for (double v : points) models.push_back(std::make_unique<PointModel>(config.at(v)));

    const std::size_t total = points.size() * config.trials;
    std::vector<TrialResult> rows(total);
    parallel_for(total, threads, [&](std::size_t i) {
        const std::size_t p = i / config.trials;
        const std::size_t t = i % config.trials;
        rows[i] = run_trial(*models[p], p, points[p], t);
    });
    std::sort(rows.begin(), rows.end(), [](const TrialResult& a, const TrialResult& b) {
        return std::tie(a.point, a.trial) < std::tie(b.point, b.trial);
    });

    ExperimentResult out;
    out.config = config;
    out.rows = std::move(rows);
    return out;
}

std::vector<GroupDemoRow> run_group_demo(const ScenarioConfig& config, std::size_t threads)
{
    config.validate();
    const ScenarioConfig cfg = config.at(config.sweep_points().front());
    const PointModel model(cfg);
    std::vector<GroupDemoRow> rows(cfg.trials);
    parallel_for(cfg.trials, threads, [&](std::size_t trial) {
        GroupDemoRow& row = rows[trial];
        row.trial = trial;
        row.seed = trial_seed(cfg.seed, SeedStream::scenario, trial);
        const Scenario sc = sample_scenario(row.seed, cfg.total_users, model.geometry, cfg.link);
        const RMatrix c = coc_matrix(sc.stats);
        const GroupingPlan greedy = greedy_grouping(c, cfg.group_size);
        Rng grng(trial_seed(cfg.seed, SeedStream::random_controls, trial, purpose_grouping));
        row.greedy_objective = grouping_objective(greedy, c);
        row.random_objective = grouping_objective(random_grouping(cfg.total_users, cfg.group_size, grng), c);
        for (std::size_t g = 0; g < greedy.group_count(); ++g) {
            const ChannelStats gs = sc.stats.subset(greedy.groups[g]);
            const AntennaSelection sel = select_antennas(
                gs, model.propagator, cfg.antenna_draws, trial_seed(cfg.seed, SeedStream::antenna_draws, trial, 0, g));
            row.selected_leakage += sel.best.leakage;
            Rng arng(trial_seed(cfg.seed, SeedStream::random_controls, trial, purpose_assignment, g));
            const AntennaAssignment rand = random_assignment(gs.users(), cfg.antennas, arng);
            double mean = 0.0;
            for (const auto& d : sel.draws) {
                const RMatrix leak = leakage_matrix(gs, compose_cascade(d.phases, model.prop).G, model.prop);
                for (std::size_t i = 0; i < gs.users(); ++i) mean += leak(i, rand.antennas[i]);
            }
            row.random_leakage += mean / static_cast<double>(sel.draws.size());
        }
    });
    return rows;
}

} // namespace simleo

#include "simleo/harness.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::size_t threads = 0;
};

simleo::ScenarioConfig load_config(const Options& o)
{
    simleo::ScenarioConfig cfg = o.config.empty() ? simleo::ScenarioConfig{} : simleo::ScenarioConfig::load(o.config);
    if (o.seed) cfg.seed = *o.seed;
    cfg.validate();
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << text)) throw std::runtime_error("cannot write " + path.string());
}

int run_experiment_command(const Options& o, bool sweep)
{
    const simleo::ScenarioConfig cfg = load_config(o);
    if (sweep && cfg.sweep_axis == simleo::SweepAxis::none) {
        throw simleo::ConfigError("sweep_axis", "sweep needs a sweep axis; use simulate for a single scenario");
    }
    if (!sweep && cfg.sweep_axis != simleo::SweepAxis::none) {
        throw simleo::ConfigError("sweep_axis", "simulate runs a single scenario; use sweep for a sweep axis");
    }
    const simleo::ExperimentResult result = simleo::run_experiment(cfg, o.threads);
    simleo::emit_outputs(result, o.out);
    std::cout << simleo::summary_table(result);
    std::cout << "wrote " << o.out << "\n";
    return 0;
}

int group_demo(const Options& o)
{
    const simleo::ScenarioConfig cfg = load_config(o);
    const auto rows = simleo::run_group_demo(cfg, o.threads);
    std::filesystem::create_directories(o.out);
    const std::filesystem::path out(o.out);
    write_text(out / "group_demo.csv", simleo::group_demo_csv(rows));
    const std::string summary = simleo::group_demo_summary(rows);
    write_text(out / "group_demo_summary.txt", summary);
    std::cout << summary << "wrote " << o.out << "\n";
    return 0;
}

int verify(const Options& o)
{
    const simleo::VerifyReport rep = simleo::verify_outputs(o.out);
    std::cout << (rep.ok ? "OK: " : "MISMATCH: ") << rep.message << "\n";
    return rep.ok ? 0 : 1;
}

int selftest(const Options& o)
{
    bool all = true;
    for (const auto& c : simleo::run_selftest(o.seed.value_or(1))) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SIM-aided LEO downlink simulator"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config, "scenario config file (key = value)")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "master seed, overrides the config");
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--threads", o.threads, "worker threads (0: hardware count)")->capture_default_str();

    auto* sim = app.add_subcommand("simulate", "run a single scenario")->fallthrough();
    auto* sw = app.add_subcommand("sweep", "run the configured sweep axis")->fallthrough();
    auto* gd = app.add_subcommand("group-demo", "grouping and antenna selection only")->fallthrough();
    auto* ve = app.add_subcommand("verify", "re-aggregate results.csv in --out and compare")->fallthrough();
    auto* st = app.add_subcommand("selftest", "run the invariant suite")->fallthrough();

    CLI11_PARSE(app, argc, argv);
    try {
        if (sim->parsed()) return run_experiment_command(o, false);
        if (sw->parsed()) return run_experiment_command(o, true);
        if (gd->parsed()) return group_demo(o);
        if (ve->parsed()) return verify(o);
        if (st->parsed()) return selftest(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

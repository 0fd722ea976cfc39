#include "simleo/harness.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace simleo {

namespace {

std::string num(double v) { return fmt::format("{}", v); }

std::string join_indices(const std::vector<std::size_t>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(v[i]);
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view text, std::size_t line, const char* column)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw std::runtime_error(fmt::format("results.csv line {}: bad {} value '{}'", line, column, text));
    }
    return value;
}

constexpr std::string_view results_header =
    "sweep_value,trial,seed,objective_bound,ergodic_rate_mc,stderr,iterations,wallclock_ms";

} // namespace

std::pair<double, double> mean_ci95(std::span<const double> values)
{
    if (values.empty()) {
        throw std::invalid_argument("mean_ci95: no values");
    }
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    const boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return {mean, t * sd / std::sqrt(n)};
}

std::vector<AggregateRow> aggregate(std::span<const TrialResult> rows)
{
    std::vector<AggregateRow> out;
    std::size_t i = 0;
    while (i < rows.size()) {
        std::size_t j = i;
        std::vector<double> obj, erg;
        double iters = 0.0;
        while (j < rows.size() && rows[j].sweep_value == rows[i].sweep_value) {
            obj.push_back(rows[j].objective_bound);
            erg.push_back(rows[j].ergodic_rate_mc);
            iters += static_cast<double>(rows[j].iterations);
            ++j;
        }
        AggregateRow a;
        a.sweep_value = rows[i].sweep_value;
        a.trials = j - i;
        std::tie(a.objective_mean, a.objective_ci95) = mean_ci95(obj);
        std::tie(a.ergodic_mean, a.ergodic_ci95) = mean_ci95(erg);
        a.iterations_mean = iters / static_cast<double>(a.trials);
        out.push_back(a);
        i = j;
    }
    return out;
}

std::string results_csv(std::span<const TrialResult> rows)
{
    std::string out(results_header);
    out += '\n';
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", num(r.sweep_value), r.trial, r.seed, num(r.objective_bound),
                           num(r.ergodic_rate_mc), num(r.std_error), r.iterations, num(r.wallclock_ms));
    }
    return out;
}

std::string aggregate_csv(std::span<const AggregateRow> rows)
{
    std::string out = "sweep_value,trials,objective_mean,objective_ci95,ergodic_mean,ergodic_ci95,iterations_mean\n";
    for (const auto& a : rows) {
        out += fmt::format("{},{},{},{},{},{},{}\n", num(a.sweep_value), a.trials, num(a.objective_mean),
                           num(a.objective_ci95), num(a.ergodic_mean), num(a.ergodic_ci95), num(a.iterations_mean));
    }
    return out;
}

std::string trace_csv(std::span<const TrialResult> rows)
{
    std::string out = "sweep_value,trial,group,iteration,objective\n";
    for (const auto& r : rows)
        for (std::size_t g = 0; g < r.groups.size(); ++g)
            for (std::size_t it = 0; it < r.groups[g].trace.size(); ++it)
                out += fmt::format("{},{},{},{},{}\n", num(r.sweep_value), r.trial, g, it, num(r.groups[g].trace[it]));
    return out;
}

std::string groups_csv(std::span<const TrialResult> rows)
{
    std::string out = "sweep_value,trial,group,users,antennas,leakage,objective_bound,ergodic_rate_mc,stderr,iterations\n";
    for (const auto& r : rows)
        for (std::size_t g = 0; g < r.groups.size(); ++g) {
            const GroupOutcome& o = r.groups[g];
            out += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", num(r.sweep_value), r.trial, g, join_indices(o.users),
                               join_indices(o.antennas), o.leakage ? num(*o.leakage) : std::string(),
                               num(o.objective), num(o.ergodic.mean), num(o.ergodic.std_error), o.iterations);
        }
    return out;
}

std::string summary_table(const ExperimentResult& result)
{
    const ScenarioConfig& c = result.config;
    std::string out;
    out += fmt::format("beamforming={} grouping={} antenna_selection={} sweep_axis={} trials={} seed={}\n",
                       beamforming_name(c.beamforming), grouping_name(c.grouping), selection_name(c.antenna_selection),
                       sweep_axis_name(c.sweep_axis), c.trials, c.seed);
    out += fmt::format("{:>14} {:>7} {:>22} {:>22} {:>10}\n", "sweep_value", "trials", "bound R [bit/s/Hz]",
                       "ergodic MC [bit/s/Hz]", "iters");
    for (const auto& a : aggregate(result.rows)) {
        out += fmt::format("{:>14} {:>7} {:>12.4f} +- {:<7.4f} {:>12.4f} +- {:<7.4f} {:>10.1f}\n", num(a.sweep_value),
                           a.trials, a.objective_mean, a.objective_ci95, a.ergodic_mean, a.ergodic_ci95,
                           a.iterations_mean);
    }
    std::size_t below = 0;
    for (const auto& r : result.rows)
        if (r.ergodic_rate_mc <= r.objective_bound + 3.0 * r.std_error) ++below;
    out += fmt::format("ergodic <= bound + 3 stderr in {}/{} trials\n", below, result.rows.size());
    return out;
}

void emit_outputs(const ExperimentResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "results.csv", results_csv(result.rows));
    write_file(dir / "aggregate.csv", aggregate_csv(aggregate(result.rows)));
    write_file(dir / "trace.csv", trace_csv(result.rows));
    write_file(dir / "groups.csv", groups_csv(result.rows));
    write_file(dir / "summary.txt", summary_table(result));
    write_file(dir / "config.txt", result.config.to_string());
}

std::vector<TrialResult> parse_results_csv(std::string_view text)
{
    std::vector<TrialResult> rows;
    std::size_t pos = 0, line_no = 0;
    while (pos < text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != results_header) {
                throw std::runtime_error("results.csv: unexpected header");
            }
            continue;
        }
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 8) {
            throw std::runtime_error(fmt::format("results.csv line {}: expected 8 columns, got {}", line_no, f.size()));
        }
        TrialResult r;
        r.sweep_value = parse_field<double>(f[0], line_no, "sweep_value");
        r.trial = parse_field<std::size_t>(f[1], line_no, "trial");
        r.seed = parse_field<std::uint64_t>(f[2], line_no, "seed");
        r.objective_bound = parse_field<double>(f[3], line_no, "objective_bound");
        r.ergodic_rate_mc = parse_field<double>(f[4], line_no, "ergodic_rate_mc");
        r.std_error = parse_field<double>(f[5], line_no, "stderr");
        r.iterations = parse_field<std::size_t>(f[6], line_no, "iterations");
        r.wallclock_ms = parse_field<double>(f[7], line_no, "wallclock_ms");
        rows.push_back(r);
    }
    if (line_no == 0) {
        throw std::runtime_error("results.csv: empty file");
    }
    return rows;
}

VerifyReport verify_outputs(const std::filesystem::path& dir)
{
    VerifyReport rep;
    const std::vector<TrialResult> rows = parse_results_csv(read_file(dir / "results.csv"));
    rep.rows = rows.size();
    if (rows.empty()) {
        rep.message = "results.csv has no data rows";
        return rep;
    }
    const std::string expect = aggregate_csv(aggregate(rows));
    const std::string actual = read_file(dir / "aggregate.csv");
    if (expect != actual) {
        std::size_t line = 1;
        const std::size_t n = std::min(expect.size(), actual.size());
        std::size_t i = 0;
        for (; i < n && expect[i] == actual[i]; ++i)
            if (expect[i] == '\n') ++line;
        rep.message = fmt::format("aggregate.csv differs from the re-aggregated results at line {}", line);
        return rep;
    }
    rep.ok = true;
    rep.message = fmt::format("aggregate.csv matches {} result rows", rows.size());
    return rep;
}

std::string group_demo_csv(std::span<const GroupDemoRow> rows)
{
    std::string out = "trial,seed,greedy_max_coc,random_max_coc,selected_leakage,random_leakage\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{}\n", r.trial, r.seed, num(r.greedy_objective), num(r.random_objective),
                           num(r.selected_leakage), num(r.random_leakage));
    }
    return out;
}

std::string group_demo_summary(std::span<const GroupDemoRow> rows)
{
    std::vector<double> g, r, sl, rl;
    for (const auto& row : rows) {
        g.push_back(row.greedy_objective);
        r.push_back(row.random_objective);
        sl.push_back(row.selected_leakage);
        rl.push_back(row.random_leakage);
    }
    const auto [gm, gc] = mean_ci95(g);
    const auto [rm, rc] = mean_ci95(r);
    const auto [sm, sc] = mean_ci95(sl);
    const auto [lm, lc] = mean_ci95(rl);
    std::string out;
    out += fmt::format("{:<28} {:>14} {:>14}\n", "", "mean", "ci95");
    out += fmt::format("{:<28} {:>14.6g} {:>14.6g}\n", "greedy grouping max CoC", gm, gc);
    out += fmt::format("{:<28} {:>14.6g} {:>14.6g}\n", "random grouping max CoC", rm, rc);
    out += fmt::format("{:<28} {:>14.6g} {:>14.6g}\n", "selected antenna leakage", sm, sc);
    out += fmt::format("{:<28} {:>14.6g} {:>14.6g}\n", "random antenna leakage", lm, lc);
    return out;
}

} // namespace simleo

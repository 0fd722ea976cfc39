#include "simleo/harness.hpp"
#include "simleo/units.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

namespace simleo {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint64_t parse_u64(std::string_view v)
{
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::size_t parse_size(std::string_view v) { return static_cast<std::size_t>(parse_u64(v)); }

double parse_double(std::string_view v)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty() || !std::isfinite(out)) {
        throw std::invalid_argument("expected a finite number, got '" + std::string(v) + "'");
    }
    return out;
}

bool parse_bool(std::string_view v)
{
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw std::invalid_argument("expected true or false, got '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view v)
{
    std::vector<double> out;
    if (trim(v).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = v.find(',', start);
        out.push_back(parse_double(trim(v.substr(start, comma - start))));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string num(double v) { return fmt::format("{}", v); }

std::string join(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += num(v[i]);
    }
    return out;
}

template <typename E>
E parse_enum(std::string_view v, std::initializer_list<std::pair<const char*, E>> options)
{
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (v == name) return value;
        allowed += allowed.empty() ? name : std::string("|") + name;
    }
    throw std::invalid_argument("expected one of " + allowed + ", got '" + std::string(v) + "'");
}

struct FieldSpec {
    const char* name;
    const char* description;
    std::function<void(ScenarioConfig&, std::string_view)> set;
    std::function<std::string(const ScenarioConfig&)> get;
};

const std::vector<FieldSpec>& fields()
{
    using C = ScenarioConfig;
    static const std::vector<FieldSpec> table = {
        {"seed", "master seed of every random stream",
         [](C& c, std::string_view v) { c.seed = parse_u64(v); }, [](const C& c) { return std::to_string(c.seed); }},
        {"trials", "scenario drops per sweep point",
         [](C& c, std::string_view v) { c.trials = parse_size(v); }, [](const C& c) { return std::to_string(c.trials); }},
        {"mc_draws", "fading draws per Monte-Carlo ergodic estimate",
         [](C& c, std::string_view v) { c.mc_draws = parse_size(v); },
         [](const C& c) { return std::to_string(c.mc_draws); }},
        {"power_dbw", "total transmit power P_T in dBW",
         [](C& c, std::string_view v) { c.power_dbw = parse_double(v); }, [](const C& c) { return num(c.power_dbw); }},
        {"atoms_per_layer", "meta-atoms per layer N (near-square grid)",
         [](C& c, std::string_view v) { c.atoms_per_layer = parse_size(v); },
         [](const C& c) { return std::to_string(c.atoms_per_layer); }},
        {"layers", "metasurface layers L",
         [](C& c, std::string_view v) { c.layers = parse_size(v); }, [](const C& c) { return std::to_string(c.layers); }},
        {"antennas", "transmit antennas M",
         [](C& c, std::string_view v) { c.antennas = parse_size(v); },
         [](const C& c) { return std::to_string(c.antennas); }},
        {"users", "users K served when grouping = none",
         [](C& c, std::string_view v) { c.users = parse_size(v); }, [](const C& c) { return std::to_string(c.users); }},
        {"total_users", "users K_tot dropped when grouping is enabled",
         [](C& c, std::string_view v) { c.total_users = parse_size(v); },
         [](const C& c) { return std::to_string(c.total_users); }},
        {"group_size", "users per group K_g",
         [](C& c, std::string_view v) { c.group_size = parse_size(v); },
         [](const C& c) { return std::to_string(c.group_size); }},
        {"total_atoms", "N * L held fixed by the layers_fixed_total sweep",
         [](C& c, std::string_view v) { c.total_atoms = parse_size(v); },
         [](const C& c) { return std::to_string(c.total_atoms); }},
        {"carrier_hz", "carrier frequency in Hz",
         [](C& c, std::string_view v) { c.carrier_hz = parse_double(v); }, [](const C& c) { return num(c.carrier_hz); }},
        {"thickness_wavelengths", "antenna plane to last layer distance, in wavelengths",
         [](C& c, std::string_view v) { c.thickness_wavelengths = parse_double(v); },
         [](const C& c) { return num(c.thickness_wavelengths); }},
        {"tx_gain_dbi", "transmit antenna gain in dBi",
         [](C& c, std::string_view v) { c.link.tx_gain_dbi = parse_double(v); },
         [](const C& c) { return num(c.link.tx_gain_dbi); }},
        {"rx_gain_dbi", "user receive antenna gain in dBi",
         [](C& c, std::string_view v) { c.link.rx_gain_dbi = parse_double(v); },
         [](const C& c) { return num(c.link.rx_gain_dbi); }},
        {"bandwidth_hz", "processing bandwidth in Hz",
         [](C& c, std::string_view v) { c.link.bandwidth_hz = parse_double(v); },
         [](const C& c) { return num(c.link.bandwidth_hz); }},
        {"noise_temp_k", "receiver noise temperature in K",
         [](C& c, std::string_view v) { c.link.noise_temp_k = parse_double(v); },
         [](const C& c) { return num(c.link.noise_temp_k); }},
        {"altitude_m", "satellite altitude in m",
         [](C& c, std::string_view v) { c.link.altitude_m = parse_double(v); },
         [](const C& c) { return num(c.link.altitude_m); }},
        {"disk_diameter_m", "service region diameter along the ground in m",
         [](C& c, std::string_view v) { c.link.disk_diameter_m = parse_double(v); },
         [](const C& c) { return num(c.link.disk_diameter_m); }},
        {"environment", "suburban|urban, selects the Rician table",
         [](C& c, std::string_view v) { c.link.environment = parse_environment(v); },
         [](const C& c) { return std::string(environment_name(c.link.environment)); }},
        {"rician_suburban", "elevation_deg:kappa_db pairs for suburban users",
         [](C& c, std::string_view v) { c.link.suburban = RicianTable::parse(v); },
         [](const C& c) { return c.link.suburban.to_string(); }},
        {"rician_urban", "elevation_deg:kappa_db pairs for urban users",
         [](C& c, std::string_view v) { c.link.urban = RicianTable::parse(v); },
         [](const C& c) { return c.link.urban.to_string(); }},
        {"ao_max_outer", "outer AO iteration cap",
         [](C& c, std::string_view v) { c.ao.max_outer = parse_size(v); },
         [](const C& c) { return std::to_string(c.ao.max_outer); }},
        {"ao_tol", "relative objective change that ends AO",
         [](C& c, std::string_view v) { c.ao.tolerance = parse_double(v); },
         [](const C& c) { return num(c.ao.tolerance); }},
        {"ao_waterfill_sweeps", "water-filling sweeps per outer iteration",
         [](C& c, std::string_view v) { c.ao.waterfill_sweeps = parse_size(v); },
         [](const C& c) { return std::to_string(c.ao.waterfill_sweeps); }},
        {"armijo_mu0", "initial Armijo step",
         [](C& c, std::string_view v) { c.ao.armijo.initial_step = parse_double(v); },
         [](const C& c) { return num(c.ao.armijo.initial_step); }},
        {"armijo_shrink", "Armijo step shrink factor",
         [](C& c, std::string_view v) { c.ao.armijo.shrink = parse_double(v); },
         [](const C& c) { return num(c.ao.armijo.shrink); }},
        {"armijo_c", "Armijo sufficient-increase constant",
         [](C& c, std::string_view v) { c.ao.armijo.sufficient_increase = parse_double(v); },
         [](const C& c) { return num(c.ao.armijo.sufficient_increase); }},
        {"armijo_max_halvings", "Armijo backtracking cap",
         [](C& c, std::string_view v) { c.ao.armijo.max_halvings = parse_size(v); },
         [](const C& c) { return std::to_string(c.ao.armijo.max_halvings); }},
        {"antenna_draws", "random phase draws I for antenna selection",
         [](C& c, std::string_view v) { c.antenna_draws = parse_size(v); },
         [](const C& c) { return std::to_string(c.antenna_draws); }},
        {"grouping", "none|greedy|random",
         [](C& c, std::string_view v) {
             c.grouping = parse_enum<GroupingScheme>(
                 v, {{"none", GroupingScheme::none}, {"greedy", GroupingScheme::greedy}, {"random", GroupingScheme::random}});
         },
         [](const C& c) { return grouping_name(c.grouping); }},
        {"antenna_selection", "leakage|random|first",
         [](C& c, std::string_view v) {
             c.antenna_selection = parse_enum<SelectionScheme>(
                 v, {{"leakage", SelectionScheme::leakage}, {"random", SelectionScheme::random},
                     {"first", SelectionScheme::first}});
         },
         [](const C& c) { return selection_name(c.antenna_selection); }},
        {"beamforming", "optimized|random_phase|zf|mmse",
         [](C& c, std::string_view v) {
             c.beamforming = parse_enum<BeamformingScheme>(
                 v, {{"optimized", BeamformingScheme::optimized}, {"random_phase", BeamformingScheme::random_phase},
                     {"zf", BeamformingScheme::zf}, {"mmse", BeamformingScheme::mmse}});
         },
         [](const C& c) { return beamforming_name(c.beamforming); }},
        {"digital_antennas", "last-layer atoms used by zf/mmse (0: one per user)",
         [](C& c, std::string_view v) { c.digital_antennas = parse_size(v); },
         [](const C& c) { return std::to_string(c.digital_antennas); }},
        {"sweep_axis", "none|layers|atoms_per_layer|power_dbw|total_users|users|layers_fixed_total",
         [](C& c, std::string_view v) {
             c.sweep_axis = parse_enum<SweepAxis>(
                 v, {{"none", SweepAxis::none}, {"layers", SweepAxis::layers},
                     {"atoms_per_layer", SweepAxis::atoms_per_layer}, {"power_dbw", SweepAxis::power_dbw},
                     {"total_users", SweepAxis::total_users}, {"users", SweepAxis::users},
                     {"layers_fixed_total", SweepAxis::layers_fixed_total}});
         },
         [](const C& c) { return sweep_axis_name(c.sweep_axis); }},
        {"sweep_values", "comma-separated values of the sweep axis",
         [](C& c, std::string_view v) { c.sweep_values = parse_list(v); },
         [](const C& c) { return join(c.sweep_values); }},
        {"record_wallclock", "write measured per-trial time (breaks byte-identical reruns)",
         [](C& c, std::string_view v) { c.record_wallclock = parse_bool(v); },
         [](const C& c) { return std::string(c.record_wallclock ? "true" : "false"); }},
    };
    return table;
}

void require(bool ok, const char* field, const std::string& message)
{
    if (!ok) throw ConfigError(field, message);
}

bool is_positive_integer(double v) { return v >= 1.0 && v == std::floor(v) && v < 1e9; }

} // namespace

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& f : fields()) out.push_back({f.name, f.description});
        return out;
    }();
    return keys;
}

std::string sweep_axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::none: return "none";
    case SweepAxis::layers: return "layers";
    case SweepAxis::atoms_per_layer: return "atoms_per_layer";
    case SweepAxis::power_dbw: return "power_dbw";
    case SweepAxis::total_users: return "total_users";
    case SweepAxis::users: return "users";
    case SweepAxis::layers_fixed_total: return "layers_fixed_total";
    }
    throw std::logic_error("unknown sweep axis");
}

std::string grouping_name(GroupingScheme g)
{
    switch (g) {
    case GroupingScheme::none: return "none";
    case GroupingScheme::greedy: return "greedy";
    case GroupingScheme::random: return "random";
    }
    throw std::logic_error("unknown grouping scheme");
}

std::string selection_name(SelectionScheme s)
{
    switch (s) {
    case SelectionScheme::leakage: return "leakage";
    case SelectionScheme::random: return "random";
    case SelectionScheme::first: return "first";
    }
    throw std::logic_error("unknown selection scheme");
}

std::string beamforming_name(BeamformingScheme b)
{
    switch (b) {
    case BeamformingScheme::optimized: return "optimized";
    case BeamformingScheme::random_phase: return "random_phase";
    case BeamformingScheme::zf: return "zf";
    case BeamformingScheme::mmse: return "mmse";
    }
    throw std::logic_error("unknown beamforming scheme");
}

void ScenarioConfig::set(std::string_view key, std::string_view value)
{
    for (const auto& f : fields()) {
        if (key != f.name) continue;
        try {
            f.set(*this, trim(value));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(f.name, e.what());
        }
        return;
    }
    throw ConfigError(std::string(key), "unknown key");
}

ScenarioConfig ScenarioConfig::parse(std::string_view text)
{
    ScenarioConfig cfg;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), fmt::format("line {}: expected 'key = value'", line_no));
        }
        const std::string key(trim(line.substr(0, eq)));
        if (!seen.insert(key).second) {
            throw ConfigError(key, fmt::format("line {}: key given twice", line_no));
        }
        cfg.set(key, line.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

std::string ScenarioConfig::to_string() const
{
    std::string out;
    for (const auto& f : fields()) out += fmt::format("{} = {}\n", f.name, f.get(*this));
    return out;
}

std::size_t ScenarioConfig::scenario_users() const
{
    return grouping == GroupingScheme::none ? users : total_users;
}

std::size_t ScenarioConfig::group_capacity() const
{
    return grouping == GroupingScheme::none ? users : group_size;
}

void ScenarioConfig::validate() const
{
    require(trials >= 1, "trials", "must be >= 1");
    require(mc_draws >= 1, "mc_draws", "must be >= 1");
    require(std::isfinite(power_dbw), "power_dbw", "must be finite");
    require(atoms_per_layer >= 1, "atoms_per_layer", "must be >= 1");
    require(layers >= 1, "layers", "must be >= 1");
    require(antennas >= 1, "antennas", "must be >= 1");
    require(users >= 1, "users", "must be >= 1");
    require(total_users >= 1, "total_users", "must be >= 1");
    require(group_size >= 1, "group_size", "must be >= 1");
    require(carrier_hz > 0.0, "carrier_hz", "must be > 0");
    require(thickness_wavelengths > 0.0, "thickness_wavelengths", "must be > 0");
    require(link.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
    require(link.noise_temp_k > 0.0, "noise_temp_k", "must be > 0");
    require(link.altitude_m > 0.0, "altitude_m", "must be > 0");
    require(link.disk_diameter_m > 0.0, "disk_diameter_m", "must be > 0");
    const double horizon = std::acos(units::earth_radius / (units::earth_radius + link.altitude_m));
    require(0.5 * link.disk_diameter_m / units::earth_radius < horizon, "disk_diameter_m",
            "service region extends beyond the satellite horizon");
    require(ao.max_outer >= 1, "ao_max_outer", "must be >= 1");
    require(ao.tolerance > 0.0, "ao_tol", "must be > 0");
    require(ao.armijo.initial_step > 0.0, "armijo_mu0", "must be > 0");
    require(ao.armijo.shrink > 0.0 && ao.armijo.shrink < 1.0, "armijo_shrink", "must lie in (0, 1)");
    require(ao.armijo.sufficient_increase > 0.0 && ao.armijo.sufficient_increase < 1.0, "armijo_c",
            "must lie in (0, 1)");
    require(antenna_draws >= 1, "antenna_draws", "must be >= 1");

    const std::size_t capacity = group_capacity();
    const bool digital = beamforming == BeamformingScheme::zf || beamforming == BeamformingScheme::mmse;
    const char* capacity_field = grouping == GroupingScheme::none ? "users" : "group_size";
    if (digital) {
        const std::size_t used = digital_antennas == 0 ? capacity : digital_antennas;
        require(used >= capacity, "digital_antennas", "must be 0 or at least the users per group");
        require(used <= atoms_per_layer, digital_antennas == 0 ? capacity_field : "digital_antennas",
                "more digital antennas than atoms per layer");
    } else {
        require(capacity <= antennas, capacity_field, "more users per group than antennas");
    }

    if (sweep_axis == SweepAxis::none) {
        require(sweep_values.empty(), "sweep_values", "given without a sweep_axis");
        return;
    }
    require(!sweep_values.empty(), "sweep_values", "sweep_axis needs at least one value");
    for (std::size_t i = 0; i < sweep_values.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            require(sweep_values[i] != sweep_values[j], "sweep_values", fmt::format("{} listed twice", sweep_values[i]));
    for (double v : sweep_values) {
        if (sweep_axis != SweepAxis::power_dbw) {
            require(is_positive_integer(v), "sweep_values", fmt::format("{} is not a positive integer", v));
        }
        if (sweep_axis == SweepAxis::layers_fixed_total) {
            require(total_atoms % static_cast<std::size_t>(v) == 0, "sweep_values",
                    fmt::format("{} layers do not divide total_atoms = {}", v, total_atoms));
        }
        at(v).validate();
    }
}

std::vector<double> ScenarioConfig::sweep_points() const
{
    if (sweep_axis == SweepAxis::none) return {0.0};
    return sweep_values;
}

ScenarioConfig ScenarioConfig::at(double value) const
{
    ScenarioConfig c = *this;
    const auto n = static_cast<std::size_t>(value);
    switch (sweep_axis) {
    case SweepAxis::none: break;
    case SweepAxis::layers: c.layers = n; break;
    case SweepAxis::atoms_per_layer: c.atoms_per_layer = n; break;
    case SweepAxis::power_dbw: c.power_dbw = value; break;
    case SweepAxis::total_users: c.total_users = n; break;
    case SweepAxis::users: c.users = n; break;
    case SweepAxis::layers_fixed_total:
        c.layers = n;
        c.atoms_per_layer = n == 0 ? 0 : total_atoms / n;
        break;
    }
    c.sweep_axis = SweepAxis::none;
    c.sweep_values.clear();
    return c;
}

std::pair<std::size_t, std::size_t> near_square_factors(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("near_square_factors: n must be >= 1");
    auto a = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
    while (a * a > n) --a;
    while ((a + 1) * (a + 1) <= n) ++a;
    while (n % a != 0) --a;
    return {a, n / a};
}

SimGeometry planar_geometry(double wavelength, std::size_t layers, std::size_t atoms, std::size_t antennas,
                            double thickness_wavelengths)
{
    SimGeometry g;
    g.wavelength = wavelength;
    g.layers = layers;
    std::tie(g.atoms_x, g.atoms_y) = near_square_factors(atoms);
    g.atom_dx = g.atom_dy = 0.5 * wavelength;
    std::tie(g.antennas_x, g.antennas_y) = near_square_factors(antennas);
    g.antenna_spacing = wavelength;
    g.thickness = thickness_wavelengths * wavelength;
    g.validate();
    return g;
}

SimGeometry ScenarioConfig::geometry() const
{
    return planar_geometry(units::wavelength(carrier_hz), layers, atoms_per_layer, antennas, thickness_wavelengths);
}

double ScenarioConfig::total_power_w() const { return units::dbw_to_watts(power_dbw); }

} // namespace simleo

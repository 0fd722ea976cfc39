#include "simleo/channel.hpp"

#include "simleo/units.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace simleo {

Environment parse_environment(std::string_view name)
{
    if (name == "suburban") return Environment::suburban;
    if (name == "urban") return Environment::urban;
    throw std::invalid_argument("unknown environment '" + std::string(name) + "' (expected suburban|urban)");
}

std::string_view environment_name(Environment env)
{
    return env == Environment::suburban ? "suburban" : "urban";
}

RicianTable::RicianTable(std::vector<std::pair<double, double>> points) : points_(std::move(points))
{
    if (points_.empty()) {
        throw std::invalid_argument("Rician table needs at least one point");
    }
    for (const auto& [elev, db] : points_) {
        if (!std::isfinite(elev) || !std::isfinite(db)) {
            throw std::invalid_argument("Rician table entries must be finite");
        }
    }
    std::sort(points_.begin(), points_.end());
    for (std::size_t i = 1; i < points_.size(); ++i) {
        if (points_[i].first == points_[i - 1].first) {
            throw std::invalid_argument("Rician table has duplicate elevation " + std::to_string(points_[i].first));
        }
    }
}

namespace {

double parse_double(std::string_view s)
{
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

RicianTable RicianTable::parse(std::string_view text)
{
    std::vector<std::pair<double, double>> pts;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const std::string_view item = text.substr(0, comma);
        const auto colon = item.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("Rician table entry '" + std::string(item) + "' is not elevation:kappa_db");
        }
        pts.emplace_back(parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return RicianTable(std::move(pts));
}

std::string RicianTable::to_string() const
{
    std::ostringstream os;
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (i) os << ',';
        os << points_[i].first << ':' << points_[i].second;
    }
    return os.str();
}

double RicianTable::kappa_db(double elevation_deg) const
{
    if (points_.empty()) {
        throw std::logic_error("empty Rician table");
    }
    if (elevation_deg <= points_.front().first) return points_.front().second;
    if (elevation_deg >= points_.back().first) return points_.back().second;
    auto hi = std::upper_bound(points_.begin(), points_.end(), elevation_deg,
                               [](double e, const auto& p) { return e < p.first; });
    auto lo = hi - 1;
    const double t = (elevation_deg - lo->first) / (hi->first - lo->first);
    return lo->second + t * (hi->second - lo->second);
}

double RicianTable::kappa_linear(double elevation_deg) const
{
    return units::db_to_linear(kappa_db(elevation_deg));
}

RicianTable default_rician_table(Environment env)
{
    if (env == Environment::suburban) {
        return RicianTable({{10.0, 8.0}, {30.0, 10.0}, {50.0, 12.0}, {70.0, 14.0}, {90.0, 16.0}});
    }
    return RicianTable({{10.0, 2.0}, {30.0, 4.0}, {50.0, 6.0}, {70.0, 8.0}, {90.0, 10.0}});
}

UserPosition user_position(double central_angle, double ground_azimuth, double altitude_m)
{
    const double re = units::earth_radius;
    const double rs = re + altitude_m;
    // Satellite on the +z axis; UT on the sphere at the given central angle.
    const double ux = re * std::sin(central_angle) * std::cos(ground_azimuth);
    const double uy = re * std::sin(central_angle) * std::sin(ground_azimuth);
    const double uz = re * std::cos(central_angle);
    const double dx = ux;
    const double dy = uy;
    const double dz = uz - rs;

    UserPosition p;
    p.central_angle = central_angle;
    p.ground_azimuth = ground_azimuth;
    p.slant_range = std::sqrt(dx * dx + dy * dy + dz * dz);
    const double sin_el = (rs * std::cos(central_angle) - re) / p.slant_range;
    p.elevation = std::asin(std::clamp(sin_el, -1.0, 1.0));
    p.off_nadir = std::acos(std::clamp(-dz / p.slant_range, -1.0, 1.0));
    // Seen from the UT the satellite lies back toward the sub-satellite point.
    p.azimuth = std::fmod(ground_azimuth + std::numbers::pi, units::two_pi);
    return p;
}

CVector ChannelStats::los_vector(std::size_t k) const
{
    const auto r = los.row(k);
    return CVector(r.begin(), r.end());
}

CMatrix ChannelStats::los_columns() const
{
    return transpose(los);
}

CMatrix ChannelStats::los_adjoint_rows() const
{
    CMatrix out = los;
    for (auto& v : out.data()) {
        v = std::conj(v);
    }
    return out;
}

ChannelStats ChannelStats::subset(std::span<const std::size_t> users) const
{
    ChannelStats out;
    out.los = CMatrix(users.size(), atoms());
    for (std::size_t i = 0; i < users.size(); ++i) {
        const std::size_t k = users[i];
        if (k >= this->users()) {
            throw std::out_of_range("ChannelStats::subset: user index out of range");
        }
        out.beta.push_back(beta[k]);
        out.kappa.push_back(kappa[k]);
        out.noise_power.push_back(noise_power[k]);
        const auto src = los.row(k);
        std::copy(src.begin(), src.end(), out.los.row(i).begin());
    }
    return out;
}

void ChannelStats::validate() const
{
    const std::size_t k = users();
    if (kappa.size() != k || noise_power.size() != k || los.rows() != k) {
        throw std::invalid_argument("ChannelStats: per-user arrays disagree in length");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!(beta[i] >= 0.0) || !std::isfinite(beta[i])) {
            throw std::invalid_argument("ChannelStats: beta must be finite and >= 0");
        }
        if (!(kappa[i] >= 0.0)) {
            throw std::invalid_argument("ChannelStats: kappa must be >= 0");
        }
        if (!(noise_power[i] > 0.0)) {
            throw std::invalid_argument("ChannelStats: noise power must be > 0");
        }
    }
}

double path_gain(double wavelength, double slant_range, double tx_gain_linear, double rx_gain_linear)
{
    const double ratio = wavelength / (4.0 * std::numbers::pi * slant_range);
    return tx_gain_linear * rx_gain_linear * ratio * ratio;
}

CVector steering_vector(double elevation, double azimuth, const SimGeometry& geometry)
{
    const double ux = std::cos(elevation) * std::cos(azimuth);
    const double uy = std::cos(elevation) * std::sin(azimuth);
    const double k0 = units::two_pi / geometry.wavelength;
    const std::size_t n_atoms = geometry.atoms_per_layer();
    CVector out(n_atoms);
    for (std::size_t n = 0; n < n_atoms; ++n) {
        const Vec3 p = geometry.atom_position(geometry.layers, n);
        out[n] = std::polar(1.0, k0 * (p[0] * ux + p[1] * uy));
    }
    return out;
}

ChannelStats channel_stats_for(const UserGeometry& users, const SimGeometry& geometry,
                               const LinkParams& link)
{
    const std::size_t k = users.users.size();
    const double g_tx = units::dbi_to_linear(link.tx_gain_dbi);
    const double g_rx = units::dbi_to_linear(link.rx_gain_dbi);
    const double sigma2 = units::noise_power(link.bandwidth_hz, link.noise_temp_k);
    const RicianTable& table = link.rician_table();

    ChannelStats stats;
    stats.los = CMatrix(k, geometry.atoms_per_layer());
    for (std::size_t i = 0; i < k; ++i) {
        const UserPosition& u = users.users[i];
        stats.beta.push_back(path_gain(geometry.wavelength, u.slant_range, g_tx, g_rx));
        stats.kappa.push_back(table.kappa_linear(units::rad_to_deg(u.elevation)));
        stats.noise_power.push_back(sigma2);
        const CVector a = steering_vector(std::numbers::pi / 2.0 - u.off_nadir, u.ground_azimuth, geometry);
        std::copy(a.begin(), a.end(), stats.los.row(i).begin());
    }
    return stats;
}

Scenario sample_scenario(std::uint64_t seed, std::size_t users, const SimGeometry& geometry,
                         const LinkParams& link)
{
    if (users < 1) {
        throw std::invalid_argument("sample_scenario: need at least one user");
    }
    geometry.validate();
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    // Cap of ground radius D/2 measured along the surface: uniform area means
    // cos(central angle) uniform on [cos(max), 1].
    const double max_angle = 0.5 * link.disk_diameter_m / units::earth_radius;
    const double cos_max = std::cos(max_angle);

    Scenario s;
    s.geometry.users.reserve(users);
    for (std::size_t i = 0; i < users; ++i) {
        const double cos_c = 1.0 - unif(rng) * (1.0 - cos_max);
        const double az = units::two_pi * unif(rng);
        s.geometry.users.push_back(user_position(std::acos(cos_c), az, link.altitude_m));
    }
    s.stats = channel_stats_for(s.geometry, geometry, link);
    return s;
}

cplx draw_fading(double kappa, Rng& rng)
{
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const cplx g{normal(rng), normal(rng)};
    if (std::isinf(kappa)) {
        return cplx{1.0, 0.0};
    }
    const double los_w = std::sqrt(kappa / (1.0 + kappa));
    const double nlos_w = std::sqrt(1.0 / (1.0 + kappa));
    return los_w + nlos_w * g;
}

ChannelDraw draw_channels(const ChannelStats& stats, std::uint64_t seed)
{
    stats.validate();
    Rng rng(seed);
    ChannelDraw draw;
    draw.h = CMatrix(stats.users(), stats.atoms());
    for (std::size_t k = 0; k < stats.users(); ++k) {
        const cplx c = std::sqrt(stats.beta[k]) * draw_fading(stats.kappa[k], rng);
        const auto src = stats.los.row(k);
        auto dst = draw.h.row(k);
        for (std::size_t n = 0; n < src.size(); ++n) {
            dst[n] = c * src[n];
        }
    }
    return draw;
}

} // namespace simleo

#pragma once

#include "simleo/matrix.hpp"
#include "simleo/propagation.hpp"
#include "simleo/random.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simleo {

enum class Environment { suburban, urban };

Environment parse_environment(std::string_view name);
std::string_view environment_name(Environment env);

/// Piecewise-linear elevation (degrees) -> Rician factor (dB) map, clamped
/// at both ends. Points are kept sorted by elevation.
class RicianTable {
public:
    RicianTable() = default;
    explicit RicianTable(std::vector<std::pair<double, double>> points);

    /// "elev:kappa_db,elev:kappa_db,..."
    static RicianTable parse(std::string_view text);
    std::string to_string() const;

    double kappa_db(double elevation_deg) const;
    double kappa_linear(double elevation_deg) const;

    const std::vector<std::pair<double, double>>& points() const noexcept { return points_; }

private:
    std::vector<std::pair<double, double>> points_;
};

// Default tables are configuration, not measured data: monotone in elevation
// with suburban above urban everywhere.
RicianTable default_rician_table(Environment env);

struct LinkParams {
    double altitude_m = 1000.0e3;
    double disk_diameter_m = 600.0e3;
    double tx_gain_dbi = 6.0;
    double rx_gain_dbi = 0.0;
    double bandwidth_hz = 50.0e6;
    double noise_temp_k = 290.0;
    Environment environment = Environment::suburban;
    RicianTable suburban = default_rician_table(Environment::suburban);
    RicianTable urban = default_rician_table(Environment::urban);

    const RicianTable& rician_table() const
    {
        return environment == Environment::suburban ? suburban : urban;
    }
};

struct UserPosition {
    double central_angle = 0.0;   // Earth-centre angle between sub-satellite point and UT, rad
    double ground_azimuth = 0.0;  // bearing of UT around the sub-satellite point, rad
    double slant_range = 0.0;     // m
    double elevation = 0.0;       // satellite elevation seen from the UT, rad, in (0, pi/2]
    double azimuth = 0.0;         // satellite azimuth seen from the UT, rad
    double off_nadir = 0.0;       // angle between nadir and the UT direction at the satellite, rad
};

struct UserGeometry {
    std::vector<UserPosition> users;
};

/// Spherical-Earth geometry for a UT at the given central angle.
UserPosition user_position(double central_angle, double ground_azimuth, double altitude_m);

/// Statistical CSI for K users.
struct ChannelStats {
    std::vector<double> beta;         // linear path gain
    std::vector<double> kappa;        // linear Rician factor (may be +inf)
    std::vector<double> noise_power;  // W
    CMatrix los;                      // K x N, row k is h_los of user k

    std::size_t users() const noexcept { return beta.size(); }
    std::size_t atoms() const noexcept { return los.cols(); }

    CVector los_vector(std::size_t k) const;
    /// N x K with column k = h_los,k.
    CMatrix los_columns() const;
    /// K x N with row k = h_los,k^H.
    CMatrix los_adjoint_rows() const;

    /// Stats restricted to the listed users, in the listed order.
    ChannelStats subset(std::span<const std::size_t> users) const;

    void validate() const;
};

/// beta = g_tra * g_rec * (lambda / (4 pi r))^2, gains linear.
double path_gain(double wavelength, double slant_range, double tx_gain_linear, double rx_gain_linear);

/// Last-layer response toward (elevation, azimuth) measured in the SIM frame:
/// elevation pi/2 is boresight. Entry n = exp(j 2pi/lambda * p_n . u).
CVector steering_vector(double elevation, double azimuth, const SimGeometry& geometry);

struct Scenario {
    UserGeometry geometry;
    ChannelStats stats;
};

/// Users uniform by area on the service cap under the satellite.
Scenario sample_scenario(std::uint64_t seed, std::size_t users, const SimGeometry& geometry,
                         const LinkParams& link);

/// Builds statistical CSI for known user positions.
ChannelStats channel_stats_for(const UserGeometry& users, const SimGeometry& geometry,
                               const LinkParams& link);

/// Per-user scalar fading factor c with h_k = sqrt(beta) c h_los and E|c|^2 = 1.
cplx draw_fading(double kappa, Rng& rng);

struct ChannelDraw {
    CMatrix h;  // K x N, row k is the instantaneous h_k
};

ChannelDraw draw_channels(const ChannelStats& stats, std::uint64_t seed);

} // namespace simleo

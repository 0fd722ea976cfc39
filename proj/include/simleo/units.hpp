#pragma once

#include <cmath>
#include <numbers>

// All dB <-> linear conversions go through here.
namespace simleo::units {

inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double earth_radius = 6371.0e3;       // m
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// dBW and dBi are both plain power ratios on a 10*log10 scale.
inline double dbw_to_watts(double dbw) { return db_to_linear(dbw); }
inline double dbi_to_linear(double dbi) { return db_to_linear(dbi); }

inline double wavelength(double carrier_hz) { return speed_of_light / carrier_hz; }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

// Thermal noise power k_B * B * T in watts.
inline double noise_power(double bandwidth_hz, double temperature_k)
{
    return boltzmann * bandwidth_hz * temperature_k;
}

} // namespace simleo::units

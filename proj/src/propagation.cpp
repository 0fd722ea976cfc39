#include "simleo/propagation.hpp"

#include "simleo/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simleo {

std::size_t exact_sqrt(std::size_t n)
{
    auto s = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    return s * s == n ? s : 0;
}

SimGeometry SimGeometry::square(double wavelength, std::size_t layers, std::size_t atoms,
                                std::size_t antennas)
{
    const std::size_t atom_side = exact_sqrt(atoms);
    const std::size_t ant_side = exact_sqrt(antennas);
    if (atom_side == 0) {
        throw std::invalid_argument("atoms_per_layer must be a perfect square, got " + std::to_string(atoms));
    }
    if (ant_side == 0) {
        throw std::invalid_argument("antennas must be a perfect square, got " + std::to_string(antennas));
    }
    SimGeometry g;
    g.wavelength = wavelength;
    g.layers = layers;
    g.atoms_x = atom_side;
    g.atoms_y = atom_side;
    g.atom_dx = wavelength / 2.0;
    g.atom_dy = wavelength / 2.0;
    g.antennas_x = ant_side;
    g.antennas_y = ant_side;
    g.antenna_spacing = wavelength;
    g.thickness = 5.0 * wavelength;
    g.validate();
    return g;
}

void SimGeometry::validate() const
{
    auto fail = [](const std::string& field) {
        throw std::invalid_argument("invalid geometry: " + field);
    };
    if (!(wavelength > 0.0) || !std::isfinite(wavelength)) fail("wavelength must be > 0");
    if (layers < 1) fail("layers must be >= 1");
    if (atoms_x < 1 || atoms_y < 1) fail("atoms per layer must be >= 1");
    if (!(atom_dx > 0.0) || !(atom_dy > 0.0)) fail("atom size must be > 0");
    if (antennas_x < 1 || antennas_y < 1) fail("antennas must be >= 1");
    if (!(antenna_spacing > 0.0)) fail("antenna_spacing must be > 0");
    if (!(thickness > 0.0)) fail("thickness must be > 0");
}

Vec3 SimGeometry::atom_position(std::size_t layer, std::size_t n) const
{
    const std::size_t i = n / atoms_y;
    const std::size_t j = n % atoms_y;
    const double x = (static_cast<double>(i) - (static_cast<double>(atoms_x) - 1.0) / 2.0) * atom_dx;
    const double y = (static_cast<double>(j) - (static_cast<double>(atoms_y) - 1.0) / 2.0) * atom_dy;
    return {x, y, static_cast<double>(layer) * layer_spacing()};
}

Vec3 SimGeometry::antenna_position(std::size_t m) const
{
    const std::size_t i = m / antennas_y;
    const std::size_t j = m % antennas_y;
    const double x = (static_cast<double>(i) - (static_cast<double>(antennas_x) - 1.0) / 2.0) * antenna_spacing;
    const double y = (static_cast<double>(j) - (static_cast<double>(antennas_y) - 1.0) / 2.0) * antenna_spacing;
    return {x, y, 0.0};
}

cplx rs_coefficient(const Vec3& src, const Vec3& dst, const Vec3& normal, const SimGeometry& geometry)
{
    const double dx = dst[0] - src[0];
    const double dy = dst[1] - src[1];
    const double dz = dst[2] - src[2];
    const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
    if (!(d > 0.0)) {
        throw std::domain_error("rs_coefficient: coincident source and destination");
    }
    const double lambda = geometry.wavelength;
    const double cos_a = std::abs(dx * normal[0] + dy * normal[1] + dz * normal[2]) / d;
    const double amplitude = geometry.atom_dx * geometry.atom_dy * cos_a / d;
    const cplx radial{1.0 / (units::two_pi * d), -1.0 / lambda};
    return amplitude * radial * std::polar(1.0, units::two_pi * d / lambda);
}

PropagationModel build_propagation(const SimGeometry& geometry)
{
    geometry.validate();
    const Vec3 normal{0.0, 0.0, 1.0};
    const std::size_t n_atoms = geometry.atoms_per_layer();
    const std::size_t n_ant = geometry.num_antennas();

    PropagationModel model;
    model.inter_layer.reserve(geometry.layers - 1);
    for (std::size_t l = 2; l <= geometry.layers; ++l) {
        CMatrix w(n_atoms, n_atoms);
        for (std::size_t n = 0; n < n_atoms; ++n) {
            const Vec3 dst = geometry.atom_position(l, n);
            for (std::size_t src_n = 0; src_n < n_atoms; ++src_n) {
                w(n, src_n) = rs_coefficient(geometry.atom_position(l - 1, src_n), dst, normal, geometry);
            }
        }
        model.inter_layer.push_back(std::move(w));
    }

    model.antenna_to_first = CMatrix(n_atoms, n_ant);
    for (std::size_t n = 0; n < n_atoms; ++n) {
        const Vec3 dst = geometry.atom_position(1, n);
        for (std::size_t m = 0; m < n_ant; ++m) {
            model.antenna_to_first(n, m) = rs_coefficient(geometry.antenna_position(m), dst, normal, geometry);
        }
    }
    return model;
}

} // namespace simleo

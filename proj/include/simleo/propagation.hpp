#pragma once

#include "simleo/matrix.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace simleo {

using Vec3 = std::array<double, 3>;

/// Physical layout of the transmit antennas and the metasurface stack.
///
/// The antenna plane sits at z = 0 and layer l (1-based) at z = l * spacing,
/// spacing = thickness / layers. Both grids are centred on the z axis and all
/// planes share the +z normal.
struct SimGeometry {
    double wavelength = 0.0;
    std::size_t layers = 1;
    std::size_t atoms_x = 1;
    std::size_t atoms_y = 1;
    double atom_dx = 0.0;
    double atom_dy = 0.0;
    std::size_t antennas_x = 1;
    std::size_t antennas_y = 1;
    double antenna_spacing = 0.0;
    double thickness = 0.0;

    /// Square grids, atom pitch lambda/2, antenna pitch lambda, thickness 5 lambda.
    /// atoms and antennas must be perfect squares.
    static SimGeometry square(double wavelength, std::size_t layers, std::size_t atoms,
                              std::size_t antennas);

    std::size_t atoms_per_layer() const noexcept { return atoms_x * atoms_y; }
    std::size_t num_antennas() const noexcept { return antennas_x * antennas_y; }
    double layer_spacing() const noexcept { return thickness / static_cast<double>(layers); }

    /// Throws std::invalid_argument naming the bad field.
    void validate() const;

    /// Position of atom n on layer l (1-based layer index).
    Vec3 atom_position(std::size_t layer, std::size_t n) const;
    Vec3 antenna_position(std::size_t m) const;
};

// Returns s when s*s == n, otherwise 0.
std::size_t exact_sqrt(std::size_t n);

/// Rayleigh-Sommerfeld transfer coefficient between two points.
///
/// w = (dx dy cos(a) / d) * (1/(2 pi d) - j/lambda) * exp(j 2 pi d / lambda),
/// with d = |dst - src| and cos(a) = |(dst - src) . normal| / d.
/// Throws std::domain_error for coincident points.
cplx rs_coefficient(const Vec3& src, const Vec3& dst, const Vec3& normal, const SimGeometry& geometry);

/// Deterministic EM transfer matrices of a geometry.
struct PropagationModel {
    /// inter_layer[i] is W^{i+2}: layer i+1 -> layer i+2 (N x N); size L-1.
    std::vector<CMatrix> inter_layer;
    /// N x M; column m is the antenna-m -> layer-1 vector.
    CMatrix antenna_to_first;
};

PropagationModel build_propagation(const SimGeometry& geometry);

} // namespace simleo

#pragma once

#include "simleo/matrix.hpp"
#include "simleo/propagation.hpp"
#include "simleo/random.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace simleo {

/// Maps any real phase into (0, 2 pi].
double wrap_phase(double theta);

/// N x L phase shifts; column l holds layer l+1. Entries live in (0, 2 pi].
struct PhaseConfig {
    RMatrix theta;

    PhaseConfig() = default;
    explicit PhaseConfig(RMatrix t);

    static PhaseConfig zeros(std::size_t atoms, std::size_t layers);
    /// Uniform on (0, 2 pi] per entry.
    static PhaseConfig random(std::size_t atoms, std::size_t layers, Rng& rng);

    std::size_t atoms() const noexcept { return theta.rows(); }
    std::size_t layers() const noexcept { return theta.cols(); }
    std::vector<double> layer(std::size_t l) const { return theta.col(l); }

    void wrap();
};

/// Diagonal of Phi = diag(exp(j theta)).
CVector phi_layer(std::span<const double> theta_col);

/// Cascade G = Phi^L W^L ... Phi^2 W^2 Phi^1 together with the split factors
/// such that G = B[l] * Phi^{l+1} * A[l] for every 0-based layer index l.
struct CascadeState {
    CMatrix G;
    std::vector<CMatrix> A;
    std::vector<CMatrix> B;
};

CascadeState compose_cascade(const PhaseConfig& phases, const PropagationModel& prop);

/// Propagates thin field blocks through the stack without forming G.
///
/// For an input block X (N x K) and observation block H (N x K) the forward
/// pass yields A_l X per layer and G X; the backward pass yields B_l^H H.
/// Both cost O(L N^2 K) instead of the O(L N^3) of compose_cascade.
class FieldPropagator {
public:
    /// Keeps a reference to prop; prop must outlive the propagator.
    explicit FieldPropagator(const PropagationModel& prop);

    std::size_t atoms() const noexcept { return prop_->antenna_to_first.rows(); }
    std::size_t layers() const noexcept { return prop_->inter_layer.size() + 1; }
    const PropagationModel& model() const noexcept { return *prop_; }

    /// Returns G X; when per_layer is non-null it receives A_l X for l = 1..L.
    CMatrix forward(const PhaseConfig& phases, const CMatrix& input,
                    std::vector<CMatrix>* per_layer = nullptr) const;

    /// Returns B_l^H H for l = 1..L (index 0 is layer 1).
    std::vector<CMatrix> backward(const PhaseConfig& phases, const CMatrix& observe) const;

private:
    const PropagationModel* prop_;
    std::vector<CMatrix> adjoints_;
};

/// Columns of the antenna -> first-layer matrix selected by antenna index.
CMatrix antenna_columns(const PropagationModel& prop, std::span<const std::size_t> antennas);

} // namespace simleo

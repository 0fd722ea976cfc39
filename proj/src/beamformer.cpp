#include "simleo/beamformer.hpp"

#include "simleo/kernels.hpp"
#include "simleo/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace simleo {

double wrap_phase(double theta)
{
    const double turns = std::ceil(theta / units::two_pi - 1.0);
    double out = theta - units::two_pi * turns;
    // Rounding can leave out a hair outside the interval.
    if (out <= 0.0) {
        out += units::two_pi;
    } else if (out > units::two_pi) {
        out -= units::two_pi;
    }
    return out;
}

PhaseConfig::PhaseConfig(RMatrix t) : theta(std::move(t)) {}

PhaseConfig PhaseConfig::zeros(std::size_t atoms, std::size_t layers)
{
    return PhaseConfig(RMatrix(atoms, layers, 0.0));
}

PhaseConfig PhaseConfig::random(std::size_t atoms, std::size_t layers, Rng& rng)
{
    std::uniform_real_distribution<double> unif(0.0, units::two_pi);
    RMatrix t(atoms, layers);
    for (auto& v : t.data()) {
        // uniform_real_distribution draws from [0, 2pi); reflect into (0, 2pi].
        v = units::two_pi - unif(rng);
    }
    return PhaseConfig(std::move(t));
}

void PhaseConfig::wrap()
{
    for (auto& v : theta.data()) {
        v = wrap_phase(v);
    }
}

CVector phi_layer(std::span<const double> theta_col)
{
    CVector d(theta_col.size());
    for (std::size_t n = 0; n < theta_col.size(); ++n) {
        d[n] = std::polar(1.0, theta_col[n]);
    }
    return d;
}

namespace {

void check_dims(const PhaseConfig& phases, const PropagationModel& prop)
{
    const std::size_t n = prop.antenna_to_first.rows();
    if (phases.atoms() != n) {
        throw std::invalid_argument("phase config has " + std::to_string(phases.atoms()) +
                                    " atoms per layer, propagation model has " + std::to_string(n));
    }
    if (phases.layers() != prop.inter_layer.size() + 1) {
        throw std::invalid_argument("phase config has " + std::to_string(phases.layers()) +
                                    " layers, propagation model has " +
                                    std::to_string(prop.inter_layer.size() + 1));
    }
}

} // namespace

CascadeState compose_cascade(const PhaseConfig& phases, const PropagationModel& prop)
{
    check_dims(phases, prop);
    const std::size_t n = phases.atoms();
    const std::size_t layers = phases.layers();

    std::vector<CVector> phi(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        phi[l] = phi_layer(phases.layer(l));
    }

    CascadeState state;
    state.A.resize(layers);
    state.B.resize(layers);

    state.A[0] = CMatrix::identity(n);
    for (std::size_t l = 1; l < layers; ++l) {
        state.A[l] = matmul(prop.inter_layer[l - 1], scale_rows(state.A[l - 1], phi[l - 1]));
    }
    state.B[layers - 1] = CMatrix::identity(n);
    for (std::size_t l = layers - 1; l-- > 0;) {
        state.B[l] = matmul(state.B[l + 1], scale_rows(prop.inter_layer[l], phi[l + 1]));
    }
    state.G = scale_rows(state.A[layers - 1], phi[layers - 1]);
    return state;
}

FieldPropagator::FieldPropagator(const PropagationModel& prop) : prop_(&prop)
{
    adjoints_.reserve(prop.inter_layer.size());
    for (const auto& w : prop.inter_layer) {
        adjoints_.push_back(adjoint(w));
    }
}

CMatrix FieldPropagator::forward(const PhaseConfig& phases, const CMatrix& input,
                                 std::vector<CMatrix>* per_layer) const
{
    check_dims(phases, *prop_);
    if (input.rows() != atoms()) {
        throw std::invalid_argument("FieldPropagator::forward: input has wrong row count");
    }
    if (per_layer) {
        per_layer->clear();
        per_layer->reserve(layers());
    }
    CMatrix field = input;
    for (std::size_t l = 0; l < layers(); ++l) {
        if (l > 0) {
            field = matmul(prop_->inter_layer[l - 1], field);
        }
        if (per_layer) {
            per_layer->push_back(field);
        }
        const CVector phi = phi_layer(phases.layer(l));
        kernels::scale_rows(field.data(), phi, field.rows(), field.cols());
    }
    return field;
}

std::vector<CMatrix> FieldPropagator::backward(const PhaseConfig& phases, const CMatrix& observe) const
{
    check_dims(phases, *prop_);
    if (observe.rows() != atoms()) {
        throw std::invalid_argument("FieldPropagator::backward: observation has wrong row count");
    }
    const std::size_t layers_n = layers();
    std::vector<CMatrix> out(layers_n);
    out[layers_n - 1] = observe;
    for (std::size_t l = layers_n - 1; l-- > 0;) {
        CVector phi_conj = phi_layer(phases.layer(l + 1));
        for (auto& v : phi_conj) {
            v = std::conj(v);
        }
        out[l] = matmul(adjoints_[l], scale_rows(out[l + 1], phi_conj));
    }
    return out;
}

CMatrix antenna_columns(const PropagationModel& prop, std::span<const std::size_t> antennas)
{
    const CMatrix& w = prop.antenna_to_first;
    CMatrix out(w.rows(), antennas.size());
    for (std::size_t k = 0; k < antennas.size(); ++k) {
        if (antennas[k] >= w.cols()) {
            throw std::out_of_range("antenna index " + std::to_string(antennas[k]) + " out of range");
        }
        for (std::size_t n = 0; n < w.rows(); ++n) {
            out(n, k) = w(n, antennas[k]);
        }
    }
    return out;
}

} // namespace simleo

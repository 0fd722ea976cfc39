#include "simleo/baselines.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace simleo {

namespace {

using EMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

EMatrix to_eigen(const CMatrix& m)
{
    return Eigen::Map<const EMatrix>(m.data().data(), static_cast<Eigen::Index>(m.rows()),
                                     static_cast<Eigen::Index>(m.cols()));
}

CMatrix from_eigen(const EMatrix& e)
{
    CMatrix out(static_cast<std::size_t>(e.rows()), static_cast<std::size_t>(e.cols()));
    Eigen::Map<EMatrix>(out.data().data(), e.rows(), e.cols()) = e;
    return out;
}

void normalise_columns(CMatrix& f)
{
    for (std::size_t c = 0; c < f.cols(); ++c) {
        double n = 0.0;
        for (std::size_t r = 0; r < f.rows(); ++r) n += std::norm(f(r, c));
        n = std::sqrt(n);
        if (!(n > 0.0)) {
            throw std::domain_error("precoder: zero-norm direction");
        }
        for (std::size_t r = 0; r < f.rows(); ++r) f(r, c) /= n;
    }
}

void check_inputs(const CMatrix& h, double total_power, std::span<const double> noise)
{
    if (h.rows() == 0 || h.rows() > h.cols()) {
        throw std::invalid_argument("precoder: need 1 <= K <= antennas");
    }
    if (noise.size() != h.rows()) {
        throw std::invalid_argument("precoder: one noise power per user required");
    }
    if (!(total_power > 0.0)) {
        throw std::invalid_argument("precoder: total power must be > 0");
    }
}

// Directions H^H (H H^H + reg I)^-1 with a rank check on the Gram matrix.
CMatrix regularised_inverse_directions(const CMatrix& h, double reg)
{
    const EMatrix he = to_eigen(h);
    EMatrix gram = he * he.adjoint();
    gram.diagonal().array() += reg;
    Eigen::FullPivLU<EMatrix> lu(gram);
    if (lu.rank() < gram.rows()) {
        throw std::domain_error("precoder: channel matrix is rank deficient");
    }
    return from_eigen(he.adjoint() * lu.inverse());
}

} // namespace

std::vector<std::size_t> centered_atoms(const SimGeometry& geometry, std::size_t count)
{
    const std::size_t n = geometry.atoms_per_layer();
    if (count > n) {
        throw std::invalid_argument("centered_atoms: more antennas than atoms");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<double> radius(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3 p = geometry.atom_position(geometry.layers, i);
        radius[i] = p[0] * p[0] + p[1] * p[1];
    }
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });
    idx.resize(count);
    return idx;
}

CMatrix digital_channel(const ChannelStats& stats, std::span<const std::size_t> atoms)
{
    CMatrix h(stats.users(), atoms.size());
    for (std::size_t k = 0; k < stats.users(); ++k) {
        const double s = std::sqrt(stats.beta[k]);
        for (std::size_t m = 0; m < atoms.size(); ++m) {
            h(k, m) = s * std::conj(stats.los(k, atoms[m]));
        }
    }
    return h;
}

DigitalPrecoder zf_precoder(const CMatrix& h, double total_power, std::span<const double> noise)
{
    check_inputs(h, total_power, noise);
    DigitalPrecoder out;
    out.directions = regularised_inverse_directions(h, 0.0);
    normalise_columns(out.directions);

    // Interference-free gains feed plain water-filling.
    const std::size_t k = h.rows();
    std::vector<double> floors(k);
    for (std::size_t i = 0; i < k; ++i) {
        cplx g{};
        for (std::size_t m = 0; m < h.cols(); ++m) g += h(i, m) * out.directions(m, i);
        floors[i] = noise[i] / std::norm(g);
    }
    out.power = waterfill_levels(floors, total_power);
    return out;
}

DigitalPrecoder mmse_precoder(const CMatrix& h, double total_power, std::span<const double> noise)
{
    check_inputs(h, total_power, noise);
    const double k = static_cast<double>(h.rows());
    const double mean_noise = std::accumulate(noise.begin(), noise.end(), 0.0) / k;
    DigitalPrecoder out;
    out.directions = regularised_inverse_directions(h, k * mean_noise / total_power);
    normalise_columns(out.directions);
    out.power.assign(h.rows(), total_power / k);
    return out;
}

ObjectiveContext digital_context(const CMatrix& h, const DigitalPrecoder& precoder,
                                 std::span<const double> noise)
{
    const CMatrix response = matmul(h, precoder.directions);
    ObjectiveContext ctx;
    ctx.alpha = RMatrix(response.rows(), response.cols());
    for (std::size_t i = 0; i < response.rows(); ++i) {
        for (std::size_t j = 0; j < response.cols(); ++j) {
            ctx.alpha(i, j) = std::norm(response(i, j));
        }
    }
    ctx.noise.assign(noise.begin(), noise.end());
    return ctx;
}

double digital_sum_rate(const CMatrix& h, const DigitalPrecoder& precoder, std::span<const double> noise,
                        double total_power)
{
    PowerAllocation p;
    p.p = precoder.power;
    p.total_power = total_power;
    return objective(digital_context(h, precoder, noise), p);
}

GroupingPlan random_grouping(std::size_t total_users, std::size_t capacity, Rng& rng)
{
    const std::size_t n_groups = group_count_for(total_users, capacity);
    std::vector<std::size_t> users(total_users);
    std::iota(users.begin(), users.end(), 0);
    std::shuffle(users.begin(), users.end(), rng);
    GroupingPlan plan;
    plan.capacity = capacity;
    plan.groups.resize(n_groups);
    for (std::size_t i = 0; i < total_users; ++i) {
        plan.groups[i / capacity].push_back(users[i]);
    }
    return plan;
}

AntennaAssignment random_assignment(std::size_t users, std::size_t num_antennas, Rng& rng)
{
    if (users > num_antennas) {
        throw std::invalid_argument("random_assignment: more users than antennas");
    }
    std::vector<std::size_t> pool(num_antennas);
    std::iota(pool.begin(), pool.end(), 0);
    std::shuffle(pool.begin(), pool.end(), rng);
    AntennaAssignment out;
    out.antennas.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(users));
    return out;
}

RandomControls random_controls(std::uint64_t seed, const ControlShape& shape)
{
    Rng rng(seed);
    RandomControls out;
    out.phases = PhaseConfig::random(shape.atoms, shape.layers, rng);
    out.grouping = random_grouping(shape.total_users, shape.group_capacity, rng);
    out.assignment = random_assignment(out.grouping.groups.front().size(), shape.num_antennas, rng);
    return out;
}

} // namespace simleo

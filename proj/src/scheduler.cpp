#include "simleo/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace simleo {

double coc(std::span<const cplx> x, std::span<const cplx> y)
{
    if (x.size() != y.size()) {
        throw std::invalid_argument("coc: length mismatch");
    }
    const double nx = norm2(x);
    const double ny = norm2(y);
    if (!(nx > 0.0) || !(ny > 0.0)) {
        throw std::domain_error("coc: zero channel vector");
    }
    return std::min(1.0, std::abs(dot_conj(x, y)) / (nx * ny));
}

RMatrix coc_matrix(const ChannelStats& stats)
{
    const std::size_t k = stats.users();
    std::vector<CVector> proxies(k);
    for (std::size_t i = 0; i < k; ++i) {
        proxies[i] = stats.los_vector(i);
        const double s = std::sqrt(stats.beta[i]);
        for (auto& v : proxies[i]) v *= s;
    }
    RMatrix out(k, k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        out(i, i) = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            out(i, j) = out(j, i) = coc(proxies[i], proxies[j]);
        }
    }
    return out;
}

std::size_t group_count_for(std::size_t total_users, std::size_t capacity)
{
    if (capacity == 0) {
        throw std::invalid_argument("group capacity must be >= 1");
    }
    return (total_users + capacity - 1) / capacity;
}

void GroupingPlan::validate(std::size_t total_users) const
{
    std::vector<int> seen(total_users, 0);
    for (const auto& g : groups) {
        if (g.size() > capacity) {
            throw std::invalid_argument("grouping: group exceeds capacity");
        }
        for (std::size_t u : g) {
            if (u >= total_users) {
                throw std::invalid_argument("grouping: user index out of range");
            }
            if (seen[u]++) {
                throw std::invalid_argument("grouping: user " + std::to_string(u) + " in more than one group");
            }
        }
    }
    for (std::size_t u = 0; u < total_users; ++u) {
        if (!seen[u]) {
            throw std::invalid_argument("grouping: user " + std::to_string(u) + " not assigned");
        }
    }
}

double grouping_objective(const GroupingPlan& plan, const RMatrix& coc)
{
    double worst = 0.0;
    for (const auto& g : plan.groups) {
        for (std::size_t a = 0; a < g.size(); ++a) {
            for (std::size_t b = a + 1; b < g.size(); ++b) {
                worst = std::max(worst, coc(g[a], g[b]));
            }
        }
    }
    return worst;
}

GroupingPlan greedy_grouping(const RMatrix& coc, std::size_t capacity)
{
    const std::size_t total = coc.rows();
    if (coc.cols() != total) {
        throw std::invalid_argument("greedy_grouping: CoC matrix must be square");
    }
    if (total == 0) {
        throw std::invalid_argument("greedy_grouping: no users");
    }
    const std::size_t n_groups = group_count_for(total, capacity);

    std::vector<double> mean_coc(total, 0.0);
    if (total > 1) {
        for (std::size_t i = 0; i < total; ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < total; ++j) {
                if (j != i) acc += coc(i, j);
            }
            mean_coc[i] = acc / static_cast<double>(total - 1);
        }
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return mean_coc[a] > mean_coc[b]; });

    GroupingPlan plan;
    plan.capacity = capacity;
    plan.groups.resize(n_groups);
    std::vector<double> group_max(n_groups, 0.0);

    for (std::size_t user : order) {
        std::size_t best_group = n_groups;
        double best_value = std::numeric_limits<double>::infinity();
        for (std::size_t g = 0; g < n_groups; ++g) {
            if (plan.groups[g].size() >= capacity) continue;
            double value = group_max[g];
            for (std::size_t member : plan.groups[g]) {
                value = std::max(value, coc(user, member));
            }
            if (value < best_value) {
                best_value = value;
                best_group = g;
            }
        }
        plan.groups[best_group].push_back(user);
        group_max[best_group] = best_value;
    }
    return plan;
}

GroupingPlan greedy_grouping(const ChannelStats& stats, std::size_t capacity)
{
    return greedy_grouping(coc_matrix(stats), capacity);
}

RMatrix leakage_matrix(const ChannelStats& group_stats, const CMatrix& cascade, const PropagationModel& prop)
{
    const std::size_t k = group_stats.users();
    const std::size_t m = prop.antenna_to_first.cols();
    // received(k', m) = h_los,k'^H G w_m
    const CMatrix received = matmul(group_stats.los_adjoint_rows(), matmul(cascade, prop.antenna_to_first));
    RMatrix power(k, m);
    std::vector<double> column_total(m, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            power(i, j) = group_stats.beta[i] * std::norm(received(i, j));
            column_total[j] += power(i, j);
        }
    }
    RMatrix leak(k, m);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::size_t other = 0; other < k; ++other) {
                if (other != i) acc += power(other, j);
            }
            leak(i, j) = acc;
        }
    }
    return leak;
}

namespace {

// Kuhn-Munkres with potentials over the given rows/columns of cost; rows <= cols.
// Returns the optimal total and fills col_of_row (indices into `cols`).
double solve_assignment(const RMatrix& cost, std::span<const std::size_t> rows,
                        std::span<const std::size_t> cols, std::vector<std::size_t>* col_of_row = nullptr)
{
    const std::size_t n = rows.size();
    const std::size_t m = cols.size();
    if (n == 0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0);
    std::vector<std::size_t> way(m + 1, 0);
    auto a = [&](std::size_t i, std::size_t j) { return cost(rows[i - 1], cols[j - 1]); };

    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> assigned(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j] != 0) assigned[p[j] - 1] = j - 1;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        total += cost(rows[i], cols[assigned[i]]);
    }
    if (col_of_row) *col_of_row = std::move(assigned);
    return total;
}

} // namespace

Assignment hungarian_assign(const RMatrix& cost)
{
    const std::size_t k = cost.rows();
    const std::size_t m = cost.cols();
    if (k > m) {
        throw std::invalid_argument("hungarian_assign: more rows (" + std::to_string(k) +
                                    ") than columns (" + std::to_string(m) + ")");
    }
    for (double c : cost.data()) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("hungarian_assign: non-finite cost");
        }
    }
    Assignment out;
    if (k == 0) return out;

    std::vector<std::size_t> all_rows(k);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::vector<std::size_t> all_cols(m);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const double optimum = solve_assignment(cost, all_rows, all_cols);

    double scale = 0.0;
    for (double c : cost.data()) scale = std::max(scale, std::abs(c));
    const double tol = 1e-12 * scale * static_cast<double>(k);

    // Fix rows in order, each to the smallest column that still admits an optimum.
    std::vector<char> taken(m, 0);
    double prefix = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
        const std::vector<std::size_t> rest_rows(all_rows.begin() + static_cast<std::ptrdiff_t>(r + 1), all_rows.end());
        bool fixed = false;
        for (std::size_t c = 0; c < m && !fixed; ++c) {
            if (taken[c]) continue;
            std::vector<std::size_t> rest_cols;
            for (std::size_t j = 0; j < m; ++j) {
                if (!taken[j] && j != c) rest_cols.push_back(j);
            }
            const double value = prefix + cost(r, c) + solve_assignment(cost, rest_rows, rest_cols);
            if (value <= optimum + tol) {
                out.columns.push_back(c);
                taken[c] = 1;
                prefix += cost(r, c);
                fixed = true;
            }
        }
        if (!fixed) {
            throw std::logic_error("hungarian_assign: lexicographic refinement lost the optimum");
        }
    }
    for (std::size_t r = 0; r < k; ++r) {
        out.cost += cost(r, out.columns[r]);
    }
    return out;
}

void AntennaAssignment::validate(std::size_t num_antennas) const
{
    std::vector<char> used(num_antennas, 0);
    for (std::size_t a : antennas) {
        if (a >= num_antennas) {
            throw std::invalid_argument("antenna assignment: index out of range");
        }
        if (used[a]++) {
            throw std::invalid_argument("antenna assignment: antenna " + std::to_string(a) + " used twice");
        }
    }
}

AntennaSelection select_antennas(const ChannelStats& group_stats, const FieldPropagator& propagator,
                                 std::size_t draws, std::uint64_t seed)
{
    if (draws < 1) {
        throw std::invalid_argument("select_antennas: need at least one draw");
    }
    const std::size_t m = propagator.model().antenna_to_first.cols();
    if (group_stats.users() > m) {
        throw std::invalid_argument("select_antennas: group of " + std::to_string(group_stats.users()) +
                                    " users exceeds " + std::to_string(m) + " antennas");
    }
    const CMatrix observe_adj = group_stats.los_adjoint_rows();
    Rng rng(seed);

    AntennaSelection out;
    out.best.leakage = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < draws; ++i) {
        AntennaDraw draw;
        draw.phases = PhaseConfig::random(propagator.atoms(), propagator.layers(), rng);
        const CMatrix received =
            matmul(observe_adj, propagator.forward(draw.phases, propagator.model().antenna_to_first));
        const std::size_t k = group_stats.users();
        RMatrix leak(k, m, 0.0);
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t a = 0; a < k; ++a) {
                const double pw = group_stats.beta[a] * std::norm(received(a, j));
                for (std::size_t b = 0; b < k; ++b) {
                    if (b != a) leak(b, j) += pw;
                }
            }
        }
        draw.assignment = hungarian_assign(leak);
        if (draw.assignment.cost < out.best.leakage) {
            out.best.antennas = draw.assignment.columns;
            out.best.leakage = draw.assignment.cost;
            out.best.draw = i;
        }
        out.draws.push_back(std::move(draw));
    }
    return out;
}

} // namespace simleo

#include "rankident/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rankident {

namespace {

constexpr double kStepTol = 1e-13;
constexpr double kMultiplierTol = 1e-11;

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

enum class PinKind { none, upper, lower };

}  // namespace

ProjectionResult project_onto_order_polytope(const ProjectionProblem& problem) {
    const int n = static_cast<int>(problem.target.size());
    if (problem.weights.size() != problem.target.size() ||
        problem.lower.size() != problem.target.size() ||
        problem.upper.size() != problem.target.size())
        throw data_error("projection problem vectors must have equal length");
    for (double w : problem.weights)
        if (!(w > 0.0)) throw data_error("projection weights must be positive");
    for (int i = 0; i < n; ++i)
        if (problem.lower[i] > problem.upper[i])
            throw data_error("projection bounds cross at variable " + std::to_string(i));

    ProjectionResult result;
    if (n == 0) return result;

    // Deduplicated order constraints, self-pairs gone.
    std::vector<std::pair<int, int>> order;
    std::vector<int> source_index;
    for (std::size_t c = 0; c < problem.order.size(); ++c) {
        auto [a, b] = problem.order[c];
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw data_error("order constraint references an unknown variable");
        if (a == b) continue;
        if (std::find(order.begin(), order.end(), std::make_pair(a, b)) == order.end()) {
            order.emplace_back(a, b);
            source_index.push_back(static_cast<int>(c));
        }
    }
    const int m = static_cast<int>(order.size());

    // All-equal feasible start.
    double start_lo = -std::numeric_limits<double>::infinity();
    double start_hi = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        start_lo = std::max(start_lo, problem.lower[i]);
        start_hi = std::min(start_hi, problem.upper[i]);
    }
    if (start_lo > start_hi) throw data_error("projection feasible set is empty");
    std::vector<double> x(static_cast<std::size_t>(n), std::clamp(0.25, start_lo, start_hi));

    std::vector<char> in_order_ws(static_cast<std::size_t>(m), 0);
    std::vector<PinKind> pin(static_cast<std::size_t>(n), PinKind::none);

    const int max_iterations = 100 + 12 * (n + m);
    int iter = 0;
    for (;; ++iter) {
        if (iter > max_iterations)
            throw compute_error("projection active-set iteration limit exceeded");

        // Blocks induced by the active order constraints. Every block carries
        // at most one pinned bound; within a block all coordinates are equal.
        Dsu dsu(n);
        for (int c = 0; c < m; ++c)
            if (in_order_ws[c]) dsu.unite(order[c].first, order[c].second);

        std::vector<double> wsum(static_cast<std::size_t>(n), 0.0);
        std::vector<double> wysum(static_cast<std::size_t>(n), 0.0);
        std::vector<double> pin_value(static_cast<std::size_t>(n), 0.0);
        std::vector<char> pinned(static_cast<std::size_t>(n), 0);
        for (int i = 0; i < n; ++i) {
            int r = dsu.find(i);
            wsum[r] += problem.weights[i];
            wysum[r] += problem.weights[i] * problem.target[i];
            if (pin[i] == PinKind::upper) {
                pinned[r] = 1;
                pin_value[r] = problem.upper[i];
            } else if (pin[i] == PinKind::lower) {
                pinned[r] = 1;
                pin_value[r] = problem.lower[i];
            }
        }

        std::vector<double> d(static_cast<std::size_t>(n));
        double dmax = 0.0;
        for (int i = 0; i < n; ++i) {
            int r = dsu.find(i);
            double block_target = pinned[r] ? pin_value[r] : wysum[r] / wsum[r];
            d[i] = block_target - x[i];
            dmax = std::max(dmax, std::abs(d[i]));
        }

        if (dmax < kStepTol) {
            // At the working-set optimum; compute multipliers over each block
            // tree (rooted at the pinned member when present) and drop the
            // most negative constraint, or stop when KKT holds.
            std::vector<std::vector<std::pair<int, int>>> tree(static_cast<std::size_t>(n));
            for (int c = 0; c < m; ++c) {
                if (!in_order_ws[c]) continue;
                tree[order[c].first].emplace_back(order[c].second, c);
                tree[order[c].second].emplace_back(order[c].first, c);
            }
            std::vector<double> residual(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                residual[i] = 2.0 * problem.weights[i] * (x[i] - problem.target[i]);

            double worst = 0.0;
            int worst_order = -1, worst_pin = -1;
            std::vector<char> visited(static_cast<std::size_t>(n), 0);
            std::vector<double> subtree(static_cast<std::size_t>(n), 0.0);
            for (int root = 0; root < n; ++root) {
                if (visited[root]) continue;
                if (pinned[dsu.find(root)] && pin[root] == PinKind::none)
                    continue;  // this block is rooted at its pinned member
                std::vector<std::pair<int, int>> dfs;  // (vertex, edge to parent)
                std::vector<std::pair<int, int>> stack{{root, -1}};
                while (!stack.empty()) {
                    auto [v, pe] = stack.back();
                    stack.pop_back();
                    if (visited[v]) continue;
                    visited[v] = 1;
                    dfs.emplace_back(v, pe);
                    for (auto [w, c] : tree[v])
                        if (!visited[w]) stack.emplace_back(w, c);
                }
                for (const auto& entry : dfs) subtree[entry.first] = residual[entry.first];
                for (auto it = dfs.rbegin(); it != dfs.rend(); ++it) {
                    auto [v, pe] = *it;
                    if (pe < 0) continue;
                    auto [a, b] = order[pe];
                    int parent = (a == v) ? b : a;
                    subtree[parent] += subtree[v];
                    double lambda = (a == v) ? -subtree[v] : subtree[v];
                    if (lambda < worst) {
                        worst = lambda;
                        worst_order = pe;
                        worst_pin = -1;
                    }
                }
                double lambda_pin = 0.0;
                if (pin[root] == PinKind::upper) lambda_pin = -subtree[root];
                if (pin[root] == PinKind::lower) lambda_pin = subtree[root];
                if (pin[root] != PinKind::none && lambda_pin < worst) {
                    worst = lambda_pin;
                    worst_order = -1;
                    worst_pin = root;
                }
            }
            if (worst >= -kMultiplierTol) break;  // KKT satisfied
            if (worst_order >= 0)
                in_order_ws[worst_order] = 0;
            else
                pin[worst_pin] = PinKind::none;
            continue;
        }

        // Largest feasible step toward the working-set optimum.
        double alpha = 1.0;
        int blocking_order = -1, blocking_upper = -1, blocking_lower = -1;
        for (int c = 0; c < m; ++c) {
            if (in_order_ws[c]) continue;
            auto [a, b] = order[c];
            if (dsu.find(a) == dsu.find(b)) continue;
            double velocity = d[a] - d[b];
            if (velocity <= kStepTol) continue;
            double a_c = std::max(x[b] - x[a], 0.0) / velocity;
            if (a_c < alpha) {
                alpha = a_c;
                blocking_order = c;
                blocking_upper = blocking_lower = -1;
            }
        }
        for (int i = 0; i < n; ++i) {
            if (pin[i] != PinKind::none) continue;
            if (d[i] > kStepTol && std::isfinite(problem.upper[i])) {
                double a_c = std::max(problem.upper[i] - x[i], 0.0) / d[i];
                if (a_c < alpha) {
                    alpha = a_c;
                    blocking_order = -1;
                    blocking_upper = i;
                    blocking_lower = -1;
                }
            } else if (d[i] < -kStepTol && std::isfinite(problem.lower[i])) {
                double a_c = std::max(x[i] - problem.lower[i], 0.0) / (-d[i]);
                if (a_c < alpha) {
                    alpha = a_c;
                    blocking_order = -1;
                    blocking_upper = -1;
                    blocking_lower = i;
                }
            }
        }

        for (int i = 0; i < n; ++i) x[i] += alpha * d[i];

        // Snap the blocking constraint tight and record it.
        if (blocking_order >= 0) {
            auto [a, b] = order[blocking_order];
            double v = x[a];
            int ra = dsu.find(a), rb = dsu.find(b);
            for (int i = 0; i < n; ++i) {
                int r = dsu.find(i);
                if (r == ra || r == rb) x[i] = v;
            }
            in_order_ws[blocking_order] = 1;
        } else if (blocking_upper >= 0) {
            int r = dsu.find(blocking_upper);
            double v = problem.upper[blocking_upper];
            for (int i = 0; i < n; ++i)
                if (dsu.find(i) == r) x[i] = v;
            pin[blocking_upper] = PinKind::upper;
        } else if (blocking_lower >= 0) {
            int r = dsu.find(blocking_lower);
            double v = problem.lower[blocking_lower];
            for (int i = 0; i < n; ++i)
                if (dsu.find(i) == r) x[i] = v;
            pin[blocking_lower] = PinKind::lower;
        }
    }

    result.x = std::move(x);
    result.iterations = iter;
    for (int i = 0; i < n; ++i)
        result.objective +=
            problem.weights[i] * (result.x[i] - problem.target[i]) * (result.x[i] - problem.target[i]);
    for (int c = 0; c < m; ++c)
        if (in_order_ws[c]) result.active_order.push_back(source_index[c]);
    for (int i = 0; i < n; ++i) {
        if (pin[i] == PinKind::upper) result.active_upper.push_back(i);
        if (pin[i] == PinKind::lower) result.active_lower.push_back(i);
    }
    return result;
}

}  // namespace rankident

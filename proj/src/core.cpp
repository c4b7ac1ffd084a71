#include "rankident/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rankident {

namespace {

std::int64_t edge_key(int a, int b) {
    return static_cast<std::int64_t>(a) << 32 | static_cast<std::uint32_t>(b);
}

}  // namespace

TournamentGraph::TournamentGraph(int team_count, const std::vector<std::pair<int, int>>& edges)
    : q_(team_count) {
    if (team_count < 1) throw data_error("tournament graph needs at least one team");
    adjacency_.resize(static_cast<std::size_t>(q_) + 1);
    edges_.reserve(edges.size());
    for (auto [l, k] : edges) {
        if (l < 1 || l > q_ || k < 1 || k > q_)
            throw data_error("edge (" + std::to_string(l) + "," + std::to_string(k) +
                             ") references a team outside [1.." + std::to_string(q_) + "]");
        if (l == k) throw data_error("self-loop edge on team " + std::to_string(l));
        Edge e{std::min(l, k), std::max(l, k)};
        if (!index_.emplace(edge_key(e.a, e.b), edges_.size()).second)
            throw data_error("duplicate edge (" + std::to_string(e.a) + "," + std::to_string(e.b) + ")");
        edges_.push_back(e);
        adjacency_[e.a].push_back(e.b);
        adjacency_[e.b].push_back(e.a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

std::optional<std::size_t> TournamentGraph::edge_index(int l, int k) const {
    auto it = index_.find(edge_key(std::min(l, k), std::max(l, k)));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<int>& TournamentGraph::neighbors(int team) const {
    if (team < 1 || team > q_) throw data_error("team id out of range");
    return adjacency_[static_cast<std::size_t>(team)];
}

Ranking::Ranking(std::vector<int> ranks) : r_(std::move(ranks)) {
    if (!is_valid_ranking(r_))
        throw data_error("ranking " + to_string(*this) + " violates the rank consistency law");
}

bool Ranking::has_ties() const {
    std::vector<int> sorted = r_;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

std::string to_string(const Ranking& r) {
    std::ostringstream out;
    out << '(';
    const auto& v = r.ranks();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    out << ')';
    return out.str();
}

OutcomeData make_outcome_data(TournamentGraph graph, std::vector<long long> games,
                              std::vector<long long> wins) {
    if (games.size() != graph.edge_count() || wins.size() != graph.edge_count())
        throw data_error("outcome data must cover every edge of the graph");
    for (std::size_t e = 0; e < games.size(); ++e) {
        if (games[e] < 1) throw data_error("every edge needs at least one game");
        if (wins[e] < 0 || wins[e] > games[e])
            throw data_error("win count outside [0, games] on edge " + std::to_string(e));
    }
    return OutcomeData{std::move(graph), std::move(games), std::move(wins)};
}

ProbabilityAssignment make_probability_assignment(TournamentGraph graph, std::vector<double> p) {
    if (p.size() != graph.edge_count())
        throw data_error("probability assignment must cover every edge of the graph");
    for (double v : p) {
        if (!(v >= 0.0 && v <= 1.0)) throw data_error("edge probability outside [0,1]");
    }
    return ProbabilityAssignment{std::move(graph), std::move(p)};
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

int sign(double x, double tol) {
    if (x > tol) return 1;
    if (x < -tol) return -1;
    return 0;
}

Ranking ranks_from_merits(const MeritVector& merits) {
    const auto& theta = merits.theta;
    for (double v : theta) {
        if (!std::isfinite(v)) throw data_error("merit vector contains a non-finite value");
    }
    std::vector<int> r(theta.size());
    for (std::size_t l = 0; l < theta.size(); ++l) {
        int better = 0;
        for (double v : theta) better += theta[l] > v;
        r[l] = 1 + better;
    }
    return Ranking(std::move(r));
}

bool is_valid_ranking(const std::vector<int>& r) {
    if (r.empty()) return false;
    for (std::size_t l = 0; l < r.size(); ++l) {
        int below = 0;
        for (int v : r) below += v < r[l];
        if (r[l] != 1 + below) return false;
    }
    return true;
}

namespace {

// Ordered set partitions over the bitmask of remaining teams; the teams of
// each successive block share the next lower rank.
void emit_weak_orderings(unsigned remaining, int q, int next_rank, std::vector<int>& r,
                         std::vector<Ranking>& out) {
    if (remaining == 0) {
        out.emplace_back(r);
        return;
    }
    for (unsigned block = remaining; block != 0; block = (block - 1) & remaining) {
        int size = 0;
        for (int t = 0; t < q; ++t)
            if (block & (1u << t)) ++size;
        for (int t = 0; t < q; ++t)
            if (block & (1u << t)) r[t] = next_rank;
        emit_weak_orderings(remaining & ~block, q, next_rank + size, r, out);
    }
}

}  // namespace

std::vector<Ranking> enumerate_rankings(int q, bool allow_ties, const EnumerateOptions& opts) {
    if (q < 1) throw data_error("enumerate_rankings needs q >= 1");
    if (q > opts.max_team_count)
        throw compute_error("enumeration cap exceeded: q = " + std::to_string(q) +
                            " > " + std::to_string(opts.max_team_count));
    std::vector<Ranking> out;
    if (!allow_ties) {
        std::vector<int> perm(q);
        std::iota(perm.begin(), perm.end(), 1);
        do {
            out.emplace_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    } else {
        std::vector<int> r(q);
        emit_weak_orderings((1u << q) - 1u, q, 1, r, out);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool is_connected(const TournamentGraph& g) {
    const int q = g.team_count();
    std::vector<char> seen(static_cast<std::size_t>(q) + 1, 0);
    std::vector<int> stack{1};
    seen[1] = 1;
    int count = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++count;
        for (int w : g.neighbors(v)) {
            if (!seen[w]) {
                seen[w] = 1;
                stack.push_back(w);
            }
        }
    }
    return count == q;
}

bool diameter_at_most_two(const TournamentGraph& g) {
    const int q = g.team_count();
    const std::size_t words = (static_cast<std::size_t>(q) + 64) / 64;
    std::vector<std::uint64_t> adj(static_cast<std::size_t>(q + 1) * words, 0);
    auto set_bit = [&](int v, int w) {
        adj[static_cast<std::size_t>(v) * words + static_cast<std::size_t>(w) / 64] |=
            std::uint64_t{1} << (w % 64);
    };
    for (const Edge& e : g.edges()) {
        set_bit(e.a, e.b);
        set_bit(e.b, e.a);
    }
    for (int u = 1; u <= q; ++u) {
        for (int v = u + 1; v <= q; ++v) {
            if (g.has_edge(u, v)) continue;
            bool common = false;
            for (std::size_t w = 0; w < words && !common; ++w)
                common = (adj[static_cast<std::size_t>(u) * words + w] &
                          adj[static_cast<std::size_t>(v) * words + w]) != 0;
            if (!common) return false;
        }
    }
    return true;
}

double oriented_prob(const ProbabilityAssignment& pa, int l, int k) {
    auto idx = pa.graph.edge_index(l, k);
    if (!idx) throw data_error("no edge between teams " + std::to_string(l) + " and " + std::to_string(k));
    const Edge& e = pa.graph.edges()[*idx];
    return l == e.a ? pa.p[*idx] : 1.0 - pa.p[*idx];
}

}  // namespace rankident

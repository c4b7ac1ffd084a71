#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rankident/errors.hpp"

namespace rankident {

// Unordered pair of interacting teams, stored canonically with a < b.
// Teams are 1-based dense integer ids.
struct Edge {
    int a = 0;
    int b = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected graph of realized pairwise interactions.
class TournamentGraph {
public:
    TournamentGraph() = default;
    TournamentGraph(int team_count, const std::vector<std::pair<int, int>>& edges);

    int team_count() const { return q_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    // Index of the canonical edge containing {l, k}, in either orientation.
    std::optional<std::size_t> edge_index(int l, int k) const;
    bool has_edge(int l, int k) const { return edge_index(l, k).has_value(); }

    const std::vector<int>& neighbors(int team) const;

private:
    int q_ = 0;
    std::vector<Edge> edges_;
    std::unordered_map<std::int64_t, std::size_t> index_;
    std::vector<std::vector<int>> adjacency_;
};

// Latent merits; smaller value means a better team.
struct MeritVector {
    std::vector<double> theta;
};

// Weak-ordering rank vector: r[l] = 1 + #{k : r[k] < r[l]}.
class Ranking {
public:
    Ranking() = default;
    explicit Ranking(std::vector<int> ranks);

    int team_count() const { return static_cast<int>(r_.size()); }
    int rank_of(int team) const { return r_.at(team - 1); }
    const std::vector<int>& ranks() const { return r_; }
    bool has_ties() const;

    friend bool operator==(const Ranking&, const Ranking&) = default;
    friend auto operator<=>(const Ranking& lhs, const Ranking& rhs) { return lhs.r_ <=> rhs.r_; }

private:
    std::vector<int> r_;
};

std::string to_string(const Ranking& r);

// Per-edge game and win counts. wins[e] counts wins of the lower-indexed
// team of the canonical edge; every edge must have at least one game.
struct OutcomeData {
    TournamentGraph graph;
    std::vector<long long> games;
    std::vector<long long> wins;
};

OutcomeData make_outcome_data(TournamentGraph graph, std::vector<long long> games,
                              std::vector<long long> wins);

// Win probability of the lower-indexed team, one value per canonical edge.
// Population assignments live strictly inside (0,1); estimates may touch
// the endpoints.
struct ProbabilityAssignment {
    TournamentGraph graph;
    std::vector<double> p;
};

ProbabilityAssignment make_probability_assignment(TournamentGraph graph, std::vector<double> p);

// sign(x) = I{x >= 0} - I{x <= 0}.
int sign(double x);

// sign with a symmetric dead zone of width tol around zero.
int sign(double x, double tol);

// Rank of team l is 1 plus the number of teams with strictly smaller merit.
Ranking ranks_from_merits(const MeritVector& merits);

bool is_valid_ranking(const std::vector<int>& r);

struct EnumerateOptions {
    int max_team_count = 8;
};

// All permutations (allow_ties = false) or all weak orderings
// (allow_ties = true) of q teams, in ascending lexicographic order.
std::vector<Ranking> enumerate_rankings(int q, bool allow_ties,
                                        const EnumerateOptions& opts = {});

bool is_connected(const TournamentGraph& g);

// True when every pair of distinct teams is adjacent or shares a neighbor.
bool diameter_at_most_two(const TournamentGraph& g);

// P(l beats k): the stored value when l is the lower-indexed endpoint,
// otherwise its complement. Throws data_error for non-edges.
double oriented_prob(const ProbabilityAssignment& pa, int l, int k);

}  // namespace rankident

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rankident/core.hpp"

namespace rankident {

// Ordered pair of interacting teams; the value attached to it is the win
// probability of `team` against `opponent`.
struct DirectedEdge {
    int team = 0;
    int opponent = 0;
    friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
    friend auto operator<=>(const DirectedEdge&, const DirectedEdge&) = default;
};

// Where a directed edge lives in canonical storage: the edge slot plus
// whether the directed value is the stored one or its complement.
struct EdgeSlot {
    std::size_t edge = 0;
    bool flipped = false;
};

// Inequality system describing the null hypothesis that a ranking is
// consistent with the outcome distribution:
//   p[d] <= 1/2                 for every d in boundary,
//   p[first] - p[second] <= 0   for every pair in order.
// One optimization variable per graph edge, oriented from the weakly worse
// team to the weakly better one; edges between tied teams are forced to 1/2.
class ConstraintSystem {
public:
    ConstraintSystem() = default;

    const TournamentGraph& graph() const { return graph_; }
    const Ranking& ranking() const { return ranking_; }

    const std::vector<DirectedEdge>& boundary() const { return boundary_; }
    const std::vector<std::pair<DirectedEdge, DirectedEdge>>& order() const { return order_; }
    EdgeSlot edge_slot(const DirectedEdge& d) const;

    std::size_t var_count() const { return var_team_.size(); }
    // Directed edge represented by a variable (worse team first).
    DirectedEdge var_edge(std::size_t v) const { return {var_team_[v], var_opponent_[v]}; }
    bool var_tied(std::size_t v) const { return var_tied_[v] != 0; }
    const std::vector<std::pair<int, int>>& order_vars() const { return order_vars_; }

    // Re-orients per-canonical-edge values into the variable convention.
    std::vector<double> oriented_values(const std::vector<double>& per_edge) const;
    // Sample means and game counts of an outcome data set, per variable.
    std::vector<double> oriented_estimates(const OutcomeData& data) const;
    std::vector<double> oriented_weights(const OutcomeData& data) const;

    friend ConstraintSystem build_constraint_system(const TournamentGraph&, const Ranking&, bool);

private:
    TournamentGraph graph_;
    Ranking ranking_;
    std::vector<DirectedEdge> boundary_;
    std::vector<std::pair<DirectedEdge, DirectedEdge>> order_;
    std::vector<int> var_team_, var_opponent_;
    std::vector<char> var_tied_;
    std::vector<std::pair<int, int>> order_vars_;
    std::map<std::pair<int, int>, EdgeSlot> slots_;
};

// Builds the boundary and order constraints for testing a ranking.
// Order pairs implied by transitivity are pruned when prune_transitive is
// set; the feasible set is unchanged by pruning.
ConstraintSystem build_constraint_system(const TournamentGraph& g, const Ranking& r,
                                         bool prune_transitive = true);

// All rankings consistent with an outcome law, with per-team projections.
struct IdentifiedSet {
    std::vector<Ranking> rankings;
    std::map<int, std::set<int>> per_team;
};

// Membership of r in the identified set, decided by the sign conditions on
// every directed edge and every ordered pair of directed edges.
// tol widens the zero of the probability sign comparisons; ranks compare
// exactly.
bool check_membership(const ProbabilityAssignment& p, const TournamentGraph& g, const Ranking& r,
                      double tol = 0.0);

// Contraction of tied teams into single nodes. Returns nullopt when the
// assignment itself is inconsistent with the ties (parallel edges between
// two rank classes disagree, or an intra-class edge is not 1/2).
struct ContractedTournament {
    TournamentGraph graph;
    ProbabilityAssignment probs;
    Ranking ranking;           // tie-free ranking of the classes
    std::vector<int> class_of;  // original team -> class id (1-based)
};
std::optional<ContractedTournament> merge_tied_teams(const ProbabilityAssignment& p,
                                                     const TournamentGraph& g, const Ranking& r,
                                                     double tol = 0.0);

// Equivalent membership check through the rank-ordered probability matrix:
// every filled entry must strictly dominate all filled entries weakly
// southwest of it. Tied rankings require merge_ties.
bool check_membership_matrix(const ProbabilityAssignment& p, const TournamentGraph& g,
                             const Ranking& r, bool merge_ties = false, double tol = 0.0);

struct IdentOptions {
    double tol = 0.0;
    EnumerateOptions enumerate;
};

IdentifiedSet identified_set(const ProbabilityAssignment& p, const TournamentGraph& g,
                             bool allow_ties, const IdentOptions& opts = {});

std::set<int> project_rank(const IdentifiedSet& s, int team);

// Strictly increasing map from a merit difference to a win probability,
// with f(-x) = 1 - f(x) and f(0) = 1/2.
struct LinkFunction {
    std::string name;
    std::function<double(double)> forward;
    std::function<double(double)> inverse;
};

LinkFunction btl_link();

// Recovers merits from edge probabilities along a spanning tree under a
// known difference-form link, normalizing theta[norm_team] = norm_value.
// Every non-tree edge must agree with the tree solution within tol.
MeritVector solve_linear_parametric(const ProbabilityAssignment& p, const TournamentGraph& g,
                                    const LinkFunction& link, int norm_team, double norm_value,
                                    double tol = 1e-8);

// Feasibility of the difference-form (semiparametric) membership system:
// a score vector must order teams like r and order probability differences
// consistently. Decided by a linear program maximizing the minimum slack of
// the strict inequalities over scores confined to [0, 1].
bool check_membership_semiparametric(const ProbabilityAssignment& p, const TournamentGraph& g,
                                     const Ranking& r, double margin = 1e-6);

}  // namespace rankident

#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "rankident/core.hpp"

namespace rankident {

// Dense team ids plus the names they came from, in first-appearance order.
struct NamedTeams {
    std::vector<std::string> names;  // index t-1 -> name of team t
    int id_of(const std::string& name) const;
};

struct NamedOutcomeData {
    OutcomeData data;
    NamedTeams teams;
};

struct NamedProbabilityAssignment {
    ProbabilityAssignment probs;
    NamedTeams teams;
};

// CSV with header team_i,team_j,wins_i,wins_j; one row per unordered pair.
NamedOutcomeData read_edges_csv(const std::string& path);
void write_edges_csv(const std::string& path, const OutcomeData& data, const NamedTeams& teams);

// CSV with header team_i,team_j,prob_i_beats_j; one row per unordered pair.
NamedProbabilityAssignment read_probs_csv(const std::string& path);

// Directed flow counts between named entities.
struct TransitionTable {
    std::vector<std::string> names;
    std::map<std::pair<int, int>, long long> counts;  // (from, to), ids 1-based
    long long dropped_self_transitions = 0;
    int id_of(const std::string& name) const;
};

// CSV with header from,to,count; duplicate rows aggregate, self-transitions
// are dropped and counted.
TransitionTable read_transitions_csv(const std::string& path);

// Pairwise-outcome view of a transition table: a move from i to j counts as
// a win for the destination j; pairs with fewer than min_games total moves
// are dropped.
NamedOutcomeData transitions_to_outcomes(const TransitionTable& table, long long min_games);

}  // namespace rankident

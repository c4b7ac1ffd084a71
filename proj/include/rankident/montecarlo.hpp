#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rankident/core.hpp"
#include "rankident/inference.hpp"

namespace rankident {

// Per-edge binomial draws from an outcome law; deterministic given seed.
OutcomeData simulate_tournament(const ProbabilityAssignment& p, const TournamentGraph& g,
                                const std::vector<long long>& games_per_edge, std::uint64_t seed);
OutcomeData simulate_tournament(const ProbabilityAssignment& p, const TournamentGraph& g,
                                long long games_per_edge, std::uint64_t seed);

struct ExperimentConfig {
    ProbabilityAssignment dgp;  // carries the tournament graph
    long long games_per_edge = 1;
    int replications = 1000;
    double alpha = 0.1;
    TestMethod method = TestMethod::finite_sample;
    std::uint64_t seed = 1;
    bool allow_ties = false;
    TestOptions test;
    EnumerateOptions enumerate;
};

// Empirical frequency, over replications, of each rank appearing in the
// per-team projection of the confidence set.
struct RankFrequencyTable {
    int team_count = 0;
    int replications = 0;
    std::vector<std::vector<long long>> counts;     // team x rank
    std::vector<std::vector<double>> frequency;     // counts / replications
    std::vector<std::vector<double>> std_error;     // binomial MC standard errors
    std::vector<std::pair<Ranking, long long>> ranking_accept_counts;
    double mean_set_cardinality = 0.0;
    long long empty_set_count = 0;
};

// Simulate-test-project loop: per replication builds the level-alpha
// confidence set by test inversion and projects it team by team.
// Replications run in parallel; counts are merged in replication order, so
// the table is identical for every thread count.
RankFrequencyTable run_experiment(const ExperimentConfig& cfg);

// Fraction of replications on which the test rejects ranking r when the
// data follow p.
double rejection_rate(const ProbabilityAssignment& p, const TournamentGraph& g,
                      long long games_per_edge, const Ranking& r, double alpha, TestMethod method,
                      int replications, std::uint64_t seed, const TestOptions& opts = {});

}  // namespace rankident

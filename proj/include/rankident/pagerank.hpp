#pragma once

#include "rankident/core.hpp"
#include "rankident/io.hpp"

namespace rankident {

struct PageRankOptions {
    double damping = 0.85;
    double tol = 1e-10;  // L1 change between iterations
    int max_iter = 1000;
};

struct PageRankResult {
    std::vector<double> scores;  // stationary mass per entity, sums to 1
    Ranking ranking;             // higher score = better rank
    int iterations = 0;
};

// Power iteration on the column-stochastic matrix of directed transition
// counts; the destination of a move receives score mass. Dangling entities
// spread their mass uniformly.
PageRankResult pagerank(const TransitionTable& table, const PageRankOptions& opts = {});

}  // namespace rankident

#pragma once

#include <utility>
#include <vector>

#include "rankident/errors.hpp"

namespace rankident {

// Weighted least-squares projection onto
//   { x : lower <= x <= upper,  x[a] <= x[b] for every (a, b) in order }.
struct ProjectionProblem {
    std::vector<double> target;
    std::vector<double> weights;
    std::vector<double> lower;  // may be -infinity
    std::vector<double> upper;  // may be +infinity
    std::vector<std::pair<int, int>> order;
};

struct ProjectionResult {
    std::vector<double> x;
    double objective = 0.0;  // sum_i weights[i] * (x[i] - target[i])^2
    std::vector<int> active_order;  // indices into problem.order held with equality
    std::vector<int> active_upper;  // variables pinned at their upper bound
    std::vector<int> active_lower;  // variables pinned at their lower bound
    int iterations = 0;
};

// Exact primal active-set solver. The equality-constrained subproblems have
// closed form: active order constraints pool variables into blocks that take
// their weighted mean, and a block touching an active bound is pinned there.
// Finite and starting-point independent; the feasible set is assumed
// nonempty with a common all-equal point (true for every caller here).
ProjectionResult project_onto_order_polytope(const ProjectionProblem& problem);

}  // namespace rankident

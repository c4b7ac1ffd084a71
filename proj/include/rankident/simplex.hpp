#pragma once

#include <optional>
#include <vector>

namespace rankident {

// Dense linear program in standard inequality form:
//   maximize c'z  subject to  A z <= b,  z >= 0.
struct LinearProgram {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;
};

struct LpSolution {
    double objective = 0.0;
    std::vector<double> z;
};

// Two-phase primal simplex with Bland's rule. Returns nullopt when the
// program is infeasible; throws compute_error on an unbounded objective.
std::optional<LpSolution> solve_lp(const LinearProgram& lp);

}  // namespace rankident

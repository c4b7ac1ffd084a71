#include "rankident/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rankident/errors.hpp"

namespace rankident {

namespace {

constexpr double kEps = 1e-9;

// Tableau with rows = constraints, columns = structural + slack + artificial
// variables. basis[r] is the variable occupying row r.
struct Tableau {
    std::vector<std::vector<double>> rows;
    std::vector<double> rhs;
    std::vector<int> basis;
    int cols = 0;

    void pivot(int row, int col) {
        double piv = rows[row][col];
        for (double& v : rows[row]) v /= piv;
        rhs[row] /= piv;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == row) continue;
            double factor = rows[r][col];
            if (factor == 0.0) continue;
            for (int j = 0; j < cols; ++j) rows[r][j] -= factor * rows[row][j];
            rhs[r] -= factor * rhs[row];
        }
        basis[row] = col;
    }
};

// Price out the objective against the current basis and run Bland-rule
// pivots until optimal. Returns false when unbounded.
bool optimize(Tableau& t, std::vector<double>& obj, double& value) {
    for (;;) {
        std::vector<double> reduced = obj;
        double shift = 0.0;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            double coeff = reduced[t.basis[r]];
            if (coeff == 0.0) continue;
            for (int j = 0; j < t.cols; ++j) reduced[j] -= coeff * t.rows[r][j];
            shift += coeff * t.rhs[r];
        }
        int entering = -1;
        for (int j = 0; j < t.cols; ++j) {
            if (reduced[j] > kEps) {
                entering = j;
                break;
            }
        }
        if (entering < 0) {
            value = shift;
            return true;
        }
        int leaving = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            if (t.rows[r][entering] > kEps) {
                double ratio = t.rhs[r] / t.rows[r][entering];
                if (ratio < best_ratio - kEps ||
                    (ratio < best_ratio + kEps &&
                     (leaving < 0 || t.basis[r] < t.basis[leaving]))) {
                    best_ratio = ratio;
                    leaving = static_cast<int>(r);
                }
            }
        }
        if (leaving < 0) return false;
        t.pivot(leaving, entering);
    }
}

}  // namespace

std::optional<LpSolution> solve_lp(const LinearProgram& lp) {
    const int m = static_cast<int>(lp.a.size());
    const int n = m > 0 ? static_cast<int>(lp.a[0].size()) : static_cast<int>(lp.c.size());

    // Columns: n structural, m slacks, then artificials for rows with b < 0.
    Tableau t;
    t.cols = n + m;
    t.rows.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(t.cols), 0.0));
    t.rhs.resize(static_cast<std::size_t>(m));
    t.basis.resize(static_cast<std::size_t>(m));
    std::vector<int> artificial_rows;
    for (int r = 0; r < m; ++r) {
        for (int j = 0; j < n; ++j) t.rows[r][j] = lp.a[r][j];
        t.rows[r][n + r] = 1.0;
        t.rhs[r] = lp.b[r];
        t.basis[r] = n + r;
        if (t.rhs[r] < 0.0) {
            for (int j = 0; j < t.cols; ++j) t.rows[r][j] = -t.rows[r][j];
            t.rhs[r] = -t.rhs[r];
            artificial_rows.push_back(r);
        }
    }
    if (!artificial_rows.empty()) {
        int art_base = t.cols;
        t.cols += static_cast<int>(artificial_rows.size());
        for (auto& row : t.rows) row.resize(static_cast<std::size_t>(t.cols), 0.0);
        std::vector<double> phase1(static_cast<std::size_t>(t.cols), 0.0);
        for (std::size_t i = 0; i < artificial_rows.size(); ++i) {
            int r = artificial_rows[i];
            t.rows[r][art_base + static_cast<int>(i)] = 1.0;
            t.basis[r] = art_base + static_cast<int>(i);
            phase1[art_base + static_cast<int>(i)] = -1.0;
        }
        double phase1_value = 0.0;
        if (!optimize(t, phase1, phase1_value))
            throw compute_error("phase-1 simplex unbounded");
        if (phase1_value < -1e-7) return std::nullopt;  // infeasible
        // Drive any lingering artificial out of the basis.
        for (int r = 0; r < m; ++r) {
            if (t.basis[r] >= art_base) {
                int col = -1;
                for (int j = 0; j < art_base; ++j) {
                    if (std::abs(t.rows[r][j]) > kEps) {
                        col = j;
                        break;
                    }
                }
                if (col >= 0) t.pivot(r, col);
            }
        }
        // Freeze artificial columns at zero.
        for (auto& row : t.rows)
            for (std::size_t j = static_cast<std::size_t>(art_base); j < row.size(); ++j) row[j] = 0.0;
    }

    std::vector<double> obj(static_cast<std::size_t>(t.cols), 0.0);
    for (int j = 0; j < n; ++j) obj[j] = lp.c[j];
    double value = 0.0;
    if (!optimize(t, obj, value)) throw compute_error("linear program is unbounded");

    LpSolution sol;
    sol.objective = value;
    sol.z.assign(static_cast<std::size_t>(n), 0.0);
    for (int r = 0; r < m; ++r)
        if (t.basis[r] < n) sol.z[t.basis[r]] = t.rhs[r];
    return sol;
}

}  // namespace rankident

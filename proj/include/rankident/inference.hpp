#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankident/core.hpp"
#include "rankident/ident.hpp"

namespace rankident {

enum class TestMethod { finite_sample, asymptotic };

std::string to_string(TestMethod m);
TestMethod parse_method(const std::string& name);

// Per-edge sample win frequencies; values may touch 0 or 1.
ProbabilityAssignment unrestricted_mle(const OutcomeData& data);

struct ActiveConstraint {
    bool is_boundary = false;
    DirectedEdge lhs;
    DirectedEdge rhs;  // unused for boundary constraints
};

// Constrained estimate: the weighted least-squares projection of the sample
// frequencies onto the null polytope.
struct RestrictedFit {
    std::vector<double> p_star;  // per constraint-system variable
    std::vector<ActiveConstraint> active_constraints;
    double objective = 0.0;  // sum_v weights[v] * (p_hat[v] - p_star[v])^2
};

RestrictedFit restricted_mle(const std::vector<double>& p_hat, const std::vector<double>& weights,
                             const ConstraintSystem& cs);

// Log-likelihood ratio between the unrestricted and restricted fits, natural
// logarithms, with 0*ln(0/x) = 0 and ratios against a zero denominator
// treated as 0.
double test_statistic(const std::vector<double>& p_hat, const RestrictedFit& fit,
                      const std::vector<double>& weights);

struct FsOptions {
    long long tuple_budget = 10'000'000;
    int random_starts = 32;
    int max_iterations = 400;
    double step_tol = 1e-12;
    std::uint64_t seed = 1234567;
    int max_vertex_enum_vars = 12;
    // Region convention: false keeps the strict region {T > t}; true uses
    // {T >= t}, the convention a finite-sample valid decision needs when t
    // is itself an achievable statistic value.
    bool include_threshold = false;
};

struct FsPvalue {
    double p_value = 0.0;
    std::vector<double> argmax;  // least favorable point, per system variable
    bool converged = true;
};

// Exact finite-sample machinery for one constraint system and fixed game
// counts: enumerates every outcome tuple, computes each statistic once, and
// maximizes the rejection-region probability over the null polytope.
class FiniteSampleTester {
public:
    FiniteSampleTester(ConstraintSystem cs, std::vector<long long> games_per_edge,
                       const FsOptions& opts = {});

    const ConstraintSystem& constraints() const { return cs_; }
    std::size_t tuple_count() const { return statistics_.size(); }
    const std::vector<double>& statistics() const { return statistics_; }

    // Flattened tuple index of a per-edge win vector.
    std::size_t tuple_index(const std::vector<long long>& wins_per_edge) const;
    double statistic_of(const std::vector<long long>& wins_per_edge) const;

    // Probability of the rejection region at a fixed null point p (one value
    // per system variable, worse-to-better orientation; tied variables are
    // evaluated at 1/2 regardless).
    double region_probability(double t, bool include_threshold,
                              const std::vector<double>& p) const;

    FsPvalue pvalue(double t, const FsOptions& opts) const;

private:
    ConstraintSystem cs_;
    std::vector<long long> var_games_;
    std::vector<char> var_flipped_;
    std::vector<std::size_t> strides_;
    std::vector<double> statistics_;

    std::vector<std::size_t> region(double t, bool include_threshold) const;
    double region_probability(const std::vector<std::size_t>& region,
                              const std::vector<double>& p, std::vector<double>* grad) const;
};

// Largest probability of {T > t} over the null polytope (Algorithm-1 style
// enumeration plus multi-start projected gradient ascent). The returned
// value is a certified lower bound on the supremum; the converged flag
// reports optimizer health.
FsPvalue pvalue_finite_sample(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                              double t, const ConstraintSystem& cs, const FsOptions& opts = {});

struct AsOptions {
    int replications = 20000;
    std::uint64_t seed = 987654321;
};

// Monte Carlo p-value under the boundary distribution where every edge is a
// fair coin: fraction of simulated statistics strictly above t.
double pvalue_asymptotic(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                         double t, const ConstraintSystem& cs, const AsOptions& opts = {});

// Reference distribution reused across many p-value queries.
class AsymptoticNull {
public:
    AsymptoticNull(const ConstraintSystem& cs, const std::vector<long long>& games_per_edge,
                   const AsOptions& opts);
    double pvalue(double t) const;  // fraction strictly above t
    int replications() const { return static_cast<int>(sorted_.size()); }

private:
    std::vector<double> sorted_;
};

struct TestDiagnostics {
    std::vector<double> p_hat;   // per system variable
    std::vector<double> p_star;  // per system variable
    std::vector<double> fs_argmax;
    bool fs_converged = true;
    int as_replications = 0;
    std::uint64_t as_seed = 0;
};

struct TestOutcome {
    double statistic = 0.0;
    double p_value = 1.0;
    TestMethod method = TestMethod::finite_sample;
    double alpha = 0.0;
    bool reject = false;
    TestDiagnostics diagnostics;
};

struct TestOptions {
    FsOptions fs;
    AsOptions as;
};

// Full test of H0: "ranking r is consistent with the data". The
// finite-sample p-value includes the observed statistic in the rejection
// region, which is what makes the test level-alpha at every sample size.
TestOutcome test_ranking(const OutcomeData& data, const Ranking& r, double alpha,
                         TestMethod method, const TestOptions& opts = {});

struct ConfidenceSetOptions {
    TestOptions test;
    EnumerateOptions enumerate;
};

// All candidate rankings not rejected at level alpha, by test inversion.
IdentifiedSet confidence_set(const OutcomeData& data, double alpha, TestMethod method,
                             bool allow_ties, const ConfidenceSetOptions& opts = {});

// A test prepared once for repeated application to simulated data sets with
// a fixed design (graph, game counts, ranking, level, method). Rejection
// decisions agree with test_ranking; the finite-sample path precomputes the
// critical statistic value instead of re-running the p-value search per
// data set, using that the p-value is nonincreasing in t.
class PreparedTest {
public:
    PreparedTest(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                 const Ranking& r, double alpha, TestMethod method, const TestOptions& opts);

    bool reject(const std::vector<long long>& wins_per_edge) const;
    double alpha() const { return alpha_; }

private:
    ConstraintSystem cs_;
    std::vector<long long> games_;
    double alpha_ = 0.0;
    TestMethod method_ = TestMethod::finite_sample;
    std::optional<FiniteSampleTester> tester_;
    double critical_value_ = 0.0;  // infinity when no achievable t rejects
    std::optional<AsymptoticNull> null_;
};

}  // namespace rankident

#include "rankident/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rankident/projection.hpp"
#include "rankident/rng.hpp"

namespace rankident {

std::string to_string(TestMethod m) {
    return m == TestMethod::finite_sample ? "finite_sample" : "asymptotic";
}

TestMethod parse_method(const std::string& name) {
    if (name == "finite_sample" || name == "fs") return TestMethod::finite_sample;
    if (name == "asymptotic" || name == "as") return TestMethod::asymptotic;
    throw data_error("unknown test method '" + name + "' (expected fs or as)");
}

ProbabilityAssignment unrestricted_mle(const OutcomeData& data) {
    std::vector<double> p(data.graph.edge_count());
    for (std::size_t e = 0; e < p.size(); ++e)
        p[e] = static_cast<double>(data.wins[e]) / static_cast<double>(data.games[e]);
    return ProbabilityAssignment{data.graph, std::move(p)};
}

RestrictedFit restricted_mle(const std::vector<double>& p_hat, const std::vector<double>& weights,
                             const ConstraintSystem& cs) {
    const std::size_t n = cs.var_count();
    if (p_hat.size() != n || weights.size() != n)
        throw data_error("estimate/weight vectors do not match the constraint system");

    // Tied edges are pinned at 1/2 by the two-sided boundary constraints;
    // the free coordinates are projected onto the order-and-cap polytope.
    std::vector<int> free_index(n, -1);
    ProjectionProblem prob;
    for (std::size_t v = 0; v < n; ++v) {
        if (cs.var_tied(v)) continue;
        free_index[v] = static_cast<int>(prob.target.size());
        prob.target.push_back(p_hat[v]);
        prob.weights.push_back(weights[v]);
        prob.lower.push_back(-std::numeric_limits<double>::infinity());
        prob.upper.push_back(0.5);
    }
    for (auto [a, b] : cs.order_vars())
        prob.order.emplace_back(free_index[static_cast<std::size_t>(a)],
                                free_index[static_cast<std::size_t>(b)]);
    ProjectionResult proj = project_onto_order_polytope(prob);

    RestrictedFit fit;
    fit.p_star.resize(n);
    for (std::size_t v = 0; v < n; ++v)
        fit.p_star[v] = cs.var_tied(v) ? 0.5 : proj.x[static_cast<std::size_t>(free_index[v])];
    for (std::size_t v = 0; v < n; ++v)
        fit.objective += weights[v] * (p_hat[v] - fit.p_star[v]) * (p_hat[v] - fit.p_star[v]);

    // Binding constraints, read off the solution itself.
    constexpr double kBindTol = 1e-9;
    for (std::size_t v = 0; v < n; ++v)
        if (fit.p_star[v] >= 0.5 - kBindTol)
            fit.active_constraints.push_back({true, cs.var_edge(v), {}});
    for (std::size_t c = 0; c < cs.order_vars().size(); ++c) {
        auto [a, b] = cs.order_vars()[c];
        if (std::abs(fit.p_star[static_cast<std::size_t>(a)] -
                     fit.p_star[static_cast<std::size_t>(b)]) <= kBindTol)
            fit.active_constraints.push_back(
                {false, cs.order()[c].first, cs.order()[c].second});
    }
    return fit;
}

namespace {

// One Bernoulli KL contribution with the ln(0) = 0 and x/0 = 0 conventions.
double kl_term(double p_hat, double p_star) {
    double out = 0.0;
    if (p_hat > 0.0 && p_star > 0.0) out += p_hat * std::log(p_hat / p_star);
    if (p_hat < 1.0 && p_star < 1.0) out += (1.0 - p_hat) * std::log((1.0 - p_hat) / (1.0 - p_star));
    return out;
}

}  // namespace

double test_statistic(const std::vector<double>& p_hat, const RestrictedFit& fit,
                      const std::vector<double>& weights) {
    if (p_hat.size() != fit.p_star.size() || weights.size() != fit.p_star.size())
        throw data_error("estimate/weight vectors do not match the fit");
    double t = 0.0;
    for (std::size_t v = 0; v < p_hat.size(); ++v)
        t += weights[v] * kl_term(p_hat[v], fit.p_star[v]);
    return std::max(2.0 * t, 0.0);
}

FiniteSampleTester::FiniteSampleTester(ConstraintSystem cs, std::vector<long long> games_per_edge,
                                       const FsOptions& opts)
    : cs_(std::move(cs)) {
    if (games_per_edge.size() != cs_.graph().edge_count())
        throw data_error("game counts do not match the graph");
    const std::size_t n = cs_.var_count();
    var_games_.resize(n);
    var_flipped_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        auto slot = cs_.edge_slot(cs_.var_edge(v));
        var_games_[v] = games_per_edge[slot.edge];
        var_flipped_[v] = slot.flipped;
        if (var_games_[v] < 1) throw data_error("every edge needs at least one game");
    }

    long long tuples = 1;
    strides_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
        strides_[v] = static_cast<std::size_t>(tuples);
        if (tuples > opts.tuple_budget / (var_games_[v] + 1))
            throw compute_error("outcome enumeration budget of " +
                                std::to_string(opts.tuple_budget) + " tuples exceeded");
        tuples *= var_games_[v] + 1;
    }

    statistics_.resize(static_cast<std::size_t>(tuples));
    std::vector<double> p_hat(n), weights(n);
    for (std::size_t v = 0; v < n; ++v) weights[v] = static_cast<double>(var_games_[v]);
    std::vector<long long> idx(n, 0);
    for (std::size_t flat = 0; flat < statistics_.size(); ++flat) {
        for (std::size_t v = 0; v < n; ++v)
            p_hat[v] = static_cast<double>(idx[v]) / static_cast<double>(var_games_[v]);
        statistics_[flat] = test_statistic(p_hat, restricted_mle(p_hat, weights, cs_), weights);
        for (std::size_t v = 0; v < n; ++v) {
            if (++idx[v] <= var_games_[v]) break;
            idx[v] = 0;
        }
    }
}

std::size_t FiniteSampleTester::tuple_index(const std::vector<long long>& wins_per_edge) const {
    if (wins_per_edge.size() != cs_.graph().edge_count())
        throw data_error("win vector does not match the graph");
    std::size_t flat = 0;
    for (std::size_t v = 0; v < cs_.var_count(); ++v) {
        auto slot = cs_.edge_slot(cs_.var_edge(v));
        long long w = wins_per_edge[slot.edge];
        if (w < 0 || w > var_games_[v]) throw data_error("win count out of range");
        long long oriented = var_flipped_[v] ? var_games_[v] - w : w;
        flat += strides_[v] * static_cast<std::size_t>(oriented);
    }
    return flat;
}

double FiniteSampleTester::statistic_of(const std::vector<long long>& wins_per_edge) const {
    return statistics_[tuple_index(wins_per_edge)];
}

std::vector<std::size_t> FiniteSampleTester::region(double t, bool include_threshold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < statistics_.size(); ++i) {
        if (include_threshold ? statistics_[i] >= t : statistics_[i] > t) out.push_back(i);
    }
    return out;
}

double FiniteSampleTester::region_probability(const std::vector<std::size_t>& region,
                                              const std::vector<double>& p,
                                              std::vector<double>* grad) const {
    const std::size_t n = cs_.var_count();
    // Per-variable binomial pmf tables and their derivatives in p.
    std::vector<std::vector<double>> pmf(n), dpmf(n);
    for (std::size_t v = 0; v < n; ++v) {
        const long long games = var_games_[v];
        const double pv = cs_.var_tied(v) ? 0.5 : p[v];
        pmf[v].resize(static_cast<std::size_t>(games) + 1);
        if (grad) dpmf[v].assign(static_cast<std::size_t>(games) + 1, 0.0);
        // binom(games, i) p^i (1-p)^(games-i), built by recurrence.
        std::vector<double> binom(static_cast<std::size_t>(games) + 1, 1.0);
        for (long long i = 1; i <= games; ++i)
            binom[static_cast<std::size_t>(i)] =
                binom[static_cast<std::size_t>(i - 1)] * static_cast<double>(games - i + 1) /
                static_cast<double>(i);
        std::vector<double> pow_p(static_cast<std::size_t>(games) + 1, 1.0);
        std::vector<double> pow_q(static_cast<std::size_t>(games) + 1, 1.0);
        for (long long i = 1; i <= games; ++i) {
            pow_p[static_cast<std::size_t>(i)] = pow_p[static_cast<std::size_t>(i - 1)] * pv;
            pow_q[static_cast<std::size_t>(i)] = pow_q[static_cast<std::size_t>(i - 1)] * (1.0 - pv);
        }
        for (long long i = 0; i <= games; ++i) {
            auto iu = static_cast<std::size_t>(i);
            auto qu = static_cast<std::size_t>(games - i);
            pmf[v][iu] = binom[iu] * pow_p[iu] * pow_q[qu];
            if (grad && !cs_.var_tied(v)) {
                double d = 0.0;
                if (i > 0) d += static_cast<double>(i) * pow_p[iu - 1] * pow_q[qu];
                if (i < games) d -= static_cast<double>(games - i) * pow_p[iu] * pow_q[qu - 1];
                dpmf[v][iu] = binom[iu] * d;
            }
        }
    }

    if (grad) grad->assign(n, 0.0);
    double total = 0.0;
    std::vector<long long> idx(n);
    std::vector<double> prefix(n + 1), suffix(n + 1);
    for (std::size_t flat : region) {
        std::size_t rest = flat;
        for (std::size_t v = n; v-- > 0;) {
            idx[v] = static_cast<long long>(rest / strides_[v]);
            rest %= strides_[v];
        }
        if (!grad) {
            double prod = 1.0;
            for (std::size_t v = 0; v < n; ++v) prod *= pmf[v][static_cast<std::size_t>(idx[v])];
            total += prod;
        } else {
            prefix[0] = 1.0;
            for (std::size_t v = 0; v < n; ++v)
                prefix[v + 1] = prefix[v] * pmf[v][static_cast<std::size_t>(idx[v])];
            suffix[n] = 1.0;
            for (std::size_t v = n; v-- > 0;)
                suffix[v] = suffix[v + 1] * pmf[v][static_cast<std::size_t>(idx[v])];
            total += prefix[n];
            for (std::size_t v = 0; v < n; ++v)
                (*grad)[v] += prefix[v] * dpmf[v][static_cast<std::size_t>(idx[v])] * suffix[v + 1];
        }
    }
    return total;
}

double FiniteSampleTester::region_probability(double t, bool include_threshold,
                                              const std::vector<double>& p) const {
    return region_probability(region(t, include_threshold), p, nullptr);
}

FsPvalue FiniteSampleTester::pvalue(double t, const FsOptions& opts) const {
    const std::size_t n = cs_.var_count();
    const std::vector<std::size_t> rejection = region(t, opts.include_threshold);

    FsPvalue best;
    best.argmax.assign(n, 0.25);
    if (rejection.empty()) {
        best.p_value = 0.0;
        return best;
    }
    if (rejection.size() == statistics_.size()) {
        best.p_value = 1.0;  // probabilities over all tuples sum to one
        return best;
    }

    // Projection onto the null polytope, free coordinates only.
    std::vector<int> free_index(n, -1);
    int free_count = 0;
    for (std::size_t v = 0; v < n; ++v)
        if (!cs_.var_tied(v)) free_index[v] = free_count++;
    ProjectionProblem proj;
    proj.target.assign(static_cast<std::size_t>(free_count), 0.0);
    proj.weights.assign(static_cast<std::size_t>(free_count), 1.0);
    proj.lower.assign(static_cast<std::size_t>(free_count), 0.0);
    proj.upper.assign(static_cast<std::size_t>(free_count), 0.5);
    for (auto [a, b] : cs_.order_vars())
        proj.order.emplace_back(free_index[static_cast<std::size_t>(a)],
                                free_index[static_cast<std::size_t>(b)]);
    auto project = [&](const std::vector<double>& x) {
        ProjectionProblem p2 = proj;
        p2.target = x;
        return project_onto_order_polytope(p2).x;
    };

    // Start set: polytope vertices (scaled indicators of up-closed sets),
    // the all-1/2 and all-1/4 points, and random feasible draws.
    std::vector<std::vector<double>> starts;
    starts.emplace_back(static_cast<std::size_t>(free_count), 0.5);
    starts.emplace_back(static_cast<std::size_t>(free_count), 0.25);
    if (free_count <= opts.max_vertex_enum_vars) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_count); ++mask) {
            bool closed = true;
            for (auto [a, b] : proj.order) {
                bool in_a = (mask >> a) & 1, in_b = (mask >> b) & 1;
                if (in_a && !in_b) {
                    closed = false;
                    break;
                }
            }
            if (!closed) continue;
            std::vector<double> vertex(static_cast<std::size_t>(free_count), 0.0);
            for (int v = 0; v < free_count; ++v)
                if ((mask >> v) & 1) vertex[static_cast<std::size_t>(v)] = 0.5;
            starts.push_back(std::move(vertex));
        }
    }
    auto rng = make_stream(opts.seed, 0x5eed);
    for (int s = 0; s < opts.random_starts; ++s) {
        std::vector<double> x(static_cast<std::size_t>(free_count));
        for (double& xi : x) xi = 0.5 * uniform01(rng);
        starts.push_back(project(x));
    }

    auto expand = [&](const std::vector<double>& free_p) {
        std::vector<double> full(n, 0.5);
        for (std::size_t v = 0; v < n; ++v)
            if (free_index[v] >= 0) full[v] = free_p[static_cast<std::size_t>(free_index[v])];
        return full;
    };

    best.p_value = -1.0;
    for (const auto& start : starts) {
        std::vector<double> x = start;
        std::vector<double> full = expand(x);
        std::vector<double> grad_full;
        double fx = region_probability(rejection, full, &grad_full);
        bool converged = false;
        for (int it = 0; it < opts.max_iterations; ++it) {
            std::vector<double> grad(static_cast<std::size_t>(free_count));
            for (std::size_t v = 0; v < n; ++v)
                if (free_index[v] >= 0)
                    grad[static_cast<std::size_t>(free_index[v])] = grad_full[v];
            double step = 0.25;
            double moved = 0.0;
            std::vector<double> x_next;
            double f_next = fx;
            for (int half = 0; half < 40; ++half, step *= 0.5) {
                std::vector<double> cand(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) cand[i] = x[i] + step * grad[i];
                cand = project(cand);
                std::vector<double> cand_full = expand(cand);
                std::vector<double> cand_grad;
                double f_cand = region_probability(rejection, cand_full, &cand_grad);
                if (f_cand > fx) {
                    moved = 0.0;
                    for (std::size_t i = 0; i < x.size(); ++i)
                        moved = std::max(moved, std::abs(cand[i] - x[i]));
                    x_next = std::move(cand);
                    f_next = f_cand;
                    full = std::move(cand_full);
                    grad_full = std::move(cand_grad);
                    break;
                }
            }
            if (x_next.empty()) {
                converged = true;  // no ascent direction survives the line search
                break;
            }
            x = std::move(x_next);
            fx = f_next;
            if (moved < opts.step_tol) {
                converged = true;
                break;
            }
        }
        if (fx > best.p_value) {
            best.p_value = fx;
            best.argmax = expand(x);
            best.converged = converged;
        }
    }
    best.p_value = std::min(best.p_value, 1.0);
    return best;
}

FsPvalue pvalue_finite_sample(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                              double t, const ConstraintSystem& cs, const FsOptions& opts) {
    (void)g;
    FiniteSampleTester tester(cs, games_per_edge, opts);
    return tester.pvalue(t, opts);
}

AsymptoticNull::AsymptoticNull(const ConstraintSystem& cs, const std::vector<long long>& games_per_edge,
                               const AsOptions& opts) {
    if (opts.replications < 1) throw data_error("asymptotic p-value needs at least one replication");
    if (games_per_edge.size() != cs.graph().edge_count())
        throw data_error("game counts do not match the graph");
    const std::size_t n = cs.var_count();
    std::vector<double> weights(n);
    std::vector<long long> games(n);
    for (std::size_t v = 0; v < n; ++v) {
        games[v] = games_per_edge[cs.edge_slot(cs.var_edge(v)).edge];
        weights[v] = static_cast<double>(games[v]);
    }
    sorted_.resize(static_cast<std::size_t>(opts.replications));
    std::vector<double> p_hat(n);
    for (int i = 0; i < opts.replications; ++i) {
        auto rng = make_stream(opts.seed, static_cast<std::uint64_t>(i));
        for (std::size_t v = 0; v < n; ++v)
            p_hat[v] = static_cast<double>(draw_binomial(rng, games[v], 0.5)) /
                       static_cast<double>(games[v]);
        sorted_[static_cast<std::size_t>(i)] =
            test_statistic(p_hat, restricted_mle(p_hat, weights, cs), weights);
    }
    std::sort(sorted_.begin(), sorted_.end());
}

double AsymptoticNull::pvalue(double t) const {
    auto above = sorted_.end() - std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(above) / static_cast<double>(sorted_.size());
}

double pvalue_asymptotic(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                         double t, const ConstraintSystem& cs, const AsOptions& opts) {
    (void)g;
    return AsymptoticNull(cs, games_per_edge, opts).pvalue(t);
}

TestOutcome test_ranking(const OutcomeData& data, const Ranking& r, double alpha, TestMethod method,
                         const TestOptions& opts) {
    ConstraintSystem cs = build_constraint_system(data.graph, r);
    const std::vector<double> p_hat = cs.oriented_estimates(data);
    const std::vector<double> weights = cs.oriented_weights(data);
    RestrictedFit fit = restricted_mle(p_hat, weights, cs);

    TestOutcome out;
    out.method = method;
    out.alpha = alpha;
    out.statistic = test_statistic(p_hat, fit, weights);
    out.diagnostics.p_hat = p_hat;
    out.diagnostics.p_star = fit.p_star;

    if (method == TestMethod::finite_sample) {
        FsOptions fs = opts.fs;
        fs.include_threshold = true;  // observed t is an achievable atom
        FsPvalue pv = pvalue_finite_sample(data.graph, data.games, out.statistic, cs, fs);
        out.p_value = pv.p_value;
        out.diagnostics.fs_argmax = pv.argmax;
        out.diagnostics.fs_converged = pv.converged;
    } else {
        out.p_value = pvalue_asymptotic(data.graph, data.games, out.statistic, cs, opts.as);
        out.diagnostics.as_replications = opts.as.replications;
        out.diagnostics.as_seed = opts.as.seed;
    }
    out.reject = out.p_value <= alpha;
    return out;
}

IdentifiedSet confidence_set(const OutcomeData& data, double alpha, TestMethod method,
                             bool allow_ties, const ConfidenceSetOptions& opts) {
    IdentifiedSet out;
    const int q = data.graph.team_count();
    for (const Ranking& r : enumerate_rankings(q, allow_ties, opts.enumerate)) {
        TestOutcome res = test_ranking(data, r, alpha, method, opts.test);
        if (!res.reject) out.rankings.push_back(r);
    }
    for (int t = 1; t <= q; ++t) out.per_team.emplace(t, std::set<int>{});
    for (const Ranking& r : out.rankings)
        for (int t = 1; t <= q; ++t) out.per_team[t].insert(r.rank_of(t));
    return out;
}

PreparedTest::PreparedTest(const TournamentGraph& g, const std::vector<long long>& games_per_edge,
                           const Ranking& r, double alpha, TestMethod method,
                           const TestOptions& opts)
    : games_(games_per_edge), alpha_(alpha), method_(method) {
    cs_ = build_constraint_system(g, r);
    if (method_ == TestMethod::finite_sample) {
        FsOptions fs = opts.fs;
        fs.include_threshold = true;
        tester_.emplace(cs_, games_, fs);

        // The p-value is nonincreasing in t, so the rejection rule
        // "p(t) <= alpha" is "t >= t*"; find the smallest achievable t* by
        // bisection over the sorted distinct statistic values.
        std::vector<double> values = tester_->statistics();
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        auto rejects_at = [&](double t) { return tester_->pvalue(t, fs).p_value <= alpha_; };
        critical_value_ = std::numeric_limits<double>::infinity();
        if (!values.empty() && rejects_at(values.back())) {
            std::size_t lo = 0, hi = values.size() - 1;
            if (rejects_at(values.front())) {
                critical_value_ = values.front();
            } else {
                while (lo + 1 < hi) {
                    std::size_t mid = (lo + hi) / 2;
                    if (rejects_at(values[mid]))
                        hi = mid;
                    else
                        lo = mid;
                }
                critical_value_ = values[hi];
            }
        }
    } else {
        AsOptions as = opts.as;
        null_.emplace(cs_, games_, as);
    }
}

bool PreparedTest::reject(const std::vector<long long>& wins_per_edge) const {
    if (method_ == TestMethod::finite_sample)
        return tester_->statistic_of(wins_per_edge) >= critical_value_;
    std::vector<double> p_hat(cs_.var_count()), weights(cs_.var_count());
    for (std::size_t v = 0; v < cs_.var_count(); ++v) {
        auto slot = cs_.edge_slot(cs_.var_edge(v));
        long long games = games_[slot.edge];
        long long w = slot.flipped ? games - wins_per_edge[slot.edge] : wins_per_edge[slot.edge];
        p_hat[v] = static_cast<double>(w) / static_cast<double>(games);
        weights[v] = static_cast<double>(games);
    }
    double t = test_statistic(p_hat, restricted_mle(p_hat, weights, cs_), weights);
    return null_->pvalue(t) <= alpha_;
}

}  // namespace rankident

#include "rankident/ident.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "rankident/simplex.hpp"

namespace rankident {

EdgeSlot ConstraintSystem::edge_slot(const DirectedEdge& d) const {
    auto it = slots_.find({d.team, d.opponent});
    if (it == slots_.end())
        throw data_error("directed edge (" + std::to_string(d.team) + "," +
                         std::to_string(d.opponent) + ") is not part of the system");
    return it->second;
}

std::vector<double> ConstraintSystem::oriented_values(const std::vector<double>& per_edge) const {
    if (per_edge.size() != graph_.edge_count())
        throw data_error("per-edge vector does not match the graph");
    std::vector<double> out(var_count());
    for (std::size_t v = 0; v < var_count(); ++v) {
        auto slot = edge_slot(var_edge(v));
        out[v] = slot.flipped ? 1.0 - per_edge[slot.edge] : per_edge[slot.edge];
    }
    return out;
}

std::vector<double> ConstraintSystem::oriented_estimates(const OutcomeData& data) const {
    std::vector<double> means(data.graph.edge_count());
    for (std::size_t e = 0; e < means.size(); ++e)
        means[e] = static_cast<double>(data.wins[e]) / static_cast<double>(data.games[e]);
    return oriented_values(means);
}

std::vector<double> ConstraintSystem::oriented_weights(const OutcomeData& data) const {
    std::vector<double> out(var_count());
    for (std::size_t v = 0; v < var_count(); ++v)
        out[v] = static_cast<double>(data.games[edge_slot(var_edge(v)).edge]);
    return out;
}

namespace {

// Drops order pairs whose relation is implied by a directed path through the
// remaining pairs.
std::vector<std::pair<int, int>> transitive_reduce(std::vector<std::pair<int, int>> pairs, int n) {
    auto reachable = [&](int from, int to, int skip) {
        std::vector<char> seen(static_cast<std::size_t>(n), 0);
        std::deque<int> queue{from};
        seen[from] = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            if (v == to) return true;
            for (std::size_t c = 0; c < pairs.size(); ++c) {
                if (static_cast<int>(c) == skip) continue;
                if (pairs[c].first == v && !seen[pairs[c].second]) {
                    seen[pairs[c].second] = 1;
                    queue.push_back(pairs[c].second);
                }
            }
        }
        return false;
    };
    for (std::size_t c = 0; c < pairs.size();) {
        if (reachable(pairs[c].first, pairs[c].second, static_cast<int>(c)))
            pairs.erase(pairs.begin() + static_cast<std::ptrdiff_t>(c));
        else
            ++c;
    }
    return pairs;
}

}  // namespace

ConstraintSystem build_constraint_system(const TournamentGraph& g, const Ranking& r,
                                         bool prune_transitive) {
    if (r.team_count() != g.team_count())
        throw data_error("ranking covers " + std::to_string(r.team_count()) + " teams, graph has " +
                         std::to_string(g.team_count()));
    ConstraintSystem cs;
    cs.graph_ = g;
    cs.ranking_ = r;

    // One variable per edge, oriented from the weakly worse team.
    for (std::size_t e = 0; e < g.edge_count(); ++e) {
        const Edge& edge = g.edges()[e];
        const int ra = r.rank_of(edge.a), rb = r.rank_of(edge.b);
        int worse = ra >= rb ? edge.a : edge.b;
        int better = ra >= rb ? edge.b : edge.a;
        cs.var_team_.push_back(worse);
        cs.var_opponent_.push_back(better);
        cs.var_tied_.push_back(ra == rb);
        cs.slots_[{worse, better}] = EdgeSlot{e, worse != edge.a};
        cs.slots_[{better, worse}] = EdgeSlot{e, better != edge.a};
        cs.boundary_.push_back({worse, better});
        if (ra == rb) cs.boundary_.push_back({better, worse});
    }

    // Order pairs: worse-vs-better games dominated by games between even
    // more separated ranks. Pairs among tied edges are vacuous (both pinned
    // at 1/2) and skipped.
    std::vector<std::pair<int, int>> var_pairs;
    for (std::size_t v1 = 0; v1 < cs.var_team_.size(); ++v1) {
        if (cs.var_tied_[v1]) continue;
        for (std::size_t v2 = 0; v2 < cs.var_team_.size(); ++v2) {
            if (v1 == v2 || cs.var_tied_[v2]) continue;
            const int rj = r.rank_of(cs.var_team_[v1]), rl = r.rank_of(cs.var_opponent_[v1]);
            const int ri = r.rank_of(cs.var_team_[v2]), rk = r.rank_of(cs.var_opponent_[v2]);
            if (rl <= rk && rk <= ri && ri <= rj)
                var_pairs.emplace_back(static_cast<int>(v1), static_cast<int>(v2));
        }
    }
    std::sort(var_pairs.begin(), var_pairs.end());
    var_pairs.erase(std::unique(var_pairs.begin(), var_pairs.end()), var_pairs.end());
    if (prune_transitive)
        var_pairs = transitive_reduce(std::move(var_pairs), static_cast<int>(cs.var_team_.size()));
    cs.order_vars_ = var_pairs;
    for (auto [a, b] : var_pairs)
        cs.order_.emplace_back(cs.var_edge(static_cast<std::size_t>(a)),
                               cs.var_edge(static_cast<std::size_t>(b)));
    return cs;
}

bool check_membership(const ProbabilityAssignment& p, const TournamentGraph& g, const Ranking& r,
                      double tol) {
    if (r.team_count() != g.team_count()) throw data_error("ranking does not match the graph");

    // Direct games: the weakly better team wins weakly more often, strictly
    // so under a strict rank gap.
    for (const Edge& e : g.edges()) {
        int rank_gap = sign(static_cast<double>(r.rank_of(e.a) - r.rank_of(e.b)));
        if (rank_gap + sign(oriented_prob(p, e.a, e.b) - 0.5, tol) != 0) return false;
    }

    // Indirect games over ordered pairs of directed edges.
    std::vector<DirectedEdge> directed;
    directed.reserve(2 * g.edge_count());
    for (const Edge& e : g.edges()) {
        directed.push_back({e.a, e.b});
        directed.push_back({e.b, e.a});
    }
    for (const DirectedEdge& d1 : directed) {
        for (const DirectedEdge& d2 : directed) {
            if (d1 == d2) continue;
            const int ri = r.rank_of(d1.team), rk = r.rank_of(d1.opponent);
            const int rj = r.rank_of(d2.team), rl = r.rank_of(d2.opponent);
            const double diff =
                oriented_prob(p, d1.team, d1.opponent) - oriented_prob(p, d2.team, d2.opponent);
            if (ri == rj) {
                if (sign(static_cast<double>(rl - rk)) + sign(diff, tol) != 0) return false;
            } else if (ri > rj) {
                if (std::min(sign(static_cast<double>(rl - rk)), sign(diff, tol)) != -1) return false;
            }
        }
    }
    return true;
}

std::optional<ContractedTournament> merge_tied_teams(const ProbabilityAssignment& p,
                                                     const TournamentGraph& g, const Ranking& r,
                                                     double tol) {
    const int q = g.team_count();
    std::vector<int> distinct = r.ranks();
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<int> class_of(static_cast<std::size_t>(q) + 1, 0);
    for (int t = 1; t <= q; ++t) {
        auto it = std::lower_bound(distinct.begin(), distinct.end(), r.rank_of(t));
        class_of[t] = static_cast<int>(it - distinct.begin()) + 1;
    }
    const int m = static_cast<int>(distinct.size());

    std::map<std::pair<int, int>, double> class_prob;  // (u, v) u < v -> P(u beats v)
    for (const Edge& e : g.edges()) {
        int cu = class_of[e.a], cv = class_of[e.b];
        double prob = p.p[*g.edge_index(e.a, e.b)];  // P(e.a beats e.b)
        if (cu == cv) {
            if (std::abs(prob - 0.5) > tol) return std::nullopt;
            continue;
        }
        if (cu > cv) {
            std::swap(cu, cv);
            prob = 1.0 - prob;
        }
        auto [it, inserted] = class_prob.try_emplace({cu, cv}, prob);
        if (!inserted && std::abs(it->second - prob) > tol) return std::nullopt;
    }

    std::vector<std::pair<int, int>> edges;
    std::vector<double> probs;
    for (const auto& [pair, prob] : class_prob) {
        edges.push_back(pair);
        probs.push_back(prob);
    }
    ContractedTournament out{TournamentGraph(m, edges), {}, Ranking{}, {}};
    out.probs = ProbabilityAssignment{out.graph, std::move(probs)};
    std::vector<int> class_ranks(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) class_ranks[c] = c + 1;  // classes sorted by rank
    out.ranking = Ranking(std::move(class_ranks));
    out.class_of.assign(class_of.begin() + 1, class_of.end());
    return out;
}

bool check_membership_matrix(const ProbabilityAssignment& p, const TournamentGraph& g,
                             const Ranking& r, bool merge_ties, double tol) {
    if (r.team_count() != g.team_count()) throw data_error("ranking does not match the graph");
    if (r.has_ties()) {
        if (!merge_ties)
            throw data_error("matrix membership check requires a tie-free ranking; "
                             "pass merge_ties to contract tied teams");
        auto contracted = merge_tied_teams(p, g, r, tol);
        if (!contracted) return false;
        return check_membership_matrix(contracted->probs, contracted->graph, contracted->ranking,
                                       false, tol);
    }

    const int q = g.team_count();
    const double empty = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> a(static_cast<std::size_t>(q),
                                       std::vector<double>(static_cast<std::size_t>(q), empty));
    for (int i = 0; i < q; ++i) a[i][i] = 0.5;
    for (const Edge& e : g.edges()) {
        double prob = p.p[*g.edge_index(e.a, e.b)];
        a[r.rank_of(e.a) - 1][r.rank_of(e.b) - 1] = prob;
        a[r.rank_of(e.b) - 1][r.rank_of(e.a) - 1] = 1.0 - prob;
    }

    // Any filled entry must exceed every distinct filled entry weakly
    // southwest of it.
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j < q; ++j) {
            if (std::isnan(a[i][j])) continue;
            for (int i2 = i; i2 < q; ++i2) {
                for (int j2 = 0; j2 <= j; ++j2) {
                    if ((i2 == i && j2 == j) || std::isnan(a[i2][j2])) continue;
                    if (!(a[i2][j2] < a[i][j] - tol)) return false;
                }
            }
        }
    }
    return true;
}

IdentifiedSet identified_set(const ProbabilityAssignment& p, const TournamentGraph& g,
                             bool allow_ties, const IdentOptions& opts) {
    IdentifiedSet out;
    for (const Ranking& r : enumerate_rankings(g.team_count(), allow_ties, opts.enumerate))
        if (check_membership(p, g, r, opts.tol)) out.rankings.push_back(r);
    for (int t = 1; t <= g.team_count(); ++t) out.per_team.emplace(t, std::set<int>{});
    for (const Ranking& r : out.rankings)
        for (int t = 1; t <= g.team_count(); ++t) out.per_team[t].insert(r.rank_of(t));
    return out;
}

std::set<int> project_rank(const IdentifiedSet& s, int team) {
    auto it = s.per_team.find(team);
    if (it == s.per_team.end()) throw data_error("unknown team " + std::to_string(team));
    return it->second;
}

LinkFunction btl_link() {
    LinkFunction link;
    link.name = "btl";
    link.forward = [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
    };
    link.inverse = [](double p) {
        if (!(p > 0.0 && p < 1.0)) throw data_error("logit argument must lie in (0,1)");
        return std::log(p / (1.0 - p));
    };
    return link;
}

MeritVector solve_linear_parametric(const ProbabilityAssignment& p, const TournamentGraph& g,
                                    const LinkFunction& link, int norm_team, double norm_value,
                                    double tol) {
    const int q = g.team_count();
    if (norm_team < 1 || norm_team > q) throw data_error("normalization team out of range");
    if (!is_connected(g))
        throw data_error("merit recovery requires a connected tournament graph");

    MeritVector merits;
    merits.theta.assign(static_cast<std::size_t>(q), 0.0);
    std::vector<char> known(static_cast<std::size_t>(q) + 1, 0);
    std::deque<int> queue{norm_team};
    known[norm_team] = 1;
    merits.theta[norm_team - 1] = norm_value;
    while (!queue.empty()) {
        int l = queue.front();
        queue.pop_front();
        for (int k : g.neighbors(l)) {
            if (known[k]) continue;
            known[k] = 1;
            merits.theta[k - 1] = merits.theta[l - 1] + link.inverse(oriented_prob(p, l, k));
            queue.push_back(k);
        }
    }

    double worst = 0.0;
    const Edge* worst_edge = nullptr;
    for (const Edge& e : g.edges()) {
        double implied = merits.theta[e.b - 1] - merits.theta[e.a - 1];
        double residual = std::abs(implied - link.inverse(p.p[*g.edge_index(e.a, e.b)]));
        if (residual > worst) {
            worst = residual;
            worst_edge = &e;
        }
    }
    if (worst > tol)
        throw compute_error("edge probabilities are inconsistent with a difference-form link: edge (" +
                            std::to_string(worst_edge->a) + "," + std::to_string(worst_edge->b) +
                            ") has residual " + std::to_string(worst));
    return merits;
}

bool check_membership_semiparametric(const ProbabilityAssignment& p, const TournamentGraph& g,
                                     const Ranking& r, double margin) {
    if (r.team_count() != g.team_count()) throw data_error("ranking does not match the graph");
    if (!(margin > 0.0)) throw data_error("margin must be positive");
    const int q = g.team_count();

    // Variables: scores nu_0..nu_{q-1} in [0,1] and s = z_q - 1 in [-1,1];
    // strict inequalities become "expression >= s" and the program
    // maximizes s.
    LinearProgram lp;
    const int nvars = q + 1;
    lp.c.assign(static_cast<std::size_t>(nvars), 0.0);
    lp.c[q] = 1.0;
    auto add_row = [&](const std::vector<double>& row, double rhs) {
        lp.a.push_back(row);
        lp.b.push_back(rhs);
    };
    for (int i = 0; i < q; ++i) {
        std::vector<double> row(static_cast<std::size_t>(nvars), 0.0);
        row[i] = 1.0;
        add_row(row, 1.0);  // nu_i <= 1
    }
    {
        std::vector<double> row(static_cast<std::size_t>(nvars), 0.0);
        row[q] = 1.0;
        add_row(row, 2.0);  // s <= 1
    }
    auto add_condition = [&](const std::vector<double>& expr, int s) {
        // sign(expr . nu) must equal s; strict cases leave slack for the
        // objective variable.
        std::vector<double> row(static_cast<std::size_t>(nvars), 0.0);
        for (int i = 0; i < q; ++i) row[i] = expr[i];
        if (s == 0) {
            add_row(row, 0.0);
            for (int i = 0; i < q; ++i) row[i] = -expr[i];
            add_row(row, 0.0);
        } else {
            for (int i = 0; i < q; ++i) row[i] = -static_cast<double>(s) * expr[i];
            row[q] = 1.0;  // -s*expr + (slack+(-1)) <= -1  <=>  s*expr >= slack
            add_row(row, 1.0);
        }
    };

    for (int l = 1; l <= q; ++l) {
        for (int k = l + 1; k <= q; ++k) {
            std::vector<double> expr(static_cast<std::size_t>(q), 0.0);
            expr[k - 1] += 1.0;
            expr[l - 1] -= 1.0;
            add_condition(expr, sign(static_cast<double>(r.rank_of(k) - r.rank_of(l))));
        }
    }

    std::vector<DirectedEdge> directed;
    for (const Edge& e : g.edges()) {
        directed.push_back({e.a, e.b});
        directed.push_back({e.b, e.a});
    }
    for (std::size_t i = 0; i < directed.size(); ++i) {
        for (std::size_t j = i + 1; j < directed.size(); ++j) {
            const auto& d1 = directed[i];
            const auto& d2 = directed[j];
            std::vector<double> expr(static_cast<std::size_t>(q), 0.0);
            expr[d1.opponent - 1] += 1.0;
            expr[d1.team - 1] -= 1.0;
            expr[d2.opponent - 1] -= 1.0;
            expr[d2.team - 1] += 1.0;
            double diff =
                oriented_prob(p, d1.team, d1.opponent) - oriented_prob(p, d2.team, d2.opponent);
            add_condition(expr, sign(diff));
        }
    }

    auto sol = solve_lp(lp);
    if (!sol) return false;
    return sol->objective - 1.0 >= margin;
}

}  // namespace rankident

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankident/ident.hpp"

using namespace rankident;

namespace {

// Four-team chain with win probabilities 0.75, 0.7, 0.2 along the path.
TournamentGraph chain_graph() { return TournamentGraph(4, {{1, 2}, {2, 3}, {3, 4}}); }
ProbabilityAssignment chain_probs() {
    return make_probability_assignment(chain_graph(), {0.75, 0.7, 0.2});
}

using LinkPair = double (*)(double, double);  // P(team with merit x beats merit y)

double btl_pair(double x, double y) {
    double d = y - x;
    return d >= 0 ? 1.0 / (1.0 + std::exp(-d)) : std::exp(d) / (1.0 + std::exp(d));
}

// A monotone pair-probability map that does not reduce to a merit
// difference.
double curved_pair(double x, double y) {
    double num = std::exp(-x) + 1.0 / (1.0 + std::exp(-y));
    double den = num + std::exp(-y) + 1.0 / (1.0 + std::exp(-x));
    return num / den;
}

ProbabilityAssignment forward_generate(const TournamentGraph& g, const MeritVector& merits,
                                       LinkPair f) {
    std::vector<double> p;
    for (const Edge& e : g.edges()) p.push_back(f(merits.theta[e.a - 1], merits.theta[e.b - 1]));
    return make_probability_assignment(g, p);
}

TournamentGraph random_graph(std::mt19937_64& rng, int q) {
    std::vector<std::pair<int, int>> edges;
    for (int a = 1; a <= q; ++a)
        for (int b = a + 1; b <= q; ++b)
            if (rng() % 2) edges.emplace_back(a, b);
    if (edges.empty()) edges.emplace_back(1, 2);
    return TournamentGraph(q, edges);
}

ProbabilityAssignment random_probs(std::mt19937_64& rng, const TournamentGraph& g) {
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    std::vector<double> p;
    for (std::size_t e = 0; e < g.edge_count(); ++e) p.push_back(unif(rng));
    return make_probability_assignment(g, p);
}

}  // namespace

TEST_CASE("constraint system: two-edge example") {
    // A plays B (A ranked 2, B ranked 1), C plays B (C ranked 3).
    TournamentGraph g(3, {{1, 2}, {2, 3}});
    ConstraintSystem cs = build_constraint_system(g, Ranking({2, 1, 3}));

    REQUIRE(cs.boundary().size() == 2);
    CHECK(cs.boundary()[0] == DirectedEdge{1, 2});
    CHECK(cs.boundary()[1] == DirectedEdge{3, 2});
    REQUIRE(cs.order().size() == 1);
    CHECK(cs.order()[0].first == DirectedEdge{3, 2});   // p(C beats B)
    CHECK(cs.order()[0].second == DirectedEdge{1, 2});  // <= p(A beats B)

    CHECK(cs.var_count() == 2);
    CHECK(cs.edge_slot({1, 2}).flipped == false);
    CHECK(cs.edge_slot({2, 1}).flipped == true);
}

TEST_CASE("constraint system: chain with ranking (1,3,4,2)") {
    ConstraintSystem cs = build_constraint_system(chain_graph(), Ranking({1, 3, 4, 2}));
    REQUIRE(cs.boundary().size() == 3);
    CHECK(cs.boundary()[0] == DirectedEdge{2, 1});
    CHECK(cs.boundary()[1] == DirectedEdge{3, 2});
    CHECK(cs.boundary()[2] == DirectedEdge{3, 4});
    REQUIRE(cs.order().size() == 1);
    CHECK(cs.order()[0].first == DirectedEdge{3, 4});
    CHECK(cs.order()[0].second == DirectedEdge{3, 2});
}

TEST_CASE("constraint system: tie forces both orientations") {
    TournamentGraph g(2, {{1, 2}});
    ConstraintSystem cs = build_constraint_system(g, Ranking({1, 1}));
    REQUIRE(cs.boundary().size() == 2);
    CHECK(cs.boundary()[0] == DirectedEdge{1, 2});
    CHECK(cs.boundary()[1] == DirectedEdge{2, 1});
    CHECK(cs.var_tied(0));
    CHECK(cs.order().empty());
}

TEST_CASE("constraint system rejects mismatched ranking") {
    CHECK_THROWS_AS(build_constraint_system(chain_graph(), Ranking({1, 2})), data_error);
}

TEST_CASE("transitive order pairs are pruned") {
    // Complete graph on a strict ranking produces chains of order pairs.
    TournamentGraph g(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}});
    ConstraintSystem pruned = build_constraint_system(g, Ranking({1, 2, 3, 4}), true);
    ConstraintSystem full = build_constraint_system(g, Ranking({1, 2, 3, 4}), false);
    CHECK(pruned.order().size() < full.order().size());
    // Pruning preserves reachability: every full pair is implied by a path.
    for (auto [a, b] : full.order_vars()) {
        std::vector<char> seen(full.var_count(), 0);
        std::vector<int> stack{a};
        seen[static_cast<std::size_t>(a)] = 1;
        bool reached = false;
        while (!stack.empty() && !reached) {
            int v = stack.back();
            stack.pop_back();
            if (v == b) reached = true;
            for (auto [c, d] : pruned.order_vars())
                if (c == v && !seen[static_cast<std::size_t>(d)]) {
                    seen[static_cast<std::size_t>(d)] = 1;
                    stack.push_back(d);
                }
        }
        CHECK(reached);
    }
}

TEST_CASE("membership on the chain example") {
    auto p = chain_probs();
    auto g = chain_graph();
    CHECK(check_membership(p, g, Ranking({1, 3, 4, 2})));
    CHECK(check_membership(p, g, Ranking({2, 3, 4, 1})));
    CHECK_FALSE(check_membership(p, g, Ranking({4, 3, 2, 1})));
    CHECK_FALSE(check_membership(p, g, Ranking({1, 2, 3, 4})));

    int hits = 0;
    for (const Ranking& r : enumerate_rankings(4, false)) hits += check_membership(p, g, r);
    CHECK(hits == 2);
}

TEST_CASE("membership on a single edge") {
    TournamentGraph g(2, {{1, 2}});
    auto p = make_probability_assignment(g, {0.75});
    CHECK(check_membership(p, g, Ranking({1, 2})));
    CHECK_FALSE(check_membership(p, g, Ranking({2, 1})));
    CHECK_FALSE(check_membership(p, g, Ranking({1, 1})));

    auto fair = make_probability_assignment(g, {0.5});
    CHECK(check_membership(fair, g, Ranking({1, 1})));
    CHECK_FALSE(check_membership(fair, g, Ranking({1, 2})));
}

TEST_CASE("matrix membership agrees with the displayed chain matrices") {
    auto p = chain_probs();
    auto g = chain_graph();
    CHECK(check_membership_matrix(p, g, Ranking({1, 3, 4, 2})));
    CHECK(check_membership_matrix(p, g, Ranking({2, 3, 4, 1})));
    CHECK_FALSE(check_membership_matrix(p, g, Ranking({4, 3, 2, 1})));
}

TEST_CASE("matrix membership with a fair single edge fails a strict ranking") {
    TournamentGraph g(2, {{1, 2}});
    auto p = make_probability_assignment(g, {0.5});
    CHECK_FALSE(check_membership_matrix(p, g, Ranking({1, 2})));
}

TEST_CASE("matrix membership on ties requires merging") {
    auto p = chain_probs();
    auto g = chain_graph();
    Ranking tied({1, 3, 4, 1});
    CHECK_THROWS_AS(check_membership_matrix(p, g, tied), data_error);
    CHECK(check_membership_matrix(p, g, tied, true));
    CHECK(check_membership(p, g, tied));  // the two routes agree

    auto contracted = merge_tied_teams(p, g, tied);
    REQUIRE(contracted.has_value());
    CHECK(contracted->graph.team_count() == 3);
    CHECK(contracted->graph.edge_count() == 3);
    CHECK(contracted->class_of == std::vector<int>{1, 2, 3, 1});
    CHECK(oriented_prob(contracted->probs, 1, 3) == doctest::Approx(0.8));

    TournamentGraph single(2, {{1, 2}});
    auto lopsided = make_probability_assignment(single, {0.6});
    CHECK_FALSE(merge_tied_teams(lopsided, single, Ranking({1, 1})).has_value());
    CHECK_FALSE(check_membership_matrix(lopsided, single, Ranking({1, 1}), true));
}

TEST_CASE("matrix and sign-condition membership agree on random instances") {
    std::mt19937_64 rng(321);
    for (int trial = 0; trial < 120; ++trial) {
        int q = 2 + static_cast<int>(rng() % 4);
        TournamentGraph g = random_graph(rng, q);
        ProbabilityAssignment p = random_probs(rng, g);
        auto perms = enumerate_rankings(q, false);
        const Ranking& r = perms[rng() % perms.size()];
        CHECK(check_membership(p, g, r) == check_membership_matrix(p, g, r));
    }
}

TEST_CASE("identified set on the chain example") {
    auto set = identified_set(chain_probs(), chain_graph(), false);
    REQUIRE(set.rankings.size() == 2);
    CHECK(set.rankings[0].ranks() == std::vector<int>{1, 3, 4, 2});
    CHECK(set.rankings[1].ranks() == std::vector<int>{2, 3, 4, 1});
    CHECK(project_rank(set, 1) == std::set<int>{1, 2});
    CHECK(project_rank(set, 2) == std::set<int>{3});
    CHECK(project_rank(set, 3) == std::set<int>{4});
    CHECK(project_rank(set, 4) == std::set<int>{1, 2});
    CHECK_THROWS_AS(project_rank(set, 9), data_error);
}

TEST_CASE("identified set is a singleton on a complete graph with generated data") {
    TournamentGraph g(3, {{1, 2}, {1, 3}, {2, 3}});
    auto p = forward_generate(g, {{1.0, 2.0, 3.0}}, btl_pair);
    auto set = identified_set(p, g, false);
    REQUIRE(set.rankings.size() == 1);
    CHECK(set.rankings[0].ranks() == std::vector<int>{1, 2, 3});
    for (int t = 1; t <= 3; ++t) CHECK(project_rank(set, t).size() == 1);
}

TEST_CASE("intransitive cycle yields an empty identified set") {
    TournamentGraph g(3, {{1, 2}, {1, 3}, {2, 3}});
    // 1 beats 2, 2 beats 3, 3 beats 1, each with probability 0.7.
    auto p = make_probability_assignment(g, {0.7, 0.3, 0.7});
    auto set = identified_set(p, g, true);
    CHECK(set.rankings.empty());
    CHECK(project_rank(set, 1).empty());
}

TEST_CASE("point identification under diameter two with generated data") {
    std::mt19937_64 rng(555);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    int tested = 0;
    while (tested < 40) {
        int q = 3 + static_cast<int>(rng() % 3);
        TournamentGraph g = random_graph(rng, q);
        if (!diameter_at_most_two(g)) continue;
        MeritVector merits;
        for (int i = 0; i < q; ++i) merits.theta.push_back(unif(rng));
        std::vector<double> sorted = merits.theta;
        std::sort(sorted.begin(), sorted.end());
        bool close = false;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
            if (std::abs(sorted[i] - sorted[i + 1]) < 1e-3) close = true;
        if (close) continue;  // keep merits clearly tie-free
        LinkPair f = (tested % 2 == 0) ? btl_pair : curved_pair;
        auto set = identified_set(forward_generate(g, merits, f), g, false);
        REQUIRE(set.rankings.size() == 1);
        CHECK(set.rankings[0] == ranks_from_merits(merits));
        ++tested;
    }
}

TEST_CASE("the curved pair-probability map reproduces its published values") {
    MeritVector merits{{5.0, 2.59618, -2.8276, 4.42107}};
    CHECK(curved_pair(merits.theta[0], merits.theta[1]) == doctest::Approx(0.467457).epsilon(1e-5));
    CHECK(curved_pair(merits.theta[1], merits.theta[2]) == doctest::Approx(0.0072587).epsilon(1e-4));
    CHECK(curved_pair(merits.theta[2], merits.theta[3]) == doctest::Approx(0.996221).epsilon(1e-5));
}

TEST_CASE("identified set is invariant to relabeling teams") {
    std::mt19937_64 rng(777);
    for (int trial = 0; trial < 30; ++trial) {
        int q = 2 + static_cast<int>(rng() % 4);
        TournamentGraph g = random_graph(rng, q);
        ProbabilityAssignment p = random_probs(rng, g);

        std::vector<int> perm(static_cast<std::size_t>(q));
        std::iota(perm.begin(), perm.end(), 1);
        std::shuffle(perm.begin(), perm.end(), rng);

        std::vector<std::pair<int, int>> new_edges;
        std::vector<double> new_p;
        for (std::size_t e = 0; e < g.edge_count(); ++e) {
            int a = perm[static_cast<std::size_t>(g.edges()[e].a - 1)];
            int b = perm[static_cast<std::size_t>(g.edges()[e].b - 1)];
            new_edges.emplace_back(std::min(a, b), std::max(a, b));
            new_p.push_back(a < b ? p.p[e] : 1.0 - p.p[e]);
        }
        TournamentGraph g2(q, new_edges);
        std::vector<double> aligned(g2.edge_count());
        for (std::size_t e = 0; e < new_edges.size(); ++e)
            aligned[*g2.edge_index(new_edges[e].first, new_edges[e].second)] = new_p[e];
        auto p2 = make_probability_assignment(g2, aligned);

        auto set1 = identified_set(p, g, true);
        auto set2 = identified_set(p2, g2, true);
        REQUIRE(set1.rankings.size() == set2.rankings.size());
        for (const Ranking& r : set1.rankings) {
            std::vector<int> mapped(static_cast<std::size_t>(q));
            for (int t = 1; t <= q; ++t)
                mapped[static_cast<std::size_t>(perm[static_cast<std::size_t>(t - 1)] - 1)] =
                    r.rank_of(t);
            CHECK(std::any_of(set2.rankings.begin(), set2.rankings.end(),
                              [&](const Ranking& r2) { return r2.ranks() == mapped; }));
        }
    }
}

TEST_CASE("merit recovery on the chain matches the worked example") {
    auto merits = solve_linear_parametric(chain_probs(), chain_graph(), btl_link(), 1, 1.0);
    CHECK(merits.theta[0] == doctest::Approx(1.0));
    CHECK(merits.theta[1] == doctest::Approx(2.099).epsilon(1e-3));
    CHECK(merits.theta[2] == doctest::Approx(2.946).epsilon(1e-3));
    CHECK(merits.theta[3] == doctest::Approx(1.559).epsilon(1e-3));
    CHECK(ranks_from_merits(merits).ranks() == std::vector<int>{1, 3, 4, 2});
}

TEST_CASE("merit recovery degenerates to the normalization on fair data") {
    auto g = chain_graph();
    auto p = make_probability_assignment(g, {0.5, 0.5, 0.5});
    auto merits = solve_linear_parametric(p, g, btl_link(), 2, -3.25);
    for (double v : merits.theta) CHECK(v == doctest::Approx(-3.25));
}

TEST_CASE("merit recovery checks non-tree edges") {
    TournamentGraph g(3, {{1, 2}, {1, 3}, {2, 3}});
    MeritVector truth{{0.0, 1.0, 2.5}};
    auto p = forward_generate(g, truth, btl_pair);
    auto merits = solve_linear_parametric(p, g, btl_link(), 1, 0.0, 1e-9);
    CHECK(merits.theta[1] - merits.theta[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(merits.theta[2] - merits.theta[0] == doctest::Approx(2.5).epsilon(1e-9));

    // Perturb the closing edge: the implied difference no longer matches.
    auto bad = p;
    bad.p[*g.edge_index(2, 3)] += 0.05;
    CHECK_THROWS_AS(solve_linear_parametric(bad, g, btl_link(), 1, 0.0, 1e-6), compute_error);

    TournamentGraph split(4, {{1, 2}, {3, 4}});
    CHECK_THROWS_AS(solve_linear_parametric(make_probability_assignment(split, {0.6, 0.6}), split,
                                            btl_link(), 1, 0.0),
                    data_error);
}

TEST_CASE("link function sanity") {
    auto link = btl_link();
    CHECK(link.forward(0.0) == doctest::Approx(0.5));
    for (double x = -8.0; x <= 8.0; x += 0.5) {
        CHECK(link.inverse(link.forward(x)) == doctest::Approx(x).epsilon(1e-10));
        CHECK(link.forward(-x) == doctest::Approx(1.0 - link.forward(x)).epsilon(1e-12));
    }
}

TEST_CASE("semiparametric membership accepts the chain ranking with a known witness") {
    auto p = chain_probs();
    auto g = chain_graph();
    CHECK(check_membership_semiparametric(p, g, Ranking({2, 3, 4, 1})));
    CHECK(check_membership_semiparametric(p, g, Ranking({1, 3, 4, 2})));
    CHECK_FALSE(check_membership_semiparametric(p, g, Ranking({4, 3, 2, 1})));

    // The published witness satisfies every rank inequality the program
    // encodes.
    const std::vector<double> nu = {0.5, 0.54, 0.55, 0.4659};
    const Ranking r({2, 3, 4, 1});
    for (int l = 1; l <= 4; ++l)
        for (int k = 1; k <= 4; ++k)
            CHECK(sign(nu[static_cast<std::size_t>(k - 1)] - nu[static_cast<std::size_t>(l - 1)]) ==
                  sign(static_cast<double>(r.rank_of(k) - r.rank_of(l))));
}

TEST_CASE("semiparametric membership on a single edge") {
    TournamentGraph g(2, {{1, 2}});
    auto p = make_probability_assignment(g, {0.6});
    CHECK(check_membership_semiparametric(p, g, Ranking({1, 2})));
    CHECK_FALSE(check_membership_semiparametric(p, g, Ranking({2, 1})));
}

TEST_CASE("semiparametric membership implies nonparametric membership") {
    std::mt19937_64 rng(4242);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 60; ++trial) {
        int q = 2 + static_cast<int>(rng() % 3);
        TournamentGraph g = random_graph(rng, q);
        ProbabilityAssignment p = random_probs(rng, g);
        auto all = enumerate_rankings(q, true);
        const Ranking& r = all[rng() % all.size()];
        if (check_membership_semiparametric(p, g, r)) {
            CHECK(check_membership(p, g, r));
            ++checked;
        }
    }
    CHECK(checked > 0);
}

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "rankident/core.hpp"

using namespace rankident;

namespace {

// Brute-force oracle: every integer vector in {1..q}^q that satisfies the
// rank consistency law.
std::vector<std::vector<int>> brute_force_weak_orderings(int q) {
    std::vector<std::vector<int>> out;
    std::vector<int> v(static_cast<std::size_t>(q), 1);
    for (;;) {
        if (is_valid_ranking(v)) out.push_back(v);
        int pos = 0;
        while (pos < q && ++v[static_cast<std::size_t>(pos)] > q) {
            v[static_cast<std::size_t>(pos)] = 1;
            ++pos;
        }
        if (pos == q) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

TournamentGraph chain4() { return TournamentGraph(4, {{1, 2}, {2, 3}, {3, 4}}); }

}  // namespace

TEST_CASE("sign convention") {
    CHECK(sign(0.0) == 0);
    CHECK(sign(0.25) == 1);
    CHECK(sign(-3.0) == -1);
    CHECK(sign(1e-300) == 1);
    CHECK(sign(0.05, 0.1) == 0);
    CHECK(sign(0.25, 0.1) == 1);
    CHECK(sign(-0.25, 0.1) == -1);
}

TEST_CASE("ranks from merits") {
    CHECK(ranks_from_merits({{0.2, 0.4, 0.5, 0.21}}).ranks() == std::vector<int>{1, 3, 4, 2});
    CHECK(ranks_from_merits({{1.0, 1.0, 1.0}}).ranks() == std::vector<int>{1, 1, 1});
    CHECK(ranks_from_merits({{5.0, 2.59618, -2.8276, 4.42107}}).ranks() ==
          std::vector<int>{4, 2, 1, 3});
    CHECK_THROWS_AS(ranks_from_merits({{1.0, std::nan("")}}), data_error);
}

TEST_CASE("rank validity law") {
    CHECK(is_valid_ranking({1, 1, 3}));
    CHECK_FALSE(is_valid_ranking({1, 1, 2}));
    CHECK(is_valid_ranking({2, 1, 3}));
    CHECK_FALSE(is_valid_ranking({}));
    CHECK_FALSE(is_valid_ranking({2, 2}));
    CHECK(is_valid_ranking({1}));
}

TEST_CASE("ranks from merits always valid, invariant to monotone transforms") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 200; ++trial) {
        int q = 1 + static_cast<int>(rng() % 6);
        MeritVector merits;
        for (int i = 0; i < q; ++i) merits.theta.push_back(unif(rng));
        if (trial % 3 == 0 && q > 1) merits.theta[0] = merits.theta[1];  // force a tie sometimes
        Ranking r = ranks_from_merits(merits);
        CHECK(is_valid_ranking(r.ranks()));

        MeritVector shifted = merits;
        for (double& v : shifted.theta) v += 17.5;
        CHECK(ranks_from_merits(shifted) == r);

        MeritVector warped = merits;
        for (double& v : warped.theta) v = std::atan(v) * 2.0 + v * 3.0;  // strictly increasing
        CHECK(ranks_from_merits(warped) == r);
    }
}

TEST_CASE("enumerate rankings: permutations and weak orderings") {
    CHECK(enumerate_rankings(3, false).size() == 6);
    CHECK(enumerate_rankings(3, true).size() == 13);
    CHECK(enumerate_rankings(4, true).size() == 75);
    CHECK(enumerate_rankings(5, true).size() == 541);
    CHECK(enumerate_rankings(5, false).size() == 120);
    CHECK(enumerate_rankings(1, true).size() == 1);
    CHECK_THROWS_AS(enumerate_rankings(9, false), compute_error);
    CHECK_THROWS_AS(enumerate_rankings(0, false), data_error);

    EnumerateOptions wide;
    wide.max_team_count = 9;
    CHECK(enumerate_rankings(9, false, wide).size() == 362880);
}

TEST_CASE("enumerate rankings matches the brute-force filter oracle") {
    for (int q = 1; q <= 5; ++q) {
        auto oracle = brute_force_weak_orderings(q);
        auto got = enumerate_rankings(q, true);
        REQUIRE(got.size() == oracle.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].ranks() == oracle[i]);

        auto perms = enumerate_rankings(q, false);
        std::size_t fact = 1;
        for (int k = 2; k <= q; ++k) fact *= static_cast<std::size_t>(k);
        CHECK(perms.size() == fact);
        for (const auto& r : perms) {
            CHECK(is_valid_ranking(r.ranks()));
            CHECK_FALSE(r.has_ties());
        }
    }
}

TEST_CASE("graph construction rejects bad edges") {
    CHECK_THROWS_AS(TournamentGraph(3, {{1, 1}}), data_error);
    CHECK_THROWS_AS(TournamentGraph(3, {{1, 4}}), data_error);
    CHECK_THROWS_AS(TournamentGraph(3, {{1, 2}, {2, 1}}), data_error);
    TournamentGraph g(3, {{2, 1}});
    CHECK(g.edges()[0] == Edge{1, 2});
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(2, 1));
    CHECK_FALSE(g.has_edge(1, 3));
}

TEST_CASE("connectivity") {
    CHECK(is_connected(chain4()));
    CHECK_FALSE(is_connected(TournamentGraph(4, {{1, 2}, {3, 4}})));
    CHECK(is_connected(TournamentGraph(1, {})));
}

TEST_CASE("diameter at most two") {
    CHECK_FALSE(diameter_at_most_two(chain4()));
    CHECK(diameter_at_most_two(TournamentGraph(5, {{1, 2}, {1, 3}, {1, 4}, {1, 5}})));
    CHECK(diameter_at_most_two(
        TournamentGraph(4, {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}})));
}

TEST_CASE("oriented probabilities") {
    TournamentGraph g(2, {{1, 2}});
    auto pa = make_probability_assignment(g, {0.75});
    CHECK(oriented_prob(pa, 1, 2) == doctest::Approx(0.75));
    CHECK(oriented_prob(pa, 2, 1) == doctest::Approx(0.25));
    CHECK_THROWS_AS(oriented_prob(pa, 1, 3), data_error);

    auto coin = make_probability_assignment(g, {0.5});
    CHECK(oriented_prob(coin, 1, 2) == 0.5);
    CHECK(oriented_prob(coin, 2, 1) == 0.5);
}

TEST_CASE("oriented probabilities of both directions sum to one exactly") {
    std::mt19937_64 rng(11);
    TournamentGraph g(4, {{1, 2}, {2, 3}, {3, 4}, {1, 4}});
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p;
        for (int e = 0; e < 4; ++e)
            p.push_back(std::ldexp(static_cast<double>(rng() >> 11), -53));
        auto pa = make_probability_assignment(g, p);
        for (const Edge& e : g.edges())
            CHECK(oriented_prob(pa, e.a, e.b) + oriented_prob(pa, e.b, e.a) == 1.0);
    }
}

TEST_CASE("outcome data validation") {
    TournamentGraph g(2, {{1, 2}});
    CHECK_THROWS_AS(make_outcome_data(g, {0}, {0}), data_error);
    CHECK_THROWS_AS(make_outcome_data(g, {3}, {4}), data_error);
    CHECK_THROWS_AS(make_outcome_data(g, {}, {}), data_error);
    auto d = make_outcome_data(g, {3}, {2});
    CHECK(d.games[0] == 3);
}

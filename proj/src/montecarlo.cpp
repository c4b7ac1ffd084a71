#include "rankident/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rankident/parallel.hpp"
#include "rankident/rng.hpp"

namespace rankident {

namespace {

constexpr std::uint64_t kDataTag = 0xD0;
constexpr std::uint64_t kNullTag = 0xA5;
constexpr std::uint64_t kOptTag = 0xF5;

std::vector<long long> draw_wins(const ProbabilityAssignment& p,
                                 const std::vector<long long>& games, std::uint64_t seed) {
    std::vector<long long> wins(games.size());
    auto rng = make_stream(seed, kDataTag);
    for (std::size_t e = 0; e < games.size(); ++e)
        wins[e] = draw_binomial(rng, games[e], p.p[e]);
    return wins;
}

}  // namespace

OutcomeData simulate_tournament(const ProbabilityAssignment& p, const TournamentGraph& g,
                                const std::vector<long long>& games_per_edge, std::uint64_t seed) {
    if (p.graph.edge_count() != g.edge_count() || games_per_edge.size() != g.edge_count())
        throw data_error("probability assignment and game counts must match the graph");
    for (long long n : games_per_edge)
        if (n < 1) throw data_error("every edge needs at least one game");
    return make_outcome_data(g, games_per_edge, draw_wins(p, games_per_edge, seed));
}

OutcomeData simulate_tournament(const ProbabilityAssignment& p, const TournamentGraph& g,
                                long long games_per_edge, std::uint64_t seed) {
    return simulate_tournament(p, g, std::vector<long long>(g.edge_count(), games_per_edge), seed);
}

RankFrequencyTable run_experiment(const ExperimentConfig& cfg) {
    const TournamentGraph& g = cfg.dgp.graph;
    const int q = g.team_count();
    if (cfg.replications < 1) throw data_error("experiment needs at least one replication");
    if (cfg.games_per_edge < 1) throw data_error("games_per_edge must be positive");
    const std::vector<long long> games(g.edge_count(), cfg.games_per_edge);

    const std::vector<Ranking> candidates = enumerate_rankings(q, cfg.allow_ties, cfg.enumerate);

    // One prepared test per candidate ranking; derived seeds keep the
    // asymptotic reference draws and optimizer starts reproducible.
    std::vector<std::optional<PreparedTest>> tests(candidates.size());
    parallel_for(candidates.size(), [&](std::size_t c) {
        TestOptions opts = cfg.test;
        opts.as.seed = derive_seed(cfg.seed, kNullTag, c);
        opts.fs.seed = derive_seed(cfg.seed, kOptTag, c);
        tests[c].emplace(g, games, candidates[c], cfg.alpha, cfg.method, opts);
    });

    struct RepResult {
        std::vector<int> accepted;  // candidate indices
    };
    std::vector<RepResult> reps = parallel_map<RepResult>(
        static_cast<std::size_t>(cfg.replications), [&](std::size_t rep) {
            std::vector<long long> wins =
                draw_wins(cfg.dgp, games, derive_seed(cfg.seed, kDataTag, rep));
            RepResult out;
            for (std::size_t c = 0; c < candidates.size(); ++c)
                if (!tests[c]->reject(wins)) out.accepted.push_back(static_cast<int>(c));
            return out;
        });

    RankFrequencyTable table;
    table.team_count = q;
    table.replications = cfg.replications;
    table.counts.assign(static_cast<std::size_t>(q),
                        std::vector<long long>(static_cast<std::size_t>(q), 0));
    std::vector<long long> accept_counts(candidates.size(), 0);
    long long cardinality_sum = 0;
    for (const RepResult& rep : reps) {
        std::vector<std::uint32_t> team_rank_seen(static_cast<std::size_t>(q), 0);
        for (int c : rep.accepted) {
            ++accept_counts[static_cast<std::size_t>(c)];
            for (int t = 1; t <= q; ++t)
                team_rank_seen[static_cast<std::size_t>(t - 1)] |=
                    std::uint32_t{1} << (candidates[static_cast<std::size_t>(c)].rank_of(t) - 1);
        }
        for (int t = 0; t < q; ++t)
            for (int rank = 0; rank < q; ++rank)
                if (team_rank_seen[static_cast<std::size_t>(t)] & (std::uint32_t{1} << rank))
                    ++table.counts[static_cast<std::size_t>(t)][static_cast<std::size_t>(rank)];
        cardinality_sum += static_cast<long long>(rep.accepted.size());
        if (rep.accepted.empty()) ++table.empty_set_count;
    }

    table.frequency.assign(static_cast<std::size_t>(q),
                           std::vector<double>(static_cast<std::size_t>(q), 0.0));
    table.std_error = table.frequency;
    const double n = static_cast<double>(cfg.replications);
    for (int t = 0; t < q; ++t) {
        for (int rank = 0; rank < q; ++rank) {
            double f = static_cast<double>(table.counts[t][rank]) / n;
            table.frequency[t][rank] = f;
            table.std_error[t][rank] = std::sqrt(f * (1.0 - f) / n);
        }
    }
    for (std::size_t c = 0; c < candidates.size(); ++c)
        table.ranking_accept_counts.emplace_back(candidates[c], accept_counts[c]);
    table.mean_set_cardinality = static_cast<double>(cardinality_sum) / n;
    return table;
}

double rejection_rate(const ProbabilityAssignment& p, const TournamentGraph& g,
                      long long games_per_edge, const Ranking& r, double alpha, TestMethod method,
                      int replications, std::uint64_t seed, const TestOptions& opts) {
    if (replications < 1) throw data_error("rejection rate needs at least one replication");
    if (games_per_edge < 1) throw data_error("games_per_edge must be positive");
    const std::vector<long long> games(g.edge_count(), games_per_edge);

    TestOptions prepared_opts = opts;
    prepared_opts.as.seed = derive_seed(seed, kNullTag, 0);
    prepared_opts.fs.seed = derive_seed(seed, kOptTag, 0);
    PreparedTest test(g, games, r, alpha, method, prepared_opts);

    std::vector<char> rejected = parallel_map<char>(
        static_cast<std::size_t>(replications), [&](std::size_t rep) {
            return static_cast<char>(
                test.reject(draw_wins(p, games, derive_seed(seed, kDataTag, rep))));
        });
    long long count = std::count(rejected.begin(), rejected.end(), char{1});
    return static_cast<double>(count) / static_cast<double>(replications);
}

}  // namespace rankident

#include "rankident/pagerank.hpp"

#include <cmath>

namespace rankident {

PageRankResult pagerank(const TransitionTable& table, const PageRankOptions& opts) {
    const int n = static_cast<int>(table.names.size());
    if (n == 0) throw data_error("transition table is empty");
    if (!(opts.damping > 0.0 && opts.damping < 1.0))
        throw data_error("damping factor must lie in (0,1)");

    std::vector<double> out_total(static_cast<std::size_t>(n), 0.0);
    for (const auto& [key, count] : table.counts)
        out_total[static_cast<std::size_t>(key.first - 1)] += static_cast<double>(count);

    std::vector<double> scores(static_cast<std::size_t>(n), 1.0 / n);
    std::vector<double> next(static_cast<std::size_t>(n));
    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        double dangling = 0.0;
        for (int i = 0; i < n; ++i)
            if (out_total[static_cast<std::size_t>(i)] == 0.0)
                dangling += scores[static_cast<std::size_t>(i)];
        const double base = (1.0 - opts.damping) / n + opts.damping * dangling / n;
        std::fill(next.begin(), next.end(), base);
        for (const auto& [key, count] : table.counts) {
            auto from = static_cast<std::size_t>(key.first - 1);
            auto to = static_cast<std::size_t>(key.second - 1);
            next[to] += opts.damping * scores[from] * static_cast<double>(count) / out_total[from];
        }
        double change = 0.0;
        for (int i = 0; i < n; ++i) change += std::abs(next[i] - scores[i]);
        scores.swap(next);
        if (change < opts.tol) break;
    }
    if (iter == opts.max_iter)
        throw compute_error("pagerank did not converge within " + std::to_string(opts.max_iter) +
                            " iterations");

    PageRankResult result;
    result.iterations = iter + 1;
    MeritVector merits;
    merits.theta.reserve(scores.size());
    for (double s : scores) merits.theta.push_back(-s);
    result.ranking = ranks_from_merits(merits);
    result.scores = std::move(scores);
    return result;
}

}  // namespace rankident

#include "rankident/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

namespace rankident {

using nlohmann::json;

namespace {

std::string timestamp_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

json report_to_json(const Report& report, bool with_timestamp) {
    json j;
    j["schema_version"] = 1;
    j["tool"] = "rankident";
    j["version"] = "0.1.0";
    j["command"] = report.command;
    if (with_timestamp) j["generated_at"] = timestamp_utc();
    j["config"] = report.config;
    j["warnings"] = report.warnings;
    j["results"] = report.results;
    return j;
}

json ranking_to_json(const Ranking& r) { return json(r.ranks()); }

json identified_set_to_json(const IdentifiedSet& s, const NamedTeams& teams) {
    json j;
    j["count"] = s.rankings.size();
    j["rankings"] = json::array();
    for (const Ranking& r : s.rankings) j["rankings"].push_back(ranking_to_json(r));
    json per_team = json::object();
    for (const auto& [team, ranks] : s.per_team)
        per_team[teams.names.at(static_cast<std::size_t>(team - 1))] = ranks;
    j["per_team"] = per_team;
    return j;
}

json test_outcome_to_json(const TestOutcome& outcome) {
    json j;
    j["statistic"] = outcome.statistic;
    j["p_value"] = outcome.p_value;
    j["method"] = to_string(outcome.method);
    j["alpha"] = outcome.alpha;
    j["reject"] = outcome.reject;
    json diag;
    diag["p_hat"] = outcome.diagnostics.p_hat;
    diag["p_star"] = outcome.diagnostics.p_star;
    if (outcome.method == TestMethod::finite_sample) {
        diag["least_favorable_p"] = outcome.diagnostics.fs_argmax;
        diag["optimizer_converged"] = outcome.diagnostics.fs_converged;
    } else {
        diag["replications"] = outcome.diagnostics.as_replications;
        diag["seed"] = outcome.diagnostics.as_seed;
    }
    j["diagnostics"] = diag;
    return j;
}

json rank_frequency_to_json(const RankFrequencyTable& table, const NamedTeams& teams) {
    json j;
    j["replications"] = table.replications;
    j["mean_set_cardinality"] = table.mean_set_cardinality;
    j["empty_set_count"] = table.empty_set_count;
    json rows = json::object();
    for (int t = 0; t < table.team_count; ++t) {
        json row;
        row["frequency"] = table.frequency[static_cast<std::size_t>(t)];
        row["std_error"] = table.std_error[static_cast<std::size_t>(t)];
        rows[teams.names.at(static_cast<std::size_t>(t))] = row;
    }
    j["per_team"] = rows;
    json accepted = json::array();
    for (const auto& [ranking, count] : table.ranking_accept_counts) {
        if (count == 0) continue;
        accepted.push_back({{"ranking", ranking_to_json(ranking)}, {"accepted", count}});
    }
    j["ranking_accept_counts"] = accepted;
    return j;
}

void write_rank_frequency_csv(const std::string& path, const RankFrequencyTable& table,
                              const NamedTeams& teams) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file '" + path + "'");
    out << "team";
    for (int r = 1; r <= table.team_count; ++r) out << ",rank_" << r;
    out << '\n';
    for (int t = 0; t < table.team_count; ++t) {
        out << teams.names.at(static_cast<std::size_t>(t));
        for (int r = 0; r < table.team_count; ++r)
            out << ',' << table.frequency[static_cast<std::size_t>(t)][static_cast<std::size_t>(r)];
        out << '\n';
    }
}

NamedTeams default_team_names(int q) {
    NamedTeams teams;
    for (int t = 1; t <= q; ++t) teams.names.push_back("T" + std::to_string(t));
    return teams;
}

}  // namespace rankident

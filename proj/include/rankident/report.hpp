#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "rankident/core.hpp"
#include "rankident/ident.hpp"
#include "rankident/inference.hpp"
#include "rankident/io.hpp"
#include "rankident/montecarlo.hpp"

namespace rankident {

// Self-contained machine-readable result envelope: rerunning the echoed
// config reproduces the results section byte for byte.
struct Report {
    std::string command;
    nlohmann::json config;
    nlohmann::json results;
    std::vector<std::string> warnings;
};

nlohmann::json report_to_json(const Report& report, bool with_timestamp = true);

nlohmann::json ranking_to_json(const Ranking& r);
nlohmann::json identified_set_to_json(const IdentifiedSet& s, const NamedTeams& teams);
nlohmann::json test_outcome_to_json(const TestOutcome& outcome);
nlohmann::json rank_frequency_to_json(const RankFrequencyTable& table, const NamedTeams& teams);

void write_rank_frequency_csv(const std::string& path, const RankFrequencyTable& table,
                              const NamedTeams& teams);

NamedTeams default_team_names(int q);

}  // namespace rankident

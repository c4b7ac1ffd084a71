#include "rankident/io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace rankident {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

long long parse_count(const std::string& s, const std::string& what, int line_no) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
    }
}

double parse_real(const std::string& s, const std::string& what, int line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw data_error("line " + std::to_string(line_no) + ": cannot parse " + what + " '" + s + "'");
    }
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open file '" + path + "'");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void expect_header(const std::vector<std::string>& lines, const std::vector<std::string>& fields,
                   const std::string& path) {
    if (lines.empty()) throw data_error("file '" + path + "' is empty");
    auto header = split_csv_row(lines[0]);
    if (header != fields) {
        std::string want;
        for (std::size_t i = 0; i < fields.size(); ++i) want += (i ? "," : "") + fields[i];
        throw data_error("file '" + path + "' must start with header '" + want + "'");
    }
}

int intern_name(std::vector<std::string>& names, const std::string& name) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<int>(it - names.begin()) + 1;
    names.push_back(name);
    return static_cast<int>(names.size());
}

}  // namespace

int NamedTeams::id_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw data_error("unknown team '" + name + "'");
    return static_cast<int>(it - names.begin()) + 1;
}

int TransitionTable::id_of(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw data_error("unknown entity '" + name + "'");
    return static_cast<int>(it - names.begin()) + 1;
}

NamedOutcomeData read_edges_csv(const std::string& path) {
    auto lines = read_lines(path);
    expect_header(lines, {"team_i", "team_j", "wins_i", "wins_j"}, path);

    NamedTeams teams;
    std::vector<std::pair<int, int>> edges;
    std::vector<long long> games, wins;
    std::map<std::pair<int, int>, int> seen;  // canonical pair -> line

    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const int line_no = static_cast<int>(ln) + 1;
        if (trim(lines[ln]).empty()) continue;
        auto row = split_csv_row(lines[ln]);
        if (row.size() != 4)
            throw data_error("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                             std::to_string(row.size()));
        if (row[0].empty() || row[1].empty())
            throw data_error("line " + std::to_string(line_no) + ": empty team name");
        int i = intern_name(teams.names, row[0]);
        int j = intern_name(teams.names, row[1]);
        if (i == j) throw data_error("line " + std::to_string(line_no) + ": a team cannot play itself");
        long long wi = parse_count(row[2], "wins_i", line_no);
        long long wj = parse_count(row[3], "wins_j", line_no);
        if (wi < 0 || wj < 0)
            throw data_error("line " + std::to_string(line_no) + ": negative win count");
        if (wi + wj < 1)
            throw data_error("line " + std::to_string(line_no) + ": pair has no games");
        std::pair<int, int> key{std::min(i, j), std::max(i, j)};
        if (auto it = seen.find(key); it != seen.end())
            throw data_error("line " + std::to_string(line_no) + ": duplicate pair '" + row[0] +
                             "'/'" + row[1] + "' (first seen on line " + std::to_string(it->second) +
                             ")");
        seen[key] = line_no;
        edges.push_back(key);
        games.push_back(wi + wj);
        wins.push_back(i < j ? wi : wj);
    }
    if (edges.empty()) throw data_error("file '" + path + "' contains no edges");

    TournamentGraph graph(static_cast<int>(teams.names.size()), edges);
    return {make_outcome_data(std::move(graph), std::move(games), std::move(wins)),
            std::move(teams)};
}

void write_edges_csv(const std::string& path, const OutcomeData& data, const NamedTeams& teams) {
    if (static_cast<int>(teams.names.size()) != data.graph.team_count())
        throw data_error("team names do not match the graph");
    std::ofstream out(path);
    if (!out) throw data_error("cannot write file '" + path + "'");
    out << "team_i,team_j,wins_i,wins_j\n";
    for (std::size_t e = 0; e < data.graph.edge_count(); ++e) {
        const Edge& edge = data.graph.edges()[e];
        out << teams.names[edge.a - 1] << ',' << teams.names[edge.b - 1] << ',' << data.wins[e]
            << ',' << data.games[e] - data.wins[e] << '\n';
    }
}

NamedProbabilityAssignment read_probs_csv(const std::string& path) {
    auto lines = read_lines(path);
    expect_header(lines, {"team_i", "team_j", "prob_i_beats_j"}, path);

    NamedTeams teams;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> probs;
    std::map<std::pair<int, int>, int> seen;

    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const int line_no = static_cast<int>(ln) + 1;
        if (trim(lines[ln]).empty()) continue;
        auto row = split_csv_row(lines[ln]);
        if (row.size() != 3)
            throw data_error("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(row.size()));
        int i = intern_name(teams.names, row[0]);
        int j = intern_name(teams.names, row[1]);
        if (i == j) throw data_error("line " + std::to_string(line_no) + ": a team cannot play itself");
        double p = parse_real(row[2], "prob_i_beats_j", line_no);
        if (!(p > 0.0 && p < 1.0))
            throw data_error("line " + std::to_string(line_no) +
                             ": probability must lie strictly inside (0,1)");
        std::pair<int, int> key{std::min(i, j), std::max(i, j)};
        if (auto it = seen.find(key); it != seen.end())
            throw data_error("line " + std::to_string(line_no) + ": duplicate pair (first seen on line " +
                             std::to_string(it->second) + ")");
        seen[key] = line_no;
        edges.push_back(key);
        probs.push_back(i < j ? p : 1.0 - p);
    }
    if (edges.empty()) throw data_error("file '" + path + "' contains no edges");

    TournamentGraph graph(static_cast<int>(teams.names.size()), edges);
    return {make_probability_assignment(std::move(graph), std::move(probs)), std::move(teams)};
}

TransitionTable read_transitions_csv(const std::string& path) {
    auto lines = read_lines(path);
    expect_header(lines, {"from", "to", "count"}, path);

    TransitionTable table;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const int line_no = static_cast<int>(ln) + 1;
        if (trim(lines[ln]).empty()) continue;
        auto row = split_csv_row(lines[ln]);
        if (row.size() != 3)
            throw data_error("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                             std::to_string(row.size()));
        if (row[0].empty() || row[1].empty())
            throw data_error("line " + std::to_string(line_no) + ": empty entity name");
        long long count = parse_count(row[2], "count", line_no);
        if (count < 0) throw data_error("line " + std::to_string(line_no) + ": negative count");
        int from = intern_name(table.names, row[0]);
        int to = intern_name(table.names, row[1]);
        if (from == to) {
            table.dropped_self_transitions += count;
            continue;
        }
        table.counts[{from, to}] += count;
    }
    return table;
}

NamedOutcomeData transitions_to_outcomes(const TransitionTable& table, long long min_games) {
    if (min_games < 1) throw data_error("min_games must be at least 1");

    std::map<std::pair<int, int>, std::pair<long long, long long>> pair_counts;
    for (const auto& [key, count] : table.counts) {
        auto [from, to] = key;
        auto canon = std::make_pair(std::min(from, to), std::max(from, to));
        if (from < to)
            pair_counts[canon].first += count;  // moves lower -> higher
        else
            pair_counts[canon].second += count;  // moves higher -> lower
    }

    // Keep entities touched by a retained pair, renumbered densely.
    NamedTeams teams;
    std::vector<std::pair<int, int>> edges;
    std::vector<long long> games, wins;
    for (const auto& [pair, moves] : pair_counts) {
        auto [up, down] = moves;  // up: a->b, down: b->a
        long long total = up + down;
        if (total < min_games) continue;
        int a = intern_name(teams.names, table.names[pair.first - 1]);
        int b = intern_name(teams.names, table.names[pair.second - 1]);
        edges.emplace_back(std::min(a, b), std::max(a, b));
        games.push_back(total);
        // A move into a team is a win for that team, and the stored count
        // belongs to the lower renumbered id.
        wins.push_back(a < b ? down : up);
    }
    if (edges.empty())
        throw data_error("no pair reaches " + std::to_string(min_games) + " transitions");

    TournamentGraph graph(static_cast<int>(teams.names.size()), edges);
    return {make_outcome_data(std::move(graph), std::move(games), std::move(wins)),
            std::move(teams)};
}

}  // namespace rankident

#include "rankident/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "rankident/pagerank.hpp"
#include "rankident/report.hpp"

namespace rankident {

namespace {

using nlohmann::json;

void emit_report(const Report& report, const std::string& out_path, std::ostream& out) {
    std::string text = report_to_json(report).dump(2);
    text += '\n';
    if (out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(out_path);
        if (!file) throw data_error("cannot write report to '" + out_path + "'");
        file << text;
    }
}

Ranking parse_ranking_arg(const std::string& arg, int q) {
    std::vector<int> ranks;
    std::stringstream ss(arg);
    std::string field;
    while (std::getline(ss, field, ',')) {
        try {
            ranks.push_back(std::stoi(field));
        } catch (const std::exception&) {
            throw data_error("cannot parse rank '" + field + "' in ranking argument");
        }
    }
    if (static_cast<int>(ranks.size()) != q)
        throw data_error("ranking argument has " + std::to_string(ranks.size()) +
                         " entries but the data cover " + std::to_string(q) + " teams");
    return Ranking(ranks);  // validates the rank consistency law
}

json variables_json(const ConstraintSystem& cs, const NamedTeams& teams) {
    json vars = json::array();
    for (std::size_t v = 0; v < cs.var_count(); ++v) {
        DirectedEdge d = cs.var_edge(v);
        vars.push_back({{"team", teams.names.at(static_cast<std::size_t>(d.team - 1))},
                        {"opponent", teams.names.at(static_cast<std::size_t>(d.opponent - 1))},
                        {"tied", cs.var_tied(v)}});
    }
    return vars;
}

struct OutcomeInput {
    std::string edges_path;
    std::string transitions_path;
    long long min_games = 20;

    void attach(CLI::App* cmd) {
        auto* edges = cmd->add_option("--edges", edges_path, "edge results CSV");
        auto* trans =
            cmd->add_option("--transitions", transitions_path, "directed transition counts CSV");
        cmd->add_option("--min-games", min_games,
                        "minimum total transitions for a pair (with --transitions)");
        edges->excludes(trans);
    }

    NamedOutcomeData load(std::vector<std::string>* warnings) const {
        if (!edges_path.empty()) return read_edges_csv(edges_path);
        if (transitions_path.empty()) throw data_error("need --edges or --transitions");
        TransitionTable table = read_transitions_csv(transitions_path);
        if (table.dropped_self_transitions > 0 && warnings)
            warnings->push_back("dropped " + std::to_string(table.dropped_self_transitions) +
                                " self-transitions");
        return transitions_to_outcomes(table, min_games);
    }

    json config() const {
        json j;
        if (!edges_path.empty()) {
            j["edges"] = edges_path;
        } else {
            j["transitions"] = transitions_path;
            j["min_games"] = min_games;
        }
        return j;
    }
};

ExperimentConfig experiment_from_json(const json& cfg) {
    ExperimentConfig out;
    std::vector<std::string> names = cfg.at("teams").get<std::vector<std::string>>();
    NamedTeams teams;
    teams.names = names;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> probs;
    for (const auto& e : cfg.at("edges")) {
        int i = teams.id_of(e.at("team_i").get<std::string>());
        int j = teams.id_of(e.at("team_j").get<std::string>());
        double p = e.at("p").get<double>();
        edges.emplace_back(std::min(i, j), std::max(i, j));
        probs.push_back(i < j ? p : 1.0 - p);
    }
    TournamentGraph graph(static_cast<int>(names.size()), edges);
    out.dgp = make_probability_assignment(std::move(graph), std::move(probs));
    out.games_per_edge = cfg.at("games_per_edge").get<long long>();
    out.replications = cfg.at("replications").get<int>();
    out.alpha = cfg.at("alpha").get<double>();
    out.method = parse_method(cfg.at("method").get<std::string>());
    out.seed = cfg.at("seed").get<std::uint64_t>();
    out.allow_ties = cfg.value("allow_ties", false);
    out.test.as.replications = cfg.value("pvalue_reps", out.test.as.replications);
    out.test.fs.tuple_budget = cfg.value("tuple_budget", out.test.fs.tuple_budget);
    return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"identified sets and tests for rankings from pairwise interaction data"};
    app.require_subcommand(1);

    // ident
    auto* ident_cmd = app.add_subcommand("ident", "identified set from edge win probabilities");
    std::string ident_probs, ident_out;
    bool ident_ties = false;
    double ident_tol = 0.0;
    ident_cmd->add_option("--probs", ident_probs, "probability CSV")->required();
    ident_cmd->add_flag("--ties", ident_ties, "enumerate weak orderings instead of permutations");
    ident_cmd->add_option("--tol", ident_tol, "equality tolerance for sign comparisons");
    ident_cmd->add_option("--out", ident_out, "write the JSON report here");

    // test
    auto* test_cmd = app.add_subcommand("test", "test whether a ranking fits the data");
    OutcomeInput test_input;
    test_input.attach(test_cmd);
    std::string test_ranking_arg, test_method = "fs", test_out;
    double test_alpha = 0.1;
    std::uint64_t test_seed = 987654321;
    int test_reps = 20000;
    long long test_budget = 10'000'000;
    test_cmd->add_option("--ranking", test_ranking_arg, "comma-separated ranks, one per team")
        ->required();
    test_cmd->add_option("--alpha", test_alpha, "significance level");
    test_cmd->add_option("--method", test_method, "fs (finite sample) or as (asymptotic)");
    test_cmd->add_option("--seed", test_seed, "simulation seed (asymptotic p-value)");
    test_cmd->add_option("--reps", test_reps, "simulation replications (asymptotic p-value)");
    test_cmd->add_option("--budget", test_budget, "outcome enumeration budget (finite sample)");
    test_cmd->add_option("--out", test_out, "write the JSON report here");

    // confset
    auto* conf_cmd = app.add_subcommand("confset", "confidence set of rankings by test inversion");
    OutcomeInput conf_input;
    conf_input.attach(conf_cmd);
    std::string conf_method = "fs", conf_out;
    double conf_alpha = 0.1;
    std::uint64_t conf_seed = 987654321;
    int conf_reps = 20000;
    long long conf_budget = 10'000'000;
    bool conf_ties = false;
    conf_cmd->add_option("--alpha", conf_alpha, "significance level");
    conf_cmd->add_option("--method", conf_method, "fs or as");
    conf_cmd->add_flag("--ties", conf_ties, "include weak orderings");
    conf_cmd->add_option("--seed", conf_seed, "simulation seed (asymptotic p-value)");
    conf_cmd->add_option("--reps", conf_reps, "simulation replications (asymptotic p-value)");
    conf_cmd->add_option("--budget", conf_budget, "outcome enumeration budget (finite sample)");
    conf_cmd->add_option("--out", conf_out, "write the JSON report here");

    // mc
    auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo experiment from a config file");
    std::string mc_config, mc_out, mc_csv;
    mc_cmd->add_option("--config", mc_config, "experiment config JSON")->required();
    mc_cmd->add_option("--out", mc_out, "write the JSON report here");
    mc_cmd->add_option("--csv", mc_csv, "also write the frequency table as CSV");

    // btl
    auto* btl_cmd = app.add_subcommand("btl", "recover merits under the logistic link");
    std::string btl_probs, btl_norm, btl_out;
    double btl_tol = 1e-8;
    btl_cmd->add_option("--probs", btl_probs, "probability CSV")->required();
    btl_cmd->add_option("--normalize", btl_norm, "TEAM=VALUE merit normalization");
    btl_cmd->add_option("--tol", btl_tol, "non-tree edge consistency tolerance");
    btl_cmd->add_option("--out", btl_out, "write the JSON report here");

    // pagerank
    auto* pr_cmd = app.add_subcommand("pagerank", "rank entities of a transition table");
    std::string pr_trans, pr_out;
    PageRankOptions pr_opts;
    pr_cmd->add_option("--transitions", pr_trans, "directed transition counts CSV")->required();
    pr_cmd->add_option("--damping", pr_opts.damping, "damping factor");
    pr_cmd->add_option("--tol", pr_opts.tol, "L1 convergence tolerance");
    pr_cmd->add_option("--max-iter", pr_opts.max_iter, "iteration cap");
    pr_cmd->add_option("--out", pr_out, "write the JSON report here");

    std::vector<const char*> argv;
    static const std::string kProg = "rankident";
    argv.push_back(kProg.c_str());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::stringstream help;
        help << app.help();
        out << help.str();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }

    if (ident_cmd->parsed()) {
        auto [probs, teams] = read_probs_csv(ident_probs);
        IdentOptions opts;
        opts.tol = ident_tol;
        IdentifiedSet set = identified_set(probs, probs.graph, ident_ties, opts);
        Report report;
        report.command = "ident";
        report.config = {{"probs", ident_probs}, {"ties", ident_ties}, {"tol", ident_tol}};
        report.results = {{"teams", teams.names},
                          {"identified_set", identified_set_to_json(set, teams)}};
        emit_report(report, ident_out, out);
        return 0;
    }

    if (test_cmd->parsed()) {
        Report report;
        report.command = "test";
        auto [data, teams] = test_input.load(&report.warnings);
        Ranking r = parse_ranking_arg(test_ranking_arg, data.graph.team_count());
        TestOptions opts;
        opts.as.seed = test_seed;
        opts.as.replications = test_reps;
        opts.fs.tuple_budget = test_budget;
        TestOutcome outcome =
            test_ranking(data, r, test_alpha, parse_method(test_method), opts);
        report.config = test_input.config();
        report.config["ranking"] = r.ranks();
        report.config["alpha"] = test_alpha;
        report.config["method"] = test_method;
        report.config["seed"] = test_seed;
        report.config["reps"] = test_reps;
        report.config["budget"] = test_budget;
        ConstraintSystem cs = build_constraint_system(data.graph, r);
        report.results = {{"teams", teams.names},
                          {"variables", variables_json(cs, teams)},
                          {"test", test_outcome_to_json(outcome)}};
        emit_report(report, test_out, out);
        return 0;
    }

    if (conf_cmd->parsed()) {
        Report report;
        report.command = "confset";
        auto [data, teams] = conf_input.load(&report.warnings);
        TestOptions opts;
        opts.as.seed = conf_seed;
        opts.as.replications = conf_reps;
        opts.fs.tuple_budget = conf_budget;
        const TestMethod method = parse_method(conf_method);

        IdentifiedSet set;
        json tests = json::array();
        const int q = data.graph.team_count();
        for (const Ranking& r : enumerate_rankings(q, conf_ties)) {
            TestOutcome res = test_ranking(data, r, conf_alpha, method, opts);
            tests.push_back({{"ranking", ranking_to_json(r)},
                             {"p_value", res.p_value},
                             {"reject", res.reject}});
            if (!res.reject) set.rankings.push_back(r);
        }
        for (int t = 1; t <= q; ++t) set.per_team.emplace(t, std::set<int>{});
        for (const Ranking& r : set.rankings)
            for (int t = 1; t <= q; ++t) set.per_team[t].insert(r.rank_of(t));

        report.config = conf_input.config();
        report.config["alpha"] = conf_alpha;
        report.config["method"] = conf_method;
        report.config["ties"] = conf_ties;
        report.config["seed"] = conf_seed;
        report.config["reps"] = conf_reps;
        report.config["budget"] = conf_budget;
        report.results = {{"teams", teams.names},
                          {"confidence_set", identified_set_to_json(set, teams)},
                          {"tests", tests}};
        emit_report(report, conf_out, out);
        return 0;
    }

    if (mc_cmd->parsed()) {
        std::ifstream in(mc_config);
        if (!in) throw data_error("cannot open config '" + mc_config + "'");
        json cfg_json;
        try {
            in >> cfg_json;
        } catch (const json::exception& e) {
            throw data_error("config '" + mc_config + "' is not valid JSON: " + e.what());
        }
        ExperimentConfig cfg = experiment_from_json(cfg_json);
        NamedTeams teams;
        teams.names = cfg_json.at("teams").get<std::vector<std::string>>();
        RankFrequencyTable table = run_experiment(cfg);
        if (!mc_csv.empty()) write_rank_frequency_csv(mc_csv, table, teams);
        Report report;
        report.command = "mc";
        report.config = cfg_json;
        report.results = {{"table", rank_frequency_to_json(table, teams)}};
        emit_report(report, mc_out, out);
        return 0;
    }

    if (btl_cmd->parsed()) {
        auto [probs, teams] = read_probs_csv(btl_probs);
        int norm_team = 1;
        double norm_value = 0.0;
        if (!btl_norm.empty()) {
            auto eq = btl_norm.find('=');
            if (eq == std::string::npos)
                throw data_error("--normalize expects TEAM=VALUE, got '" + btl_norm + "'");
            norm_team = teams.id_of(btl_norm.substr(0, eq));
            try {
                norm_value = std::stod(btl_norm.substr(eq + 1));
            } catch (const std::exception&) {
                throw data_error("cannot parse normalization value in '" + btl_norm + "'");
            }
        }
        MeritVector merits =
            solve_linear_parametric(probs, probs.graph, btl_link(), norm_team, norm_value, btl_tol);
        Ranking implied = ranks_from_merits(merits);
        json by_team = json::object();
        for (std::size_t t = 0; t < teams.names.size(); ++t)
            by_team[teams.names[t]] = merits.theta[t];
        Report report;
        report.command = "btl";
        report.config = {{"probs", btl_probs},
                         {"normalize", teams.names.at(static_cast<std::size_t>(norm_team - 1)) +
                                           "=" + std::to_string(norm_value)},
                         {"tol", btl_tol}};
        report.results = {{"teams", teams.names},
                          {"merits", by_team},
                          {"ranking", ranking_to_json(implied)}};
        emit_report(report, btl_out, out);
        return 0;
    }

    if (pr_cmd->parsed()) {
        TransitionTable table = read_transitions_csv(pr_trans);
        Report report;
        report.command = "pagerank";
        if (table.dropped_self_transitions > 0)
            report.warnings.push_back("dropped " + std::to_string(table.dropped_self_transitions) +
                                      " self-transitions");
        PageRankResult result = pagerank(table, pr_opts);
        json scores = json::object();
        for (std::size_t t = 0; t < table.names.size(); ++t)
            scores[table.names[t]] = result.scores[t];
        report.config = {{"transitions", pr_trans},
                         {"damping", pr_opts.damping},
                         {"tol", pr_opts.tol},
                         {"max_iter", pr_opts.max_iter}};
        report.results = {{"entities", table.names},
                          {"scores", scores},
                          {"ranking", ranking_to_json(result.ranking)},
                          {"iterations", result.iterations}};
        emit_report(report, pr_out, out);
        return 0;
    }

    err << "no subcommand selected\n";
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const data_error& e) {
        err << "data error: " << e.what() << "\n";
        return 2;
    } catch (const compute_error& e) {
        err << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace rankident

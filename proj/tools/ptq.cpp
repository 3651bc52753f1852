#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ptq/csts.hpp"
#include "ptq/errors.hpp"
#include "ptq/ext.hpp"
#include "ptq/fpt.hpp"
#include "ptq/fuzz.hpp"
#include "ptq/graph.hpp"
#include "ptq/io.hpp"
#include "ptq/parse.hpp"
#include "ptq/pattern_tree.hpp"
#include "ptq/treewidth.hpp"

namespace {

constexpr int kExitYes = 0;
constexpr int kExitNo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

ptq::PatternTree load_query(const std::string& path, bool quiet) {
    std::string text = ptq::read_file(path);
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{')
        return ptq::pattern_tree_from_json(nlohmann::json::parse(text));
    std::vector<std::string> warnings;
    ptq::PatternTree p = ptq::parse_query(text, warnings);
    if (!quiet)
        for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return p;
}

ptq::Mapping load_mapping(const std::string& arg) {
    std::string text = arg;
    size_t first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') text = ptq::read_file(arg);
    return ptq::mapping_from_json(nlohmann::json::parse(text));
}

void check_mapping_vars(const ptq::PatternTree& p, const ptq::Mapping& mu) {
    for (const auto& [v, c] : mu)
        if (!p.free_vars().count(v))
            throw ptq::UsageError("mapping binds ?" + v + ", which is not a free variable");
}

void add_limit_flags(CLI::App* cmd, ptq::Limits& limits) {
    cmd->add_option("--width-budget", limits.width_budget,
                    "max treewidth solved by decomposition DP");
    cmd->add_option("--core-limit", limits.core_domain_limit, "core search domain limit");
    cmd->add_option("--tw-limit", limits.tw_vertex_limit, "exact treewidth vertex limit");
    cmd->add_option("--oracle-vars", limits.oracle_max_vars, "brute-force oracle variable budget");
    cmd->add_option("--oracle-dom", limits.oracle_max_dom, "brute-force oracle constant budget");
    cmd->add_option("--subtree-cap", limits.subtree_cap, "root-subtree enumeration cap");
    cmd->add_option("--combo-cap", limits.combo_cap, "analyzer combination cap");
    cmd->add_option("--stop-width-cap", limits.stop_width_cap, "stop-set width cap");
    cmd->add_flag("--strict", limits.strict_symbols, "missing relations are errors");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pattern tree query engine and tractability analyzer"};
    app.require_subcommand(1);

    ptq::Limits limits;

    // eval
    auto* eval = app.add_subcommand("eval", "decide whether a mapping is an answer");
    std::string eval_query, eval_data, eval_mapping, eval_engine = "auto";
    bool eval_json = false;
    eval->add_option("query", eval_query, "query file (text or JSON)")->required();
    eval->add_option("data", eval_data, "fact file")->required();
    eval->add_option("mapping", eval_mapping, "mapping JSON (file or inline)")->required();
    eval->add_option("--engine", eval_engine, "auto|brute|csts|fpt")
        ->check(CLI::IsMember({"auto", "brute", "csts", "fpt"}));
    eval->add_flag("--json", eval_json, "JSON result on stdout");
    add_limit_flags(eval, limits);

    // solve
    auto* solve = app.add_subcommand("solve", "enumerate all answers (oracle)");
    std::string solve_query, solve_data;
    bool solve_json = false;
    solve->add_option("query", solve_query)->required();
    solve->add_option("data", solve_data)->required();
    solve->add_flag("--json", solve_json);
    add_limit_flags(solve, limits);

    // analyze
    auto* analyze = app.add_subcommand("analyze", "static tractability report");
    std::string analyze_query;
    int analyze_c = 1;
    bool analyze_json = false;
    analyze->add_option("query", analyze_query)->required();
    analyze->add_option("--c", analyze_c, "threshold for the tractability conditions");
    analyze->add_flag("--json", analyze_json);
    add_limit_flags(analyze, limits);

    // csts
    auto* csts_cmd = app.add_subcommand("csts", "surviving child-test pairs with extcore widths");
    std::string csts_query;
    csts_cmd->add_option("query", csts_query)->required();
    add_limit_flags(csts_cmd, limits);

    // extcore
    auto* extcore_cmd = app.add_subcommand("extcore", "extension core of a pair file");
    std::string extcore_pair;
    bool extcore_json = false;
    extcore_cmd->add_option("pair", extcore_pair, "fact file with an #anchor section")->required();
    extcore_cmd->add_flag("--json", extcore_json);
    add_limit_flags(extcore_cmd, limits);

    // ext
    auto* ext_cmd = app.add_subcommand("ext", "decide an extension problem instance");
    std::string ext_pair, ext_data, ext_bindings, ext_engine = "extcore";
    ext_cmd->add_option("pair", ext_pair, "fact file with an #anchor section")->required();
    ext_cmd->add_option("data", ext_data, "target fact file")->required();
    ext_cmd->add_option("bindings", ext_bindings, "anchor homomorphism JSON")->required();
    ext_cmd->add_option("--engine", ext_engine)->check(CLI::IsMember({"extcore", "brute"}));
    add_limit_flags(ext_cmd, limits);

    // treewidth
    auto* tw_cmd = app.add_subcommand("treewidth", "treewidth of a fact file's Gaifman graph");
    std::string tw_data;
    int tw_cap = -1;
    bool tw_upper_only = false;
    tw_cmd->add_option("data", tw_data)->required();
    tw_cmd->add_option("--cap", tw_cap, "report Exceeded when the width is above this");
    tw_cmd->add_flag("--upper", tw_upper_only, "min-fill upper bound only");
    add_limit_flags(tw_cmd, limits);

    // fuzz
    auto* fuzz_cmd = app.add_subcommand("fuzz", "differential testing against the oracle");
    long fuzz_trials = 100;
    uint64_t fuzz_seed = 0;
    std::string fuzz_shape = "any";
    ptq::FuzzKnobs knobs;
    fuzz_cmd->add_option("--trials", fuzz_trials);
    fuzz_cmd->add_option("--seed", fuzz_seed);
    fuzz_cmd->add_option("--shape", fuzz_shape)
        ->check(CLI::IsMember({"any", "pf", "wd", "simple"}));
    fuzz_cmd->add_option("--nodes", knobs.max_nodes);
    fuzz_cmd->add_option("--atoms", knobs.max_atoms_per_node);
    fuzz_cmd->add_option("--arity", knobs.max_arity);
    fuzz_cmd->add_option("--vars", knobs.max_vars);
    fuzz_cmd->add_option("--dom", knobs.max_dom);
    add_limit_flags(fuzz_cmd, limits);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*eval) {
            ptq::PatternTree p = load_query(eval_query, eval_json);
            ptq::Structure db = ptq::parse_facts(ptq::read_file(eval_data));
            ptq::Mapping mu = load_mapping(eval_mapping);
            check_mapping_vars(p, mu);
            std::string engine = eval_engine;
            if (engine == "auto") {
                if (ptq::is_projection_free(p)) engine = "csts";
                else if (ptq::is_well_designed(p)) engine = "fpt";
                else engine = "brute";
            }
            bool yes;
            if (engine == "csts") yes = ptq::eval_projection_free(p, db, mu, limits);
            else if (engine == "fpt") yes = ptq::eval_fpt(p, db, mu, limits);
            else yes = ptq::is_solution_bruteforce(p, db, mu, limits);
            if (eval_json) {
                nlohmann::json j{{"answer", yes}, {"engine", engine}};
                std::cout << j.dump() << "\n";
            } else {
                std::cout << (yes ? "yes" : "no") << "\n";
            }
            return yes ? kExitYes : kExitNo;
        }
        if (*solve) {
            ptq::PatternTree p = load_query(solve_query, solve_json);
            ptq::Structure db = ptq::parse_facts(ptq::read_file(solve_data));
            auto answers = ptq::all_solutions_bruteforce(p, db, limits);
            if (solve_json) {
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& m : answers) arr.push_back(ptq::mapping_to_json(m));
                std::cout << arr.dump() << "\n";
            } else {
                for (const auto& m : answers) std::cout << ptq::mapping_to_json(m).dump() << "\n";
                std::cerr << answers.size() << " answer(s)\n";
            }
            return kExitYes;
        }
        if (*analyze) {
            ptq::PatternTree p = load_query(analyze_query, analyze_json);
            ptq::TractabilityReport rep = ptq::check_conditions(p, analyze_c, limits.combo_cap, limits);
            nlohmann::json j = ptq::report_to_json(rep);
            if (analyze_json) {
                std::cout << j.dump() << "\n";
            } else {
                std::cout << j.dump(2) << "\n";
            }
            return kExitYes;
        }
        if (*csts_cmd) {
            ptq::PatternTree p = load_query(csts_query, true);
            auto pairs = ptq::csts_all(p, limits.subtree_cap, limits);
            std::cout << ptq::critical_pairs_to_json(pairs, limits).dump(2) << "\n";
            return kExitYes;
        }
        if (*extcore_cmd) {
            ptq::ExtensionPair pair = ptq::parse_pair_file(ptq::read_file(extcore_pair));
            ptq::Structure e = ptq::extension_core(pair, limits);
            if (extcore_json) {
                nlohmann::json j;
                j["facts"] = ptq::write_facts(e);
                ptq::TwValue tw = ptq::structure_treewidth(e, limits);
                j["treewidth"] = {{"lower", tw.lower}, {"upper", tw.upper}, {"exact", tw.exact}};
                std::cout << j.dump() << "\n";
            } else {
                std::cout << ptq::write_facts(e);
            }
            return kExitYes;
        }
        if (*ext_cmd) {
            ptq::ExtensionPair pair = ptq::parse_pair_file(ptq::read_file(ext_pair));
            ptq::Structure db = ptq::parse_facts(ptq::read_file(ext_data));
            ptq::Mapping h = load_mapping(ext_bindings);
            // Marker anchors need their image facts in the target.
            ptq::Structure target =
                ptq::union_structures(db, ptq::marking_facts(pair.anchor.domain, h));
            bool has_marks = false;
            for (const auto& [sym, tuples] : pair.anchor.relations)
                if (ptq::is_marking_symbol(sym)) has_marks = true;
            ptq::ExtInstance inst =
                ptq::make_ext_instance(pair, has_marks ? target : db, std::move(h));
            bool yes = ext_engine == "brute" ? ptq::ext_bruteforce(inst, limits)
                                             : ptq::ext_via_extcore(inst, limits);
            std::cout << (yes ? "yes" : "no") << "\n";
            return yes ? kExitYes : kExitNo;
        }
        if (*tw_cmd) {
            ptq::Structure s = ptq::parse_facts(ptq::read_file(tw_data));
            ptq::Graph g = ptq::gaifman_graph(s);
            nlohmann::json j;
            j["vertices"] = g.vertices.size();
            if (tw_upper_only) {
                ptq::TreeDecomposition td = ptq::treewidth_upper(g);
                j["width"] = td.width;
                j["exact"] = false;
                std::cout << j.dump() << "\n";
                return kExitYes;
            }
            int cap = tw_cap < 0 ? static_cast<int>(g.vertices.size()) : tw_cap;
            auto td = ptq::treewidth_exact(g, cap, limits);
            if (!td) {
                j["exceeded"] = true;
                j["cap"] = cap;
                std::cout << j.dump() << "\n";
                return kExitNo;
            }
            j["width"] = td->width;
            j["exact"] = true;
            nlohmann::json bags = nlohmann::json::array();
            for (const auto& b : td->bags) bags.push_back(b);
            j["bags"] = std::move(bags);
            std::cout << j.dump() << "\n";
            return kExitYes;
        }
        if (*fuzz_cmd) {
            if (fuzz_shape == "pf") knobs.shape = ptq::FuzzKnobs::Shape::ProjectionFree;
            else if (fuzz_shape == "wd") knobs.shape = ptq::FuzzKnobs::Shape::WellDesigned;
            else if (fuzz_shape == "simple") knobs.shape = ptq::FuzzKnobs::Shape::SimpleWellDesigned;
            ptq::FuzzResult r = ptq::run_fuzz(fuzz_seed, fuzz_trials, knobs, limits, &std::cerr);
            std::cout << "trials: " << r.trials << "\n";
            std::cout << "checks: " << r.checked << "\n";
            std::cout << "divergences: " << r.divergences << "\n";
            for (const auto& rep : r.reports) std::cout << rep << "\n";
            return r.divergences == 0 ? kExitYes : kExitNo;
        }
    } catch (const ptq::LimitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitBudget;
    } catch (const ptq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

#include "ptq/fuzz.hpp"

#include <algorithm>
#include <functional>
#include <optional>

#include "ptq/csts.hpp"
#include "ptq/errors.hpp"
#include "ptq/fpt.hpp"
#include "ptq/io.hpp"
#include "ptq/parse.hpp"

namespace ptq {

namespace {

int pick(Rng& rng, int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

template <typename T>
const T& choose(Rng& rng, const std::vector<T>& v) {
    return v[static_cast<size_t>(pick(rng, 0, static_cast<int>(v.size()) - 1))];
}

}  // namespace

PatternTree random_pattern_tree(Rng& rng, const FuzzKnobs& knobs) {
    const bool wd = knobs.shape == FuzzKnobs::Shape::WellDesigned ||
                    knobs.shape == FuzzKnobs::Shape::SimpleWellDesigned;
    const bool fresh_symbols = knobs.shape == FuzzKnobs::Shape::SimpleWellDesigned;
    int n = pick(rng, 1, knobs.max_nodes);

    std::vector<std::string> var_pool;
    for (int i = 0; i < knobs.max_vars; ++i) var_pool.push_back("x" + std::to_string(i));
    std::vector<std::pair<std::string, int>> symbols;  // name, arity
    int symbol_seq = 0;
    if (!fresh_symbols) {
        for (int i = 0; i < knobs.symbol_pool; ++i)
            symbols.push_back({"r" + std::to_string(i), pick(rng, 1, knobs.max_arity)});
    }

    PatternTree p;
    std::vector<int> parents(n, -1);
    for (int i = 1; i < n; ++i) parents[i] = pick(rng, 0, i - 1);

    // For well-designed shapes a node may use variables of its parent's
    // atoms or variables never used before; that keeps occurrences connected.
    std::set<std::string> used_anywhere;
    std::vector<std::set<std::string>> node_universe(n);
    std::vector<int> node_index(n, -1);
    for (int i = 0; i < n; ++i) {
        std::set<Atom> atoms;
        std::vector<std::string> allowed;
        if (wd) {
            std::set<std::string> universe;
            if (i > 0) {
                int parent = node_index[parents[i]];
                universe = p.vars_of(parent);
            }
            int fresh = pick(rng, i == 0 ? 1 : 0, 2);
            for (const auto& v : var_pool) {
                if (fresh == 0) break;
                if (!used_anywhere.count(v)) {
                    universe.insert(v);
                    --fresh;
                }
            }
            // No inheritable or fresh variables left: the node stays empty,
            // since any reused variable would break occurrence connectivity.
            allowed.assign(universe.begin(), universe.end());
        } else {
            allowed = var_pool;
        }
        int natoms = allowed.empty() ? 0 : pick(rng, i == 0 ? 0 : 1, knobs.max_atoms_per_node);
        for (int a = 0; a < natoms; ++a) {
            std::pair<std::string, int> sym;
            if (fresh_symbols)
                sym = {"s" + std::to_string(symbol_seq++), pick(rng, 1, knobs.max_arity)};
            else
                sym = choose(rng, symbols);
            Atom atom;
            atom.symbol = Symbol{sym.first, {}};
            for (int k = 0; k < sym.second; ++k) {
                const std::string& v = choose(rng, allowed);
                atom.args.push_back(Term::var(v));
                used_anywhere.insert(v);
            }
            atoms.insert(std::move(atom));
        }
        node_index[i] = p.add_node(i == 0 ? -1 : node_index[parents[i]], std::move(atoms));
    }

    auto vars = p.all_vars();
    if (knobs.shape == FuzzKnobs::Shape::ProjectionFree) {
        p.set_free_vars(vars);
    } else {
        std::set<std::string> fv;
        for (const auto& v : vars)
            if (pick(rng, 0, 1) == 1) fv.insert(v);
        if (fv.empty() && !vars.empty()) fv.insert(*vars.begin());
        p.set_free_vars(std::move(fv));
    }
    return p;
}

Structure random_database(Rng& rng, const FuzzKnobs& knobs, const PatternTree& p) {
    Structure db;
    int dom = pick(rng, 1, knobs.max_dom);
    std::vector<Value> constants;
    for (int i = 0; i < dom; ++i) {
        constants.push_back("c" + std::to_string(i));
        db.add_element(constants.back());
    }
    std::map<Symbol, int> arity;
    for (const auto& n : p.nodes())
        for (const auto& a : n.atoms) arity.emplace(a.symbol, static_cast<int>(a.args.size()));
    for (const auto& [sym, k] : arity) {
        int count = pick(rng, 0, 2 * dom);
        for (int i = 0; i < count; ++i) {
            Tuple t;
            for (int j = 0; j < k; ++j) t.push_back(choose(rng, constants));
            db.add_tuple(sym, std::move(t));
        }
    }
    return db;
}

std::vector<Mapping> candidate_mappings(Rng& rng, const FuzzKnobs& knobs, const PatternTree& p,
                                        const Structure& db, const std::set<Mapping>& answers) {
    std::set<Mapping> out(answers.begin(), answers.end());
    std::vector<Value> constants(db.domain.begin(), db.domain.end());
    std::vector<std::string> fv(p.free_vars().begin(), p.free_vars().end());
    for (const auto& m : answers) {
        if (!m.empty()) {
            Mapping mutated = m;
            auto it = mutated.begin();
            std::advance(it, pick(rng, 0, static_cast<int>(mutated.size()) - 1));
            it->second = choose(rng, constants);
            out.insert(std::move(mutated));
            Mapping dropped = m;
            auto it2 = dropped.begin();
            std::advance(it2, pick(rng, 0, static_cast<int>(dropped.size()) - 1));
            dropped.erase(it2);
            out.insert(std::move(dropped));
        }
    }
    for (int i = 0; i < knobs.extra_mappings && !fv.empty(); ++i) {
        Mapping m;
        for (const auto& v : fv)
            if (pick(rng, 0, 1) == 1) m.emplace(v, choose(rng, constants));
        out.insert(std::move(m));
    }
    out.insert(Mapping{});
    return {out.begin(), out.end()};
}

namespace {

enum class Engine { ProjectionFree, Fpt };

std::optional<bool> run_engine(Engine e, const PatternTree& p, const Structure& db,
                               const Mapping& mu, const Limits& limits) {
    try {
        if (e == Engine::ProjectionFree) return eval_projection_free(p, db, mu, limits);
        return eval_fpt(p, db, mu, limits);
    } catch (const LimitError&) {
        return std::nullopt;  // out of budget, not a divergence
    }
}

std::string describe(const PatternTree& p, const Structure& db, const Mapping& mu,
                     const char* engine, bool got, bool want) {
    nlohmann::json j;
    j["engine"] = engine;
    j["query"] = to_query_text(p);
    j["tree"] = pattern_tree_to_json(p);
    j["facts"] = write_facts(db);
    j["mapping"] = mapping_to_json(mu);
    j["engineAnswer"] = got;
    j["oracleAnswer"] = want;
    return j.dump();
}

// Greedy shrink: drop leaves, atoms, and tuples while the divergence holds.
void minimize(Engine e, PatternTree& p, Structure& db, const Mapping& mu, const Limits& limits) {
    auto diverges = [&](const PatternTree& q, const Structure& d) -> bool {
        for (const auto& [v, c] : mu)
            if (!q.free_vars().count(v)) return false;
        try {
            bool want = is_solution_bruteforce(q, d, mu, limits);
            auto got = run_engine(e, q, d, mu, limits);
            return got && *got != want;
        } catch (const Error&) {
            return false;
        }
    };
    bool changed = true;
    while (changed) {
        changed = false;
        // Leaf removal, keeping ids stable through rebuilds.
        for (int i = p.size() - 1; i > 0; --i) {
            if (!p.node(i).children.empty()) continue;
            PatternTree q;
            std::map<int, int> remap;
            for (int n : p.preorder()) {
                if (n == i) continue;
                remap[n] = q.add_node(n == 0 ? -1 : remap.at(p.node(n).parent), p.node(n).atoms,
                                      p.node(n).id);
            }
            std::set<std::string> fv;
            for (const auto& v : q.all_vars())
                if (p.free_vars().count(v)) fv.insert(v);
            q.set_free_vars(is_projection_free(p) ? q.all_vars() : fv);
            if (diverges(q, db)) {
                p = std::move(q);
                changed = true;
                break;
            }
        }
        if (changed) continue;
        for (const auto& [sym, tuples] : db.relations) {
            for (const auto& t : tuples) {
                Structure d = db;
                d.relations[sym].erase(t);
                if (d.relations[sym].empty()) d.relations.erase(sym);
                if (diverges(p, d)) {
                    db = std::move(d);
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
}

}  // namespace

FuzzResult run_fuzz(uint64_t seed, long trials, const FuzzKnobs& knobs, const Limits& limits,
                    std::ostream* log) {
    FuzzResult result;
    Rng rng(seed);
    for (long trial = 0; trial < trials; ++trial) {
        FuzzKnobs k = knobs;
        PatternTree p = random_pattern_tree(rng, k);
        Structure db = random_database(rng, k, p);
        std::set<Mapping> answers;
        try {
            answers = all_solutions_bruteforce(p, db, limits);
        } catch (const LimitError&) {
            continue;  // oracle out of budget; skip the instance
        }
        ++result.trials;
        std::vector<Engine> engines;
        if (is_projection_free(p)) engines.push_back(Engine::ProjectionFree);
        if (is_well_designed(p)) engines.push_back(Engine::Fpt);
        auto candidates = candidate_mappings(rng, k, p, db, answers);
        for (const auto& mu : candidates) {
            bool valid = true;
            for (const auto& [v, c] : mu)
                if (!p.free_vars().count(v)) valid = false;
            if (!valid) continue;
            bool want = answers.count(mu) > 0;
            for (Engine e : engines) {
                auto got = run_engine(e, p, db, mu, limits);
                ++result.checked;
                if (got && *got != want) {
                    ++result.divergences;
                    PatternTree small = p;
                    Structure small_db = db;
                    minimize(e, small, small_db, mu, limits);
                    std::string report =
                        describe(small, small_db, mu,
                                 e == Engine::ProjectionFree ? "csts" : "fpt", *got, want);
                    result.reports.push_back(report);
                    if (log) *log << "divergence in trial " << trial << ": " << report << "\n";
                }
            }
        }
        if (log && trial % 50 == 49)
            *log << "fuzz: " << (trial + 1) << "/" << trials << " trials, " << result.checked
                 << " checks, " << result.divergences << " divergences\n";
    }
    return result;
}

}  // namespace ptq

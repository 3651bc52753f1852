#include <doctest.h>

#include <random>

#include "ptq/errors.hpp"
#include "ptq/fpt.hpp"
#include "ptq/fuzz.hpp"
#include "ptq/homomorphism.hpp"
#include "test_support.hpp"

using namespace ptq;
using support::atom;
using support::facts;

TEST_CASE("relevance looks for new free variables below each node") {
    SUBCASE("both chain nodes are relevant when w is selected") {
        PatternTree p = support::p5({"x", "w"});
        CHECK(relevant_nodes(p) == std::set<int>{0, 1});
    }
    SUBCASE("the child is irrelevant when only x is selected") {
        PatternTree p = support::p5({"x"});
        CHECK(relevant_nodes(p) == std::set<int>{0});
    }
    SUBCASE("a single node with a selected variable is relevant") {
        PatternTree p(std::set<Atom>{atom("a", {"x"})});
        p.set_free_vars({"x"});
        CHECK(relevant_nodes(p) == std::set<int>{0});
    }
    SUBCASE("no free variables leaves nothing relevant, but pruning keeps the root") {
        PatternTree p(std::set<Atom>{atom("a", {"x"})});
        p.set_free_vars({});
        CHECK(relevant_nodes(p).empty());
        CHECK(prune_to_relevant(p).size() == 1);
    }
}

TEST_CASE("s-components split on the boundary set") {
    SUBCASE("empty boundary gives plain connected components") {
        auto comps = s_components({atom("r", {"x", "y"}), atom("s", {"u", "v"})}, {});
        CHECK(comps.size() == 2);
    }
    SUBCASE("a chain hanging off one boundary variable is one component") {
        auto comps = s_components({atom("r2", {"y", "z"}), atom("r3", {"z", "w"})}, {"y"});
        REQUIRE(comps.size() == 1);
        CHECK(comps[0].size() == 2);
    }
    SUBCASE("two branches from the boundary are two components") {
        auto comps = s_components({atom("r2", {"y", "z"}), atom("r4", {"y", "u"})}, {"y"});
        REQUIRE(comps.size() == 2);
        // Components come out ordered by their smallest non-boundary variable.
        CHECK(comps[0] == std::set<Atom>{atom("r4", {"y", "u"})});
        CHECK(comps[1] == std::set<Atom>{atom("r2", {"y", "z"})});
    }
}

TEST_CASE("interface components of the chain child") {
    PatternTree p = support::p5({"x", "w"});
    auto comps = interface_components(p, 1);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].kind == InterfaceComponent::Kind::Type2);
    CHECK(comps[0].atoms == p.node(1).atoms);
    CHECK(comps[0].inherited == std::set<std::string>{"y"});
    CHECK(comps[0].inherited_plus == std::set<std::string>{"y"});
}

TEST_CASE("an atom inside the interface forms a type-1 component") {
    PatternTree p(std::set<Atom>{atom("r1", {"x", "y"})});
    p.add_node(0, {atom("r5", {"y"}), atom("r6", {"y", "z"})});
    p.set_free_vars({"x"});
    auto comps = interface_components(p, 1);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].kind == InterfaceComponent::Kind::Type1);
    CHECK(comps[0].atoms == std::set<Atom>{atom("r5", {"y"})});
    CHECK(comps[0].inherited == std::set<std::string>{"y"});
    CHECK(comps[1].kind == InterfaceComponent::Kind::Type2);
    CHECK(comps[1].inherited == std::set<std::string>{"y"});
}

TEST_CASE("a child sharing nothing with its parent is one free component") {
    PatternTree p(std::set<Atom>{atom("a", {"x"})});
    p.add_node(0, {atom("r", {"u", "v"})});
    p.set_free_vars({"x"});
    auto comps = interface_components(p, 1);
    REQUIRE(comps.size() == 1);
    CHECK(comps[0].inherited.empty());
    CHECK(comps[0].inherited_plus.empty());
}

TEST_CASE("the root has no interface components") {
    PatternTree p = support::p5();
    CHECK_THROWS_AS(interface_components(p, 0), RootHasNoParent);
}

TEST_CASE("stop sets collect the non-extendable boundary assignments") {
    PatternTree p = support::p5({"x", "w"});
    auto comps = interface_components(p, 1);
    REQUIRE(comps.size() == 1);
    SUBCASE("no chain facts stop every value") {
        Structure db = facts({{"r1", {"a", "b"}}});
        auto stop = stop_set(p, comps[0], db, {{"x", "a"}});
        std::set<Mapping> want{{{"y", "a"}}, {{"y", "b"}}};
        CHECK(stop == want);
    }
    SUBCASE("one full chain leaves one extendable value") {
        Structure db = facts({{"r1", {"a", "b"}}, {"r2", {"b", "c"}}, {"r3", {"c", "d"}}});
        auto stop = stop_set(p, comps[0], db, {{"x", "a"}});
        // Only y=b reaches a chain; a, c, d are stopped.
        std::set<Mapping> want{{{"y", "a"}}, {{"y", "c"}}, {{"y", "d"}}};
        CHECK(stop == want);
    }
}

TEST_CASE("a component with no inherited variables stops only when unsatisfiable") {
    PatternTree p(std::set<Atom>{atom("a", {"x"})});
    p.add_node(0, {atom("r", {"u"})});
    p.set_free_vars({"x"});
    auto comps = interface_components(p, 1);
    REQUIRE(comps.size() == 1);
    REQUIRE(comps[0].inherited.empty());
    Structure with = facts({{"a", {"1"}}, {"r", {"1"}}});
    CHECK(stop_set(p, comps[0], with, {{"x", "1"}}).empty());
    Structure without = facts({{"a", {"1"}}});
    auto stop = stop_set(p, comps[0], without, {{"x", "1"}});
    CHECK(stop == std::set<Mapping>{Mapping{}});
}

TEST_CASE("stop and extend partition the assignment space") {
    Rng rng(97);
    FuzzKnobs knobs;
    knobs.shape = FuzzKnobs::Shape::WellDesigned;
    for (int trial = 0; trial < 60; ++trial) {
        PatternTree p = random_pattern_tree(rng, knobs);
        Structure db = random_database(rng, knobs, p);
        Mapping mu;  // empty free assignment keeps the check simple
        for (int t = 1; t < p.size(); ++t) {
            for (const auto& comp : interface_components(p, t)) {
                auto stop = stop_set(p, comp, db, mu);
                // Independent count of extendable assignments by enumeration.
                std::vector<std::string> vars(comp.inherited.begin(), comp.inherited.end());
                std::vector<Value> dom(db.domain.begin(), db.domain.end());
                long total = 1;
                for (size_t i = 0; i < vars.size(); ++i) total *= static_cast<long>(dom.size());
                long extendable = 0;
                std::vector<size_t> pick(vars.size(), 0);
                Structure comp_src = canonical_structure(comp.atoms);
                while (true) {
                    Mapping nu;
                    for (size_t i = 0; i < vars.size(); ++i) nu.emplace(vars[i], dom[pick[i]]);
                    if (support::naive_has_hom(comp_src, db, nu)) ++extendable;
                    size_t i = 0;
                    for (; i < pick.size(); ++i) {
                        if (++pick[i] < dom.size()) break;
                        pick[i] = 0;
                    }
                    if (i == pick.size()) break;
                }
                CHECK(static_cast<long>(stop.size()) + extendable == total);
            }
        }
    }
}

TEST_CASE("eval_fpt reproduces the chain examples") {
    PatternTree p = support::p5({"x", "w"});
    SUBCASE("root-only answer via blocked component") {
        Structure db = facts({{"r1", {"a", "b"}}});
        CHECK(eval_fpt(p, db, {{"x", "a"}}));
        CHECK(!eval_fpt(p, db, {{"x", "b"}}));
    }
    SUBCASE("full-chain answer") {
        Structure db = facts({{"r1", {"a", "b"}}, {"r2", {"b", "c"}}, {"r3", {"c", "d"}}});
        CHECK(eval_fpt(p, db, {{"x", "a"}, {"w", "d"}}));
        CHECK(!eval_fpt(p, db, {{"x", "a"}}));  // y=b still extends
        CHECK(!eval_fpt(p, db, {{"x", "a"}, {"w", "c"}}));
    }
}

TEST_CASE("a selected variable that never occurs is never bound") {
    PatternTree p = support::p5({"x", "w", "ghost"});
    Structure db = facts({{"r1", {"a", "b"}}});
    CHECK(!eval_fpt(p, db, {{"ghost", "a"}}));
    CHECK(!is_solution_bruteforce(p, db, {{"ghost", "a"}}));
    CHECK(eval_fpt(p, db, {{"x", "a"}}));  // unaffected otherwise
}

TEST_CASE("eval_fpt refuses trees that are not well-designed") {
    PatternTree p = support::p1();
    CHECK_THROWS_AS(eval_fpt(p, support::d_ticket(), {}), NotWellDesigned);
}

TEST_CASE("eval_fpt agrees with the oracle on well-designed trees") {
    Rng rng(101);
    FuzzKnobs knobs;
    knobs.shape = FuzzKnobs::Shape::WellDesigned;
    int checked = 0;
    for (int trial = 0; trial < 80; ++trial) {
        PatternTree p = random_pattern_tree(rng, knobs);
        Structure db = random_database(rng, knobs, p);
        auto answers = all_solutions_bruteforce(p, db);
        for (const auto& mu : candidate_mappings(rng, knobs, p, db, answers)) {
            bool ok = true;
            for (const auto& [v, c] : mu)
                if (!p.free_vars().count(v)) ok = false;
            if (!ok) continue;
            CHECK(eval_fpt(p, db, mu) == (answers.count(mu) > 0));
            ++checked;
        }
    }
    CHECK(checked > 300);
}

TEST_CASE("removing irrelevant nodes preserves the oracle's answers") {
    Rng rng(109);
    FuzzKnobs knobs;
    knobs.shape = FuzzKnobs::Shape::SimpleWellDesigned;
    int pruned_cases = 0;
    for (int trial = 0; trial < 60; ++trial) {
        PatternTree p = random_pattern_tree(rng, knobs);
        PatternTree pruned = prune_to_relevant(p);
        if (pruned.size() == p.size()) continue;
        ++pruned_cases;
        Structure db = random_database(rng, knobs, p);
        CHECK(all_solutions_bruteforce(p, db) == all_solutions_bruteforce(pruned, db));
    }
    CHECK(pruned_cases > 5);
}

TEST_CASE("pruning the tree never changes the verdict") {
    Rng rng(103);
    FuzzKnobs knobs;
    knobs.shape = FuzzKnobs::Shape::WellDesigned;
    for (int trial = 0; trial < 50; ++trial) {
        PatternTree p = random_pattern_tree(rng, knobs);
        Structure db = random_database(rng, knobs, p);
        auto answers = all_solutions_bruteforce(p, db);
        for (const auto& mu : candidate_mappings(rng, knobs, p, db, answers)) {
            bool ok = true;
            for (const auto& [v, c] : mu)
                if (!p.free_vars().count(v)) ok = false;
            if (!ok) continue;
            CHECK(eval_fpt(p, db, mu, {}, nullptr, true) ==
                  eval_fpt(p, db, mu, {}, nullptr, false));
        }
    }
}

TEST_CASE("the augmented databases only ever add component facts") {
    PatternTree p = support::p5({"x", "w"});
    Structure db = facts({{"r1", {"a", "b"}}, {"r2", {"b", "c"}}});
    FptTrace trace;
    eval_fpt(p, db, {{"x", "a"}}, {}, &trace);
    CHECK(!trace.entries.empty());
    for (const auto& entry : trace.entries) {
        for (const auto& [sym, tuples] : db.relations) {
            REQUIRE(entry.dprime.relations.count(sym));
            for (const auto& t : tuples) CHECK(entry.dprime.has_tuple(sym, t));
        }
        for (const auto& [sym, tuples] : entry.dprime.relations) {
            if (db.relations.count(sym)) {
                CHECK(db.relations.at(sym) == tuples);
            } else {
                CHECK(sym.base.rfind("__cia", 0) == 0);
            }
        }
    }
}

TEST_CASE("condition checks on the chain query") {
    PatternTree p = support::p5({"x", "w"});
    TractabilityReport rep = check_conditions(p, 1, 1024);
    CHECK(rep.well_designed);
    CHECK(rep.simple);
    CHECK(!rep.projection_free);
    CHECK(rep.conditions_applicable);
    CHECK(rep.a_holds);
    CHECK(rep.a_max.exact);
    CHECK(rep.a_max.upper == 1);
    CHECK(rep.b_holds);
    CHECK(rep.b_width == 1);
    CHECK(rep.c_holds);
    CHECK(rep.c_max.upper == 1);
    TractabilityReport rep2 = check_conditions(p, 2, 1024);
    CHECK(rep2.c_holds);
}

TEST_CASE("a clique of existential variables shows up in condition (c)") {
    std::set<Atom> body{atom("f", {"x"})};
    for (int i = 1; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
            if (i != j) body.insert(atom("k", {"y" + std::to_string(i), "y" + std::to_string(j)}));
    PatternTree p(body);
    p.set_free_vars({"x"});
    TractabilityReport rep = check_conditions(p, 1, 1024);
    CHECK(rep.conditions_applicable);
    CHECK(!rep.c_holds);
    CHECK(rep.c_max.upper == 3);  // clique size minus one
    CHECK(rep.c_max.exact);
}

TEST_CASE("the projection-free report carries the csts quantity") {
    PatternTree p = support::p2(4);
    TractabilityReport rep = check_conditions(p, 1, 1024);
    CHECK(rep.projection_free);
    CHECK(rep.csts_applicable);
    CHECK(!rep.csts_truncated);
    // The subtree keeping only the single-edge child leaves the clique pair
    // in place, so the quantity is the clique width.
    CHECK(rep.csts_max.upper == 3);
    CHECK(rep.csts_max.exact);
    // Cross-check the quantity against the definition-level extension cores.
    int want = -1;
    for (const auto& pair : csts_all(p, 64)) {
        ExtensionPair ep{canonical_structure(pair.context),
                         canonical_structure(pair.child_label)};
        want = std::max(want, structure_treewidth(support::brute_extcore(ep)).upper);
    }
    CHECK(rep.csts_max.upper == want);
}

TEST_CASE("conditions are skipped for trees that are not well-designed") {
    TractabilityReport rep = check_conditions(support::p1(), 1, 1024);
    CHECK(!rep.well_designed);
    CHECK(!rep.conditions_applicable);
    CHECK(rep.projection_free);
    CHECK(rep.csts_applicable);
    CHECK(rep.csts_max.upper >= 0);
}

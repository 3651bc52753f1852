#include <doctest.h>

#include <random>

#include "ptq/core_ops.hpp"
#include "ptq/errors.hpp"
#include "ptq/ext.hpp"
#include "ptq/fpt.hpp"
#include "ptq/graph.hpp"
#include "ptq/homomorphism.hpp"
#include "test_support.hpp"

using namespace ptq;
using support::atom;
using support::facts;

namespace {

Structure random_structure(std::mt19937_64& rng, int max_elems) {
    Structure s;
    int n = 1 + static_cast<int>(rng() % max_elems);
    std::vector<Value> dom;
    for (int i = 0; i < n; ++i) {
        dom.push_back("e" + std::to_string(i));
        s.add_element(dom.back());
    }
    for (int k = 0; k < 2; ++k) {
        int arity = 1 + static_cast<int>(rng() % 2);
        int count = static_cast<int>(rng() % (2 * n + 1));
        for (int t = 0; t < count; ++t) {
            Tuple tup;
            for (int j = 0; j < arity; ++j) tup.push_back(dom[rng() % dom.size()]);
            s.add_tuple(Symbol{"r" + std::to_string(k), {}}, std::move(tup));
        }
    }
    return s;
}

}  // namespace

TEST_CASE("a single binary atom is its own core") {
    Structure s = facts({{"e", {"u", "v"}}});
    CHECK(core(s) == s);
}

TEST_CASE("a pendant edge folds onto a directed triangle") {
    Structure s = facts({{"e", {"u", "v"}}, {"e", {"v", "w"}}, {"e", {"w", "u"}}, {"e", {"w", "x"}}});
    Structure c = core(s);
    Structure triangle = facts({{"e", {"u", "v"}}, {"e", {"v", "w"}}, {"e", {"w", "u"}}});
    CHECK(c.domain.size() == 3);
    CHECK(is_isomorphic(c, triangle));
    CHECK(is_isomorphic(c, support::brute_core(s)));
}

TEST_CASE("a symmetric six-cycle folds onto one edge") {
    Structure s;
    for (int i = 0; i < 6; ++i) {
        std::string a = "v" + std::to_string(i);
        std::string b = "v" + std::to_string((i + 1) % 6);
        s.add_tuple(Symbol{"e", {}}, {a, b});
        s.add_tuple(Symbol{"e", {}}, {b, a});
    }
    Structure c = core(s);
    CHECK(c.domain.size() == 2);  // no single fold exists here, only a full retraction
    CHECK(is_isomorphic(c, support::brute_core(s)));
}

TEST_CASE("core is idempotent and mutually homomorphic with the input") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 120; ++trial) {
        Structure s = random_structure(rng, 6);
        Structure c = core(s);
        CHECK(core(c) == c);
        CHECK(support::naive_has_hom(s, c, {}));
        CHECK(support::naive_has_hom(c, s, {}));
        CHECK(c.domain.size() == support::brute_core(s).domain.size());
    }
}

TEST_CASE("the core domain limit is enforced") {
    Structure s;
    for (int i = 0; i < 20; ++i) s.add_element("e" + std::to_string(i));
    Limits limits;
    limits.core_domain_limit = 16;
    CHECK_THROWS_AS(core(s, limits), DomainLimit);
}

TEST_CASE("projection under the empty set is the identity") {
    Structure s = support::d_ticket();
    CHECK(projection_under_set(s, {}) == s);
}

TEST_CASE("projection moves selected elements into the symbol") {
    Structure s = facts({{"r3", {"z", "w"}}});
    Structure got = projection_under_set(s, {"z"});
    CHECK(got.domain == std::set<Value>{"w"});
    Symbol annotated{"r3", {{1, "z"}}};
    CHECK(got.has_tuple(annotated, {"w"}));
}

TEST_CASE("fully selected tuples become zero-ary annotated facts") {
    Structure s = facts({{"r1", {"a", "b"}}});
    Structure got = projection_under_set(s, {"a", "b"});
    CHECK(got.domain.empty());
    Symbol annotated{"r1", {{1, "a"}, {2, "b"}}};
    CHECK(got.has_tuple(annotated, {}));
}

TEST_CASE("projection under a total homomorphism drops everything") {
    Structure q = canonical_structure({atom("r1", {"x", "y"})});
    Structure d = facts({{"r1", {"a", "b"}}});
    auto [qp, dp] = projection_under_hom(q, d, {{"x", "a"}, {"y", "b"}});
    CHECK(qp.relations.empty());
    CHECK(qp.domain.empty());
    CHECK(dp.relations.empty());
}

TEST_CASE("projection annotates partially mapped tuples both sides") {
    Structure q = canonical_structure({atom("r2", {"y", "z"})});
    Structure d = facts({{"r2", {"b", "c"}}});
    auto [qp, dp] = projection_under_hom(q, d, {{"y", "b"}});
    Symbol annotated{"r2", {{1, "b"}}};
    CHECK(qp.domain == std::set<Value>{"z"});
    CHECK(qp.has_tuple(annotated, {"z"}));
    CHECK(dp.has_tuple(annotated, {"c"}));
}

TEST_CASE("a mapped tuple missing from the data leaves an unsatisfiable mark") {
    Structure q = canonical_structure({atom("r1", {"x"})});
    Structure d = facts({{"r1", {"b"}}});
    d.add_element("a");
    auto [qp, dp] = projection_under_hom(q, d, {{"x", "a"}});
    Symbol mark{"r1", {{1, "a"}}};
    CHECK(qp.has_tuple(mark, {}));
    CHECK(!dp.relations.count(mark));
    CHECK(!find_homomorphism(qp, dp, {}).has_value());
}

TEST_CASE("extension existence equals the projected homomorphism problem") {
    std::mt19937_64 rng(37);
    int positives = 0;
    for (int trial = 0; trial < 250; ++trial) {
        Structure q = random_structure(rng, 4);
        Structure d = random_structure(rng, 4);
        if (d.domain.empty()) continue;
        Mapping h;
        std::vector<Value> dvals(d.domain.begin(), d.domain.end());
        for (const auto& e : q.domain)
            if (rng() % 2) h.emplace(e, dvals[rng() % dvals.size()]);
        bool direct = support::naive_has_hom(q, d, h);
        auto [qp, dp] = projection_under_hom(q, d, h);
        bool projected = support::naive_has_hom(qp, dp, {});
        CHECK(direct == projected);
        if (direct) ++positives;
    }
    CHECK(positives > 10);
}

TEST_CASE("an empty anchor degenerates to the plain core") {
    Structure tri = facts({{"e", {"u", "v"}}, {"e", {"v", "w"}}, {"e", {"w", "u"}}});
    Structure e = extension_core(ExtensionPair{{}, tri});
    CHECK(is_isomorphic(e, tri));
}

TEST_CASE("the chain component keeps its shape with an annotated head") {
    // Anchor: the marked variable y; extension: r2(y,z), r3(z,w).
    ExtensionPair pair{singleton_marking({"y"}),
                       canonical_structure({atom("r2", {"y", "z"}), atom("r3", {"z", "w"})})};
    Structure e = extension_core(pair);
    CHECK(e.domain == std::set<Value>{"z", "w"});
    CHECK(e.has_tuple(Symbol{"r2", {{1, "y"}}}, {"z"}));
    CHECK(e.has_tuple(Symbol{"r3", {}}, {"z", "w"}));
    TwValue tw = structure_treewidth(e);
    CHECK(tw.exact);
    CHECK(tw.upper == 1);
    CHECK(is_isomorphic(e, support::brute_extcore(pair)));
}

TEST_CASE("the merged clique pair folds the edge child into the clique") {
    // Anchor a(x); extension is the n=3 clique label next to the single edge.
    PatternTree p = support::p2(3);
    std::set<Atom> merged = p.node(1).atoms;
    for (const auto& a : p.node(2).atoms) merged.insert(a);
    ExtensionPair pair{canonical_structure(p.node(0).atoms), canonical_structure(merged)};
    Structure e = extension_core(pair);
    Structure brute = support::brute_extcore(pair);
    CHECK(is_isomorphic(e, brute));
    // The z-edge folds into the clique; the clique itself cannot fold, so the
    // width is the clique size minus one.
    CHECK(e.domain.size() == 3);
    TwValue tw = structure_treewidth(e);
    CHECK(tw.exact);
    CHECK(tw.upper == 2);
}

TEST_CASE("extension cores are their own cores and stable under renaming") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        Structure b = random_structure(rng, 5);
        std::set<Value> anchor_elems;
        for (const auto& e : b.domain)
            if (rng() % 2) anchor_elems.insert(e);
        ExtensionPair pair{singleton_marking(anchor_elems), b};
        Structure e = extension_core(pair);
        CHECK(is_isomorphic(core(e), e));
        // Rename the non-anchor elements bijectively; the result must be
        // isomorphic to the original extension core.
        Mapping rename;
        int i = 0;
        for (const auto& v : b.domain)
            rename.emplace(v, anchor_elems.count(v) ? v : "n" + std::to_string(i++));
        Structure renamed;
        for (const auto& v : b.domain) renamed.add_element(rename.at(v));
        for (const auto& [sym, tuples] : b.relations)
            for (const auto& t : tuples) {
                Tuple nt;
                for (const auto& v : t) nt.push_back(rename.at(v));
                renamed.add_tuple(sym, std::move(nt));
            }
        Structure e2 = extension_core(ExtensionPair{singleton_marking(anchor_elems), renamed});
        CHECK(is_isomorphic(e, e2));
    }
}

TEST_CASE("cq_to_ext builds the head-body pair") {
    SUBCASE("boolean queries get a zero-ary head") {
        ExtensionPair pair = cq_to_ext({atom("r1", {"x", "y"})}, {});
        CHECK(pair.anchor.domain.empty());
        CHECK(pair.anchor.has_tuple(Symbol{"Ans", {}}, {}));
    }
    SUBCASE("unary head") {
        ExtensionPair pair = cq_to_ext({atom("r1", {"x", "y"})}, {"x"});
        CHECK(pair.anchor.domain == std::set<Value>{"x"});
        CHECK(pair.anchor.has_tuple(Symbol{"Ans", {}}, {"x"}));
        CHECK(pair.extension.has_tuple(Symbol{"r1", {}}, {"x", "y"}));
    }
    SUBCASE("a clique body with a disjoint head keeps its width") {
        std::set<Atom> body;
        for (int i = 1; i <= 4; ++i)
            for (int j = 1; j <= 4; ++j)
                if (i != j)
                    body.insert(atom("k", {"y" + std::to_string(i), "y" + std::to_string(j)}));
        ExtensionPair pair = cq_to_ext(body, {"x"});
        Structure e = extension_core(pair);
        CHECK(is_isomorphic(e, support::brute_extcore(pair)));
        TwValue tw = structure_treewidth(e);
        CHECK(tw.exact);
        CHECK(tw.upper == 3);
    }
}

TEST_CASE("isomorphism checking distinguishes close structures") {
    Structure a = facts({{"e", {"1", "2"}}, {"e", {"2", "3"}}});
    Structure b = facts({{"e", {"x", "y"}}, {"e", {"y", "z"}}});
    Structure c = facts({{"e", {"x", "y"}}, {"e", {"x", "z"}}});
    CHECK(is_isomorphic(a, b));
    CHECK(!is_isomorphic(a, c));
    CHECK(!is_isomorphic(a, facts({{"e", {"1", "2"}}})));
}

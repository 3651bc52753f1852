#pragma once

// Shared fixtures and slow reference implementations for the tests. The
// reference code here deliberately avoids the library's solver paths: plain
// enumeration only, so expected values are computed independently.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ptq/core_ops.hpp"
#include "ptq/graph.hpp"
#include "ptq/pattern_tree.hpp"
#include "ptq/relational.hpp"

namespace support {

inline ptq::Atom atom(const std::string& symbol, const std::vector<std::string>& vars) {
    ptq::Atom a;
    a.symbol = ptq::Symbol{symbol, {}};
    for (const auto& v : vars) a.args.push_back(ptq::Term::var(v));
    return a;
}

inline ptq::Structure facts(const std::vector<std::pair<std::string, ptq::Tuple>>& rows) {
    ptq::Structure s;
    for (const auto& [rel, t] : rows) s.add_tuple(ptq::Symbol{rel, {}}, t);
    return s;
}

// Figure-1 style fixtures used throughout.
inline ptq::Structure d_ticket() {
    return facts({{"ticket", {"1"}},
                  {"class", {"1", "E"}},
                  {"seatclass", {"1", "E"}},
                  {"seatclass", {"2", "F"}},
                  {"empty", {"1"}},
                  {"empty", {"2"}}});
}

inline ptq::PatternTree p1() {
    ptq::PatternTree p(std::set<ptq::Atom>{atom("ticket", {"t"})});
    p.add_node(0, {atom("seatclass", {"s", "c"}), atom("empty", {"s"}), atom("class", {"t", "c"})});
    p.add_node(0, {atom("seatclass", {"s", "c"}), atom("empty", {"s"})});
    p.set_free_vars(p.all_vars());
    return p;
}

inline ptq::PatternTree p2(int n) {
    ptq::PatternTree p(std::set<ptq::Atom>{atom("a", {"x"})});
    std::set<ptq::Atom> clique;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j)
            if (i != j) clique.insert(atom("c", {"y" + std::to_string(i), "y" + std::to_string(j)}));
    p.add_node(0, std::move(clique));
    p.add_node(0, {atom("c", {"z1", "z2"})});
    p.set_free_vars(p.all_vars());
    return p;
}

inline ptq::PatternTree p5(std::set<std::string> free = {"x", "w"}) {
    ptq::PatternTree p(std::set<ptq::Atom>{atom("r1", {"x", "y"})});
    p.add_node(0, {atom("r2", {"y", "z"}), atom("r3", {"z", "w"})});
    p.set_free_vars(std::move(free));
    return p;
}

// Every total mapping source -> target extending `fixed`, by plain
// enumeration with a final check of all tuples.
inline std::vector<ptq::Mapping> naive_homs(const ptq::Structure& source,
                                            const ptq::Structure& target,
                                            const ptq::Mapping& fixed) {
    std::vector<std::string> vars(source.domain.begin(), source.domain.end());
    std::vector<ptq::Value> values(target.domain.begin(), target.domain.end());
    std::vector<ptq::Mapping> out;
    ptq::Mapping cur;
    std::function<void(size_t)> go = [&](size_t i) {
        if (i == vars.size()) {
            for (const auto& [sym, tuples] : source.relations) {
                auto it = target.relations.find(sym);
                for (const auto& t : tuples) {
                    ptq::Tuple image;
                    for (const auto& x : t) image.push_back(cur.at(x));
                    if (it == target.relations.end() || !it->second.count(image)) return;
                }
            }
            out.push_back(cur);
            return;
        }
        auto fit = fixed.find(vars[i]);
        if (fit != fixed.end()) {
            if (!target.domain.count(fit->second)) return;
            cur[vars[i]] = fit->second;
            go(i + 1);
            cur.erase(vars[i]);
            return;
        }
        for (const auto& v : values) {
            cur[vars[i]] = v;
            go(i + 1);
            cur.erase(vars[i]);
        }
    };
    go(0);
    return out;
}

inline bool naive_has_hom(const ptq::Structure& source, const ptq::Structure& target,
                          const ptq::Mapping& fixed) {
    return !naive_homs(source, target, fixed).empty();
}

// Minimum width over all elimination orders; fine up to ~8 vertices.
inline int exhaustive_treewidth(const ptq::Graph& g) {
    std::vector<std::string> vs(g.vertices.begin(), g.vertices.end());
    if (vs.empty()) return -1;
    int n = static_cast<int>(vs.size());
    std::map<std::string, int> idx;
    for (int i = 0; i < n; ++i) idx[vs[i]] = i;
    std::vector<std::vector<char>> base(n, std::vector<char>(n, 0));
    for (const auto& [u, v] : g.edges) base[idx[u]][idx[v]] = base[idx[v]][idx[u]] = 1;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    int best = n;
    do {
        auto adj = base;
        std::vector<char> alive(n, 1);
        int width = -1;
        for (int v : perm) {
            std::vector<int> nb;
            for (int u = 0; u < n; ++u)
                if (alive[u] && adj[v][u]) nb.push_back(u);
            width = std::max(width, static_cast<int>(nb.size()));
            for (size_t i = 0; i < nb.size(); ++i)
                for (size_t j = i + 1; j < nb.size(); ++j)
                    adj[nb[i]][nb[j]] = adj[nb[j]][nb[i]] = 1;
            alive[v] = 0;
            if (width >= best) break;
        }
        best = std::min(best, width);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// Extension problem by enumeration: a total map of the extension that agrees
// with h on shared elements and sends every tuple into the target.
inline bool naive_ext(const ptq::Structure& anchor, const ptq::Structure& extension,
                      const ptq::Structure& target, const ptq::Mapping& h) {
    ptq::Mapping fixed;
    for (const auto& e : extension.domain) {
        auto it = h.find(e);
        if (it != h.end() && anchor.domain.count(e)) fixed.emplace(e, it->second);
    }
    return naive_has_hom(extension, target, fixed);
}

// Smallest induced substructure admitting a homomorphism from s; subsets
// enumerated by size then lexicographically, so the result is deterministic.
inline ptq::Structure brute_core(const ptq::Structure& s) {
    std::vector<ptq::Value> dom(s.domain.begin(), s.domain.end());
    int n = static_cast<int>(dom.size());
    for (int size = 0; size <= n; ++size) {
        // Enumerate subsets of the given size in lexicographic order.
        std::vector<std::set<ptq::Value>> subsets;
        std::function<void(int, std::set<ptq::Value>&)> gen = [&](int start, std::set<ptq::Value>& cur) {
            if (static_cast<int>(cur.size()) == size) {
                subsets.push_back(cur);
                return;
            }
            for (int i = start; i < n; ++i) {
                cur.insert(dom[i]);
                gen(i + 1, cur);
                cur.erase(dom[i]);
            }
        };
        std::set<ptq::Value> cur;
        gen(0, cur);
        for (const auto& keep : subsets) {
            ptq::Structure candidate = ptq::restrict_structure(s, keep);
            if (naive_has_hom(s, candidate, {})) return candidate;
        }
    }
    return s;
}

// Definition-level extension core: markers, brute core, marker removal, and
// a from-scratch projection of the anchor elements into annotations.
inline ptq::Structure brute_extcore(const ptq::ExtensionPair& pair) {
    ptq::Structure u = ptq::union_structures(ptq::union_structures(pair.anchor, pair.extension),
                                             ptq::singleton_marking(pair.anchor.domain));
    ptq::Structure c = brute_core(u);
    ptq::Structure out;
    for (const auto& e : c.domain)
        if (!pair.anchor.domain.count(e)) out.domain.insert(e);
    for (const auto& [sym, tuples] : c.relations) {
        if (ptq::is_marking_symbol(sym)) continue;
        for (const auto& t : tuples) {
            ptq::Symbol annotated = sym;
            ptq::Tuple rest;
            for (size_t i = 0; i < t.size(); ++i) {
                if (pair.anchor.domain.count(t[i]))
                    annotated.selections.emplace_back(static_cast<int>(i) + 1, t[i]);
                else
                    rest.push_back(t[i]);
            }
            out.relations[annotated].insert(rest);
        }
    }
    return out;
}

}  // namespace support

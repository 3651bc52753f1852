#include "ptq/homomorphism.hpp"

#include <algorithm>
#include <cassert>

#include "ptq/errors.hpp"

namespace ptq {

namespace {

struct Constraint {
    Symbol symbol;
    Tuple args;                      // source elements
    const std::set<Tuple>* tuples;   // target relation (never null)
};

struct Problem {
    std::vector<Constraint> constraints;
    std::map<Value, std::vector<Value>> candidates;  // per source element, sorted
    bool unsat = false;
};

std::vector<Value> intersect_sorted(const std::vector<Value>& a, const std::set<Value>& b) {
    std::vector<Value> out;
    for (const auto& v : a)
        if (b.count(v)) out.push_back(v);
    return out;
}

// Collects constraints, seeds candidate sets, and applies per-position
// pruning. Missing target relations make the instance unsat (non-strict).
Problem setup(const Structure& source, const Structure& target, const Mapping& fixed,
              const Limits& limits) {
    Problem p;
    static const std::set<Tuple> kEmpty;
    for (const auto& [sym, tuples] : source.relations) {
        auto it = target.relations.find(sym);
        const std::set<Tuple>* trel = nullptr;
        if (it == target.relations.end()) {
            if (limits.strict_symbols)
                throw SymbolMismatch("relation " + to_string(sym) + " is absent from the target vocabulary");
            trel = &kEmpty;
        } else {
            trel = &it->second;
        }
        for (const auto& t : tuples) {
            if (!trel->empty() && trel->begin()->size() != t.size())
                throw ArityMismatch("arity mismatch for relation " + to_string(sym));
            if (t.empty()) {
                if (!trel->count(t)) p.unsat = true;  // 0-ary: presence must match
                continue;
            }
            p.constraints.push_back(Constraint{sym, t, trel});
        }
    }
    if (p.unsat) return p;

    std::vector<Value> all(target.domain.begin(), target.domain.end());
    for (const auto& v : source.domain) {
        auto it = fixed.find(v);
        if (it != fixed.end()) {
            if (target.domain.count(it->second)) p.candidates[v] = {it->second};
            else { p.unsat = true; return p; }
        } else {
            p.candidates[v] = all;
        }
    }
    // Per-position filtering against each constraint's target relation.
    for (const auto& c : p.constraints) {
        for (size_t i = 0; i < c.args.size(); ++i) {
            std::set<Value> allowed;
            for (const auto& t : *c.tuples) allowed.insert(t[i]);
            auto& cand = p.candidates[c.args[i]];
            cand = intersect_sorted(cand, allowed);
            if (cand.empty()) { p.unsat = true; return p; }
        }
    }
    return p;
}

struct Searcher {
    const Problem& p;
    Mapping assignment;
    std::map<Value, std::vector<Value>> cand;
    const std::function<bool(const Mapping&)>& emit;
    bool stopped = false;

    Searcher(const Problem& prob, const std::function<bool(const Mapping&)>& fn)
        : p(prob), cand(prob.candidates), emit(fn) {}

    // Recomputes the supported values of unassigned elements of c under the
    // current partial assignment; false when some element loses all values.
    bool forward_check(const Constraint& c) {
        std::map<Value, std::set<Value>> support;
        for (const auto& t : *c.tuples) {
            Mapping local;
            bool ok = true;
            for (size_t i = 0; i < c.args.size() && ok; ++i) {
                const Value& sv = c.args[i];
                auto it = assignment.find(sv);
                const Value& need = it != assignment.end() ? it->second : Value{};
                if (it != assignment.end()) {
                    if (t[i] != need) ok = false;
                } else {
                    auto [lit, inserted] = local.emplace(sv, t[i]);
                    if (!inserted && lit->second != t[i]) ok = false;
                }
            }
            if (!ok) continue;
            for (const auto& [sv, val] : local) support[sv].insert(val);
        }
        for (size_t i = 0; i < c.args.size(); ++i) {
            const Value& sv = c.args[i];
            if (assignment.count(sv)) continue;
            auto& cv = cand[sv];
            cv = intersect_sorted(cv, support[sv]);
            if (cv.empty()) return false;
        }
        return true;
    }

    bool fully_checked(const Constraint& c) const {
        Tuple image;
        image.reserve(c.args.size());
        for (const auto& a : c.args) {
            auto it = assignment.find(a);
            if (it == assignment.end()) return true;  // not yet total on c
            image.push_back(it->second);
        }
        return c.tuples->count(image) > 0;
    }

    void search() {
        if (stopped) return;
        // Smallest candidate set first, ties by element name.
        const Value* pick = nullptr;
        size_t best = 0;
        for (const auto& [v, cs] : cand) {
            if (assignment.count(v)) continue;
            if (!pick || cs.size() < best) {
                pick = &v;
                best = cs.size();
            }
        }
        if (!pick) {
            if (!emit(assignment)) stopped = true;
            return;
        }
        const Value var = *pick;
        const std::vector<Value> values = cand[var];
        for (const auto& val : values) {
            assignment[var] = val;
            auto saved = cand;
            bool ok = true;
            for (const auto& c : p.constraints) {
                bool involves = std::find(c.args.begin(), c.args.end(), var) != c.args.end();
                if (!involves) continue;
                if (!fully_checked(c) || !forward_check(c)) { ok = false; break; }
            }
            if (ok) search();
            cand = std::move(saved);
            assignment.erase(var);
            if (stopped) return;
        }
    }
};

}  // namespace

bool enumerate_homomorphisms(const Structure& source, const Structure& target,
                             const Mapping& fixed,
                             const std::function<bool(const Mapping&)>& fn,
                             const Limits& limits) {
    Mapping eff;
    for (const auto& [v, c] : fixed)
        if (source.domain.count(v)) eff.emplace(v, c);
    Problem p = setup(source, target, eff, limits);
    if (p.unsat) return true;
    Searcher s(p, fn);
    s.search();
    return !s.stopped;
}

std::optional<Mapping> find_homomorphism(const Structure& source, const Structure& target,
                                         const Mapping& fixed, const Limits& limits) {
    std::optional<Mapping> result;
    enumerate_homomorphisms(
        source, target, fixed,
        [&](const Mapping& m) {
            result = m;
            return false;
        },
        limits);
    return result;
}

namespace {

// One bag of the DP: variables in sorted order, surviving rows, and the rows
// projected onto the separator towards the parent.
struct BagTable {
    std::vector<Value> vars;
    std::set<Tuple> rows;
};

Tuple project_row(const std::vector<Value>& vars, const Tuple& row,
                  const std::vector<Value>& onto) {
    Tuple out;
    out.reserve(onto.size());
    for (const auto& v : onto) {
        auto it = std::lower_bound(vars.begin(), vars.end(), v);
        assert(it != vars.end() && *it == v);
        out.push_back(row[static_cast<size_t>(it - vars.begin())]);
    }
    return out;
}

}  // namespace

std::optional<Mapping> hom_via_decomposition(const Structure& source, const TreeDecomposition& td,
                                             const Structure& target, const Mapping& fixed,
                                             const Limits& limits) {
    Graph g = gaifman_graph(source);
    std::string why;
    if (!validate_decomposition(td, g, &why))
        throw InvalidDecomposition("tree decomposition does not fit the source: " + why);

    Mapping eff;
    for (const auto& [v, c] : fixed)
        if (source.domain.count(v)) eff.emplace(v, c);
    Problem p = setup(source, target, eff, limits);
    if (p.unsat) return std::nullopt;

    const size_t nbags = td.bags.size();
    // Each constraint goes to the first bag containing all its elements; one
    // exists because tuple elements form a clique of the Gaifman graph.
    std::vector<std::vector<const Constraint*>> bag_constraints(nbags);
    for (const auto& c : p.constraints) {
        bool placed = false;
        for (size_t b = 0; b < nbags && !placed; ++b) {
            bool inside = true;
            for (const auto& v : c.args)
                if (!td.bags[b].count(v)) { inside = false; break; }
            if (inside) {
                bag_constraints[b].push_back(&c);
                placed = true;
            }
        }
        if (!placed)
            throw InvalidDecomposition("no bag covers an atom of the source");
    }

    std::vector<std::vector<int>> children(nbags);
    for (size_t i = 1; i < nbags; ++i) children[td.parent[i]].push_back(static_cast<int>(i));

    std::vector<BagTable> tables(nbags);
    // Post-order over the rooted bag tree.
    std::vector<int> post;
    {
        std::vector<std::pair<int, size_t>> st = {{0, 0}};
        while (!st.empty()) {
            auto& [b, idx] = st.back();
            if (idx < children[b].size()) {
                int c = children[b][idx++];
                st.emplace_back(c, 0);
            } else {
                post.push_back(b);
                st.pop_back();
            }
        }
    }

    for (int b : post) {
        BagTable& table = tables[b];
        table.vars.assign(td.bags[b].begin(), td.bags[b].end());
        // Separator projections of each child's surviving rows.
        std::vector<std::vector<Value>> sep(children[b].size());
        std::vector<std::set<Tuple>> sep_rows(children[b].size());
        for (size_t ci = 0; ci < children[b].size(); ++ci) {
            int c = children[b][ci];
            for (const auto& v : tables[c].vars)
                if (td.bags[b].count(v)) sep[ci].push_back(v);
            for (const auto& row : tables[c].rows)
                sep_rows[ci].insert(project_row(tables[c].vars, row, sep[ci]));
            if (tables[c].rows.empty()) return std::nullopt;
        }
        // Enumerate assignments of the bag with incremental constraint checks.
        Tuple row(table.vars.size());
        std::function<bool(size_t)> gen = [&](size_t i) -> bool {
            if (i == table.vars.size()) {
                for (const Constraint* c : bag_constraints[b]) {
                    Tuple image;
                    image.reserve(c->args.size());
                    for (const auto& a : c->args) {
                        auto it = std::lower_bound(table.vars.begin(), table.vars.end(), a);
                        image.push_back(row[static_cast<size_t>(it - table.vars.begin())]);
                    }
                    if (!c->tuples->count(image)) return true;
                }
                for (size_t ci = 0; ci < children[b].size(); ++ci) {
                    Tuple key;
                    key.reserve(sep[ci].size());
                    for (const auto& v : sep[ci]) {
                        auto it = std::lower_bound(table.vars.begin(), table.vars.end(), v);
                        key.push_back(row[static_cast<size_t>(it - table.vars.begin())]);
                    }
                    if (!sep_rows[ci].count(key)) return true;
                }
                table.rows.insert(row);
                return true;
            }
            for (const auto& val : p.candidates[table.vars[i]]) {
                row[i] = val;
                if (!gen(i + 1)) return false;
            }
            return true;
        };
        gen(0);
        if (table.rows.empty()) return std::nullopt;
    }

    // Extraction: pick rows top-down, matching each child on its separator.
    Mapping result = eff;
    std::function<bool(int, const Tuple&)> descend = [&](int b, const Tuple& row) -> bool {
        for (size_t i = 0; i < tables[b].vars.size(); ++i) result[tables[b].vars[i]] = row[i];
        for (int c : children[b]) {
            std::vector<Value> s;
            for (const auto& v : tables[c].vars)
                if (td.bags[b].count(v)) s.push_back(v);
            Tuple want = project_row(tables[b].vars, row, s);
            bool found = false;
            for (const auto& crow : tables[c].rows) {
                if (project_row(tables[c].vars, crow, s) == want) {
                    if (!descend(c, crow)) return false;
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
        return true;
    };
    if (tables[0].rows.empty()) return std::nullopt;
    if (!descend(0, *tables[0].rows.begin())) return std::nullopt;
    // A valid decomposition covers every source element; this loop only
    // matters for elements the caller left out of the graph.
    for (const auto& v : source.domain)
        if (!result.count(v)) result[v] = *target.domain.begin();
    return result;
}

bool evaluate_cq(const std::set<Atom>& body, const std::vector<std::string>& free,
                 const Structure& db, const Mapping& binding, const Limits& limits) {
    std::set<std::string> freeset(free.begin(), free.end());
    std::set<std::string> bound;
    for (const auto& [v, c] : binding) bound.insert(v);
    if (bound != freeset)
        throw UsageError("binding must be defined exactly on the free variables");
    auto vars = variables_of(body);
    for (const auto& v : free)
        if (!vars.count(v))
            throw UsageError("free variable " + v + " does not occur in the body");
    Structure src = canonical_structure(body);
    Graph g = gaifman_graph(src);
    if (static_cast<int>(g.vertices.size()) <= limits.tw_vertex_limit) {
        auto td = treewidth_exact(g, limits.width_budget, limits);
        if (td) return hom_via_decomposition(src, *td, db, binding, limits).has_value();
    }
    return find_homomorphism(src, db, binding, limits).has_value();
}

}  // namespace ptq

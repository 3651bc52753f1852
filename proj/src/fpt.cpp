#include "ptq/fpt.hpp"

#include <algorithm>
#include <functional>

#include "ptq/errors.hpp"
#include "ptq/ext.hpp"
#include "ptq/graph.hpp"
#include "ptq/homomorphism.hpp"
#include "ptq/treewidth.hpp"

namespace ptq {

Atom CiaAtom::to_atom() const {
    Atom a;
    a.symbol = symbol;
    for (const auto& v : args) a.args.push_back(Term::var(v));
    return a;
}

namespace {

std::vector<int> branch_nodes(const PatternTree& p, int t) {
    std::vector<int> out;  // root .. parent(t)
    int cur = p.node(t).parent;
    while (cur != -1) {
        out.push_back(cur);
        cur = p.node(cur).parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::set<std::string> subtree_below_vars(const PatternTree& p, int t, bool free_only) {
    std::set<std::string> out;
    std::function<void(int)> dfs = [&](int v) {
        for (const auto& x : p.vars_of(v))
            if (!free_only || p.free_vars().count(x)) out.insert(x);
        for (int c : p.node(v).children) dfs(c);
    };
    dfs(t);
    return out;
}

}  // namespace

std::set<int> relevant_nodes(const PatternTree& p) {
    std::set<int> out;
    for (int t = 0; t < p.size(); ++t) {
        std::set<std::string> below = subtree_below_vars(p, t, /*free_only=*/true);
        std::set<std::string> branch_fvars;
        for (int b : branch_nodes(p, t))
            for (const auto& v : p.vars_of(b))
                if (p.free_vars().count(v)) branch_fvars.insert(v);
        for (const auto& v : below) {
            if (!branch_fvars.count(v)) {
                out.insert(t);
                break;
            }
        }
    }
    return out;
}

PatternTree prune_to_relevant(const PatternTree& p) {
    std::set<int> keep = relevant_nodes(p);
    keep.insert(0);  // the root anchors every evaluation subtree
    PatternTree out;
    std::map<int, int> remap;
    for (int n : p.preorder()) {
        if (!keep.count(n)) continue;
        if (n == 0) {
            out.add_node(-1, p.node(n).atoms, p.node(n).id);
            remap[0] = 0;
        } else {
            // Relevant nodes are ancestor-closed, so the parent is kept.
            remap[n] = out.add_node(remap.at(p.node(n).parent), p.node(n).atoms, p.node(n).id);
        }
    }
    out.set_free_vars(p.free_vars());
    return out;
}

std::vector<std::set<Atom>> s_components(const std::set<Atom>& atoms,
                                         const std::set<std::string>& s) {
    Graph g = gaifman_graph(atoms);
    auto adj = g.adjacency();
    std::set<std::string> rest;
    for (const auto& v : g.vertices)
        if (!s.count(v)) rest.insert(v);
    std::vector<std::set<Atom>> out;
    std::set<std::string> seen;
    for (const auto& start : rest) {
        if (seen.count(start)) continue;
        std::set<std::string> comp;
        std::vector<std::string> stack = {start};
        while (!stack.empty()) {
            std::string v = stack.back();
            stack.pop_back();
            if (!comp.insert(v).second) continue;
            seen.insert(v);
            for (const auto& u : adj[v])
                if (!s.count(u) && !comp.count(u)) stack.push_back(u);
        }
        std::set<Atom> comp_atoms;
        for (const auto& a : atoms) {
            for (const auto& t : a.args) {
                if (t.kind == Term::Kind::Variable && comp.count(t.name)) {
                    comp_atoms.insert(a);
                    break;
                }
            }
        }
        out.push_back(std::move(comp_atoms));
    }
    return out;
}

std::vector<InterfaceComponent> interface_components(const PatternTree& p, int t) {
    if (t == 0) throw RootHasNoParent("the root node has no interface components");
    int parent = p.node(t).parent;
    std::set<std::string> interface;
    {
        auto tv = p.vars_of(t);
        for (const auto& v : p.vars_of(parent))
            if (tv.count(v)) interface.insert(v);
    }
    std::set<std::string> parent_fvars;
    for (const auto& v : p.vars_of(parent))
        if (p.free_vars().count(v)) parent_fvars.insert(v);

    std::vector<InterfaceComponent> out;
    auto fill_vars = [&](InterfaceComponent& c) {
        auto cv = variables_of(c.atoms);
        for (const auto& v : cv) {
            if (interface.count(v) && !p.free_vars().count(v)) c.inherited.insert(v);
            if (parent_fvars.count(v)) c.inherited_plus.insert(v);
        }
        c.inherited_plus.insert(c.inherited.begin(), c.inherited.end());
    };
    for (const auto& a : p.node(t).atoms) {
        auto av = variables_of({a});
        bool inside = true;
        for (const auto& v : av)
            if (!interface.count(v)) { inside = false; break; }
        if (!inside) continue;
        InterfaceComponent c;
        c.node = t;
        c.atoms = {a};
        c.kind = InterfaceComponent::Kind::Type1;
        fill_vars(c);
        out.push_back(std::move(c));
    }
    for (auto& atoms : s_components(p.node(t).atoms, interface)) {
        InterfaceComponent c;
        c.node = t;
        c.atoms = std::move(atoms);
        c.kind = InterfaceComponent::Kind::Type2;
        fill_vars(c);
        out.push_back(std::move(c));
    }
    return out;
}

std::set<Mapping> stop_set(const PatternTree& p, const InterfaceComponent& comp,
                           const Structure& db, const Mapping& mu, const Limits& limits) {
    (void)p;
    if (static_cast<int>(comp.inherited.size()) > limits.stop_width_cap)
        throw WidthCapExceeded("component has " + std::to_string(comp.inherited.size()) +
                               " inherited variables, more than the cap of " +
                               std::to_string(limits.stop_width_cap));
    Mapping mu_s = restrict_mapping(mu, variables_of(comp.atoms));
    std::set<Value> pinned(comp.inherited.begin(), comp.inherited.end());
    for (const auto& [v, c] : mu_s) pinned.insert(v);

    PreparedExt prep =
        prepare_ext(ExtensionPair{singleton_marking(pinned), canonical_structure(comp.atoms)},
                    limits);
    std::vector<std::string> vars(comp.inherited.begin(), comp.inherited.end());
    std::vector<Value> dom(db.domain.begin(), db.domain.end());
    std::set<Mapping> stop;
    std::vector<size_t> pick(vars.size(), 0);
    // Odometer over dom^vars; the empty product yields the empty mapping.
    while (true) {
        Mapping nu;
        bool valid = true;
        for (size_t i = 0; i < vars.size(); ++i) {
            if (dom.empty()) { valid = false; break; }
            nu.emplace(vars[i], dom[pick[i]]);
        }
        if (!valid && !vars.empty()) break;
        Mapping h = nu;
        for (const auto& [v, c] : mu_s) h.emplace(v, c);
        Structure target = union_structures(db, marking_facts(pinned, h));
        if (!ext_decide(prep, target, h, limits)) stop.insert(std::move(nu));
        // Advance the odometer.
        size_t i = 0;
        for (; i < pick.size(); ++i) {
            if (++pick[i] < dom.size()) break;
            pick[i] = 0;
        }
        if (i == pick.size()) break;
    }
    return stop;
}

namespace {

CiaAtom make_cia(long subtree_seq, const InterfaceComponent& comp, size_t comp_index) {
    CiaAtom cia;
    cia.symbol = Symbol{"__cia_" + std::to_string(subtree_seq) + "_" +
                            std::to_string(comp.node) + "_" + std::to_string(comp_index),
                        {}};
    cia.args.assign(comp.inherited.begin(), comp.inherited.end());
    return cia;
}

// Membership check of mu(free) in q(D') routed through the extension-core
// rewriting so the condition-(c) decomposition is what gets solved.
bool cq_check(const std::set<Atom>& body, const std::set<std::string>& free, const Structure& db,
              const Mapping& mu, const Limits& limits) {
    auto vars = variables_of(body);
    if (static_cast<int>(vars.size()) + static_cast<int>(free.size()) <=
        limits.core_domain_limit) {
        Structure anchor = singleton_marking(std::set<Value>(free.begin(), free.end()));
        Structure target = union_structures(db, marking_facts(anchor.domain, mu));
        ExtInstance inst = make_ext_instance(
            ExtensionPair{std::move(anchor), canonical_structure(body)}, std::move(target),
            restrict_mapping(mu, free));
        return ext_via_extcore(inst, limits);
    }
    std::vector<std::string> freev(free.begin(), free.end());
    return evaluate_cq(body, freev, db, restrict_mapping(mu, free), limits);
}

}  // namespace

bool eval_fpt(const PatternTree& p, const Structure& db, const Mapping& mu, const Limits& limits,
              FptTrace* trace, bool prune) {
    if (!is_well_designed(p)) throw NotWellDesigned("eval_fpt requires a well-designed pattern tree");
    for (const auto& [v, c] : mu)
        if (!p.free_vars().count(v))
            throw UsageError("mapping binds " + v + ", which is not a free variable");

    PatternTree pruned = prune ? prune_to_relevant(p) : p;
    std::set<int> relevant;
    if (!prune) relevant = relevant_nodes(p);

    std::set<std::string> domset;
    for (const auto& [v, c] : mu) domset.insert(v);

    // stop sets are subtree-independent; memoize per (node, component, mu|S).
    std::map<std::tuple<int, std::set<Atom>, Mapping>, std::set<Mapping>> stop_cache;
    auto stop_of = [&](const InterfaceComponent& comp) -> const std::set<Mapping>& {
        auto key = std::make_tuple(comp.node, comp.atoms,
                                   restrict_mapping(mu, variables_of(comp.atoms)));
        auto it = stop_cache.find(key);
        if (it != stop_cache.end()) return it->second;
        return stop_cache.emplace(key, stop_set(pruned, comp, db, mu, limits)).first->second;
    };

    long subtree_seq = 0;
    bool found = false;
    for (const auto& sub : root_subtrees(pruned, 1L << 20)) {
        ++subtree_seq;
        if (pruned.fvars_of(sub.nodes) != domset) continue;
        std::vector<int> children = subtree_children(pruned, sub);
        if (!prune) {
            std::vector<int> filtered;
            for (int c : children)
                if (relevant.count(c)) filtered.push_back(c);
            children = std::move(filtered);
        }
        std::vector<std::vector<InterfaceComponent>> comps;
        comps.reserve(children.size());
        bool empty_product = false;
        for (int c : children) {
            comps.push_back(interface_components(pruned, c));
            if (comps.back().empty()) empty_product = true;
        }
        if (empty_product) continue;  // a child with an empty label always extends

        std::vector<size_t> pick(children.size(), 0);
        while (true) {
            std::set<Atom> body = pruned.label_of(sub.nodes);
            Structure dprime = db;
            std::vector<InterfaceComponent> combo;
            for (size_t i = 0; i < children.size(); ++i) {
                const InterfaceComponent& comp = comps[i][pick[i]];
                combo.push_back(comp);
                CiaAtom cia = make_cia(subtree_seq, comp, pick[i]);
                body.insert(cia.to_atom());
                for (const auto& nu : stop_of(comp)) {
                    Tuple fact;
                    fact.reserve(cia.args.size());
                    for (const auto& v : cia.args) fact.push_back(nu.at(v));
                    dprime.add_tuple(cia.symbol, std::move(fact));
                }
            }
            bool matched = cq_check(body, domset, dprime, mu, limits);
            if (trace)
                trace->entries.push_back(FptTrace::Entry{sub, combo, dprime, matched});
            if (matched) {
                found = true;
                break;
            }
            size_t i = 0;
            for (; i < pick.size(); ++i) {
                if (++pick[i] < comps[i].size()) break;
                pick[i] = 0;
            }
            if (i == pick.size()) break;
        }
        if (found) break;
    }
    return found;
}

TwValue structure_treewidth(const Structure& s, const Limits& limits) {
    Graph g = gaifman_graph(s);
    int n = static_cast<int>(g.vertices.size());
    if (n <= limits.tw_vertex_limit) {
        auto td = treewidth_exact(g, n, limits);  // cap n never truncates
        TwValue tw;
        tw.lower = tw.upper = td->width;
        tw.exact = true;
        return tw;
    }
    TwValue tw;
    tw.lower = treewidth_lower_bound(g);
    tw.upper = treewidth_upper(g).width;
    tw.exact = false;
    return tw;
}

namespace {

std::string atoms_to_text(const std::set<Atom>& atoms) {
    std::string out;
    for (const auto& a : atoms) {
        if (!out.empty()) out += " ";
        out += to_string(a);
    }
    return out.empty() ? "(empty)" : out;
}

// Extension-core treewidth with a graceful fallback when the core search is
// out of budget: the union's Gaifman graph minus the anchor elements bounds
// the extension core from above.
TwValue pair_extcore_tw(const ExtensionPair& pair, const Limits& limits,
                        std::vector<std::string>* notes, const std::string& what) {
    try {
        Structure e = extension_core(pair, limits);
        return structure_treewidth(e, limits);
    } catch (const LimitError& err) {
        if (notes) notes->push_back(what + ": " + err.what() + "; reporting an upper bound");
        Structure u = union_structures(pair.anchor, pair.extension);
        std::set<Value> keep;
        for (const auto& v : u.domain)
            if (!pair.anchor.domain.count(v)) keep.insert(v);
        Structure rest = restrict_structure(u, keep);
        TwValue tw;
        tw.lower = -1;
        tw.upper = treewidth_upper(gaifman_graph(rest)).width;
        tw.exact = false;
        return tw;
    }
}

void fold_max(TwValue& acc, const TwValue& v) {
    if (v.upper > acc.upper) acc = v;
}

}  // namespace

TractabilityReport check_conditions(const PatternTree& p, int c, long combo_cap,
                                    const Limits& limits) {
    TractabilityReport rep;
    rep.c = c;
    rep.well_designed = is_well_designed(p);
    rep.simple = is_simple(p);
    rep.projection_free = is_projection_free(p);
    rep.conditions_applicable = rep.well_designed;

    if (rep.conditions_applicable) {
        std::set<int> relevant = relevant_nodes(p);

        // (a) extension cores of the marked interface components.
        rep.a_max = TwValue{-1, -1, true};
        for (int t : relevant) {
            if (t == 0) continue;
            for (const auto& comp : interface_components(p, t)) {
                ExtensionPair pair{
                    singleton_marking(std::set<Value>(comp.inherited_plus.begin(),
                                                      comp.inherited_plus.end())),
                    canonical_structure(comp.atoms)};
                TwValue tw = pair_extcore_tw(pair, limits, &rep.notes, "condition (a)");
                if (tw.upper > rep.a_max.upper) {
                    rep.a_max = tw;
                    rep.a_witness = "node " + std::to_string(p.node(t).id) + ": " +
                                    atoms_to_text(comp.atoms);
                }
            }
        }
        rep.a_holds = rep.a_max.upper <= c;

        // (b) interface component width.
        rep.b_width = 0;
        for (int t : relevant) {
            if (t == 0) continue;
            for (const auto& comp : interface_components(p, t)) {
                int w = static_cast<int>(comp.inherited.size());
                if (w > rep.b_width) {
                    rep.b_width = w;
                    rep.b_witness = "node " + std::to_string(p.node(t).id) + ": " +
                                    atoms_to_text(comp.atoms);
                }
            }
        }
        rep.b_holds = rep.b_width <= c;

        // (c) extension cores of the candidate solution-check queries.
        auto run_c = [&](const PatternTree& tree, const std::set<int>& rel, TwValue& maxv,
                         std::string* witness, bool* truncated) {
            maxv = TwValue{-1, -1, true};
            bool sub_truncated = false;
            auto subs = root_subtrees_capped(tree, limits.subtree_cap, &sub_truncated);
            if (sub_truncated) *truncated = true;
            long combos_done = 0;
            for (const auto& sub : subs) {
                std::vector<int> children;
                for (int ch : subtree_children(tree, sub))
                    if (rel.count(ch)) children.push_back(ch);
                std::vector<std::vector<InterfaceComponent>> comps;
                bool empty_product = false;
                for (int ch : children) {
                    comps.push_back(interface_components(tree, ch));
                    if (comps.back().empty()) empty_product = true;
                }
                if (empty_product) continue;
                std::vector<size_t> pick(children.size(), 0);
                while (true) {
                    if (++combos_done > combo_cap) {
                        *truncated = true;
                        return;
                    }
                    std::set<Atom> body = tree.label_of(sub.nodes);
                    for (size_t i = 0; i < children.size(); ++i)
                        body.insert(make_cia(0, comps[i][pick[i]], pick[i]).to_atom());
                    auto fv = tree.fvars_of(sub.nodes);
                    ExtensionPair pair{singleton_marking(std::set<Value>(fv.begin(), fv.end())),
                                       canonical_structure(body)};
                    TwValue tw = pair_extcore_tw(pair, limits, &rep.notes, "condition (c)");
                    if (tw.upper > maxv.upper) {
                        maxv = tw;
                        if (witness) {
                            std::string w = "subtree {";
                            bool first = true;
                            for (int n : sub.nodes) {
                                if (!first) w += ",";
                                first = false;
                                w += std::to_string(tree.node(n).id);
                            }
                            w += "}: " + atoms_to_text(body);
                            *witness = std::move(w);
                        }
                    }
                    size_t i = 0;
                    for (; i < pick.size(); ++i) {
                        if (++pick[i] < comps[i].size()) break;
                        pick[i] = 0;
                    }
                    if (i == pick.size()) break;
                }
            }
        };

        PatternTree pruned = prune_to_relevant(p);
        std::set<int> all_pruned;
        for (int i = 0; i < pruned.size(); ++i) all_pruned.insert(i);
        run_c(pruned, all_pruned, rep.c_max, &rep.c_witness, &rep.c_truncated);
        rep.c_holds = rep.c_max.upper <= c;
        if (pruned.size() != p.size()) {
            bool trunc2 = false;
            run_c(p, relevant_nodes(p), rep.c_unpruned_max, nullptr, &trunc2);
            rep.c_unpruned_differs = rep.c_unpruned_max.upper != rep.c_max.upper;
            if (trunc2) rep.c_truncated = true;
        }
        if (rep.c_truncated)
            rep.notes.push_back("condition (c): combination enumeration truncated at the cap");
    } else {
        rep.notes.push_back("conditions (a)/(b)/(c) need a well-designed tree");
    }

    if (rep.projection_free) {
        rep.csts_applicable = true;
        rep.csts_max = TwValue{-1, -1, true};
        try {
            for (const auto& pair : csts_all(p, limits.subtree_cap, limits)) {
                ExtensionPair ep{canonical_structure(pair.context),
                                 canonical_structure(pair.child_label)};
                TwValue tw = pair_extcore_tw(ep, limits, &rep.notes, "csts quantity");
                fold_max(rep.csts_max, tw);
            }
        } catch (const CapExceeded& err) {
            rep.csts_truncated = true;
            rep.notes.push_back(std::string("csts quantity: ") + err.what());
        }
    }
    return rep;
}

}  // namespace ptq

#include "ptq/csts.hpp"

#include <algorithm>

#include "ptq/errors.hpp"
#include "ptq/ext.hpp"
#include "ptq/homomorphism.hpp"

namespace ptq {

namespace {

std::set<Atom> merged(const std::set<Atom>& a, const std::set<Atom>& b) {
    std::set<Atom> out = a;
    out.insert(b.begin(), b.end());
    return out;
}

// Homomorphism from pair i's atoms into pair j's atoms fixing i's context
// variables pointwise.
bool eliminates(const CriticalPair& i, const CriticalPair& j, const Limits& limits) {
    Structure src = canonical_structure(merged(i.context, i.child_label));
    Structure tgt = canonical_structure(merged(j.context, j.child_label));
    Mapping fixed;
    for (const auto& v : variables_of(i.context)) {
        if (!tgt.domain.count(v)) return false;  // identity cannot land in the target
        fixed.emplace(v, v);
    }
    return find_homomorphism(src, tgt, fixed, limits).has_value();
}

}  // namespace

std::vector<CriticalPair> critical_subtrees(const PatternTree& p, const Subtree& sub,
                                            ScanOrder order, const Limits& limits) {
    if (!is_valid_subtree(p, sub)) throw UsageError("not a root-containing subtree");
    std::vector<int> children = subtree_children(p, sub);  // preorder
    std::vector<CriticalPair> pairs;
    for (int child : children) {
        std::set<Atom> context;
        int child_pos = p.preorder_pos(child);
        for (int n : sub.nodes) {
            if (p.preorder_pos(n) >= child_pos) continue;
            const auto& atoms = p.node(n).atoms;
            context.insert(atoms.begin(), atoms.end());
        }
        pairs.push_back(CriticalPair{std::move(context), p.node(child).atoms, child});
    }
    std::vector<size_t> scan(pairs.size());
    for (size_t i = 0; i < scan.size(); ++i) scan[i] = i;
    if (order == ScanOrder::Reverse) std::reverse(scan.begin(), scan.end());

    std::vector<char> alive(pairs.size(), 1);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i : scan) {
            if (!alive[i]) continue;
            for (size_t j : scan) {
                if (i == j || !alive[j]) continue;
                if (eliminates(pairs[i], pairs[j], limits)) {
                    alive[j] = 0;
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
    }
    // An eliminated pair whose witnesses were all eliminated later may end up
    // uncovered; restore such pairs so every child test stays accounted for.
    changed = true;
    while (changed) {
        changed = false;
        for (size_t j = 0; j < pairs.size(); ++j) {
            if (alive[j]) continue;
            bool covered = false;
            for (size_t i = 0; i < pairs.size() && !covered; ++i)
                if (alive[i] && i != j && eliminates(pairs[i], pairs[j], limits)) covered = true;
            if (!covered) {
                alive[j] = 1;
                changed = true;
            }
        }
    }
    std::vector<CriticalPair> out;
    for (size_t i = 0; i < pairs.size(); ++i)
        if (alive[i]) out.push_back(pairs[i]);
    return out;
}

std::set<CriticalPair> csts_all(const PatternTree& p, long subtree_cap, const Limits& limits) {
    std::set<CriticalPair> out;
    for (const auto& sub : root_subtrees(p, subtree_cap))
        for (auto& pair : critical_subtrees(p, sub, ScanOrder::Forward, limits))
            out.insert(std::move(pair));
    return out;
}

bool eval_projection_free(const PatternTree& p, const Structure& db, const Mapping& mu,
                          const Limits& limits) {
    if (!is_projection_free(p)) throw UsageError("the pattern tree is not projection free");
    auto witness = pp_solution_subtree(p, db, mu);
    if (!witness) return false;
    std::set<std::string> dom;
    for (const auto& [v, c] : mu) dom.insert(v);

    // The pairwise elimination argument needs every mu-bound variable of a
    // child label to be pinned by that child's context already. That holds
    // for well-designed trees; when it fails we keep every child pair and
    // test each one with its exact pin set.
    std::vector<int> children = subtree_children(p, *witness);
    bool aligned = true;
    for (int child : children) {
        std::set<Atom> context;
        int child_pos = p.preorder_pos(child);
        for (int n : witness->nodes)
            if (p.preorder_pos(n) < child_pos) {
                const auto& atoms = p.node(n).atoms;
                context.insert(atoms.begin(), atoms.end());
            }
        auto ctx_vars = variables_of(context);
        for (const auto& v : p.vars_of(child)) {
            if (dom.count(v) && !ctx_vars.count(v)) {
                aligned = false;
                break;
            }
        }
        if (!aligned) break;
    }

    std::vector<CriticalPair> pairs;
    if (aligned) {
        pairs = critical_subtrees(p, *witness, ScanOrder::Forward, limits);
    } else {
        for (int child : children) {
            std::set<Atom> context;
            int child_pos = p.preorder_pos(child);
            for (int n : witness->nodes)
                if (p.preorder_pos(n) < child_pos) {
                    const auto& atoms = p.node(n).atoms;
                    context.insert(atoms.begin(), atoms.end());
                }
            pairs.push_back(CriticalPair{std::move(context), p.node(child).atoms, child});
        }
    }

    for (const auto& pair : pairs) {
        auto ctx_vars = variables_of(pair.context);
        // Pins beyond the context: mu-bound label variables occurring before
        // the child in the traversal, marked so the extension respects them.
        Mapping before = restrict_before(p, mu, pair.child);
        std::set<Value> extra;
        for (const auto& v : variables_of(pair.child_label))
            if (before.count(v) && !ctx_vars.count(v)) extra.insert(v);
        Structure anchor = union_structures(canonical_structure(pair.context),
                                            singleton_marking(extra));
        Structure extension = canonical_structure(merged(pair.context, pair.child_label));
        Mapping h;
        for (const auto& v : ctx_vars) h.emplace(v, mu.at(v));
        for (const auto& v : extra) h.emplace(v, before.at(v));
        Structure target = union_structures(db, marking_facts(extra, h));
        ExtInstance inst = make_ext_instance(ExtensionPair{std::move(anchor), std::move(extension)},
                                             std::move(target), std::move(h));
        if (ext_via_extcore(inst, limits)) return false;  // extendable child: not maximal
    }
    return true;
}

}  // namespace ptq

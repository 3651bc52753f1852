#include "ptq/ext.hpp"

#include "ptq/errors.hpp"
#include "ptq/graph.hpp"
#include "ptq/homomorphism.hpp"
#include "ptq/treewidth.hpp"

namespace ptq {

Structure marking_facts(const std::set<Value>& elements, const Mapping& h) {
    Structure out;
    for (const auto& e : elements) {
        auto it = h.find(e);
        if (it == h.end()) continue;
        out.add_tuple(marking_symbol(e), {it->second});
    }
    return out;
}

ExtInstance make_ext_instance(ExtensionPair pair, Structure target, Mapping anchor_map) {
    for (const auto& e : pair.anchor.domain)
        if (!anchor_map.count(e))
            throw InvalidAnchor("anchor mapping is not total: missing " + e);
    for (const auto& [v, c] : anchor_map) {
        if (!pair.anchor.domain.count(v))
            throw InvalidAnchor("anchor mapping binds " + v + " outside the anchor domain");
        if (!target.domain.count(c))
            throw InvalidAnchor("anchor mapping sends " + v + " outside the target domain");
    }
    for (const auto& [sym, tuples] : pair.anchor.relations) {
        auto it = target.relations.find(sym);
        for (const auto& t : tuples) {
            Tuple image;
            image.reserve(t.size());
            for (const auto& x : t) image.push_back(anchor_map.at(x));
            if (it == target.relations.end() || !it->second.count(image))
                throw InvalidAnchor("anchor mapping is not a homomorphism on " + to_string(sym));
        }
    }
    return ExtInstance{std::move(pair), std::move(target), std::move(anchor_map)};
}

bool ext_bruteforce(const ExtInstance& i, const Limits& limits) {
    Mapping fixed;
    for (const auto& e : i.pair.anchor.domain) {
        if (!i.pair.extension.domain.count(e)) continue;
        auto it = i.anchor_map.find(e);
        if (it == i.anchor_map.end())
            throw InvalidAnchor("anchor mapping is not total: missing " + e);
        fixed.emplace(e, it->second);
    }
    return find_homomorphism(i.pair.extension, i.target, fixed, limits).has_value();
}

PreparedExt prepare_ext(const ExtensionPair& pair, const Limits& limits) {
    Structure u = union_structures(union_structures(pair.anchor, pair.extension),
                                   singleton_marking(pair.anchor.domain));
    Structure c = core(u, limits);
    std::set<Symbol> marks;
    for (const auto& e : pair.anchor.domain) marks.insert(marking_symbol(e));
    Structure s = drop_relations(c, marks);
    return PreparedExt{pair.anchor, union_structures(pair.anchor, s)};
}

bool ext_decide(const PreparedExt& prep, const Structure& target, const Mapping& anchor_map,
                const Limits& limits) {
    auto [qp, dp] = projection_under_hom(prep.source, target, anchor_map);
    Graph g = gaifman_graph(qp);
    if (static_cast<int>(g.vertices.size()) <= limits.tw_vertex_limit) {
        auto td = treewidth_exact(g, limits.width_budget, limits);
        if (td) return hom_via_decomposition(qp, *td, dp, {}, limits).has_value();
    }
    return find_homomorphism(qp, dp, {}, limits).has_value();
}

bool ext_via_extcore(const ExtInstance& i, const Limits& limits) {
    return ext_decide(prepare_ext(i.pair, limits), i.target, i.anchor_map, limits);
}

ExtensionPair cq_to_ext(const std::set<Atom>& body, const std::vector<std::string>& free) {
    Atom head;
    head.symbol = Symbol{"Ans", {}};
    for (const auto& v : free) head.args.push_back(Term::var(v));
    return ExtensionPair{canonical_structure({head}), canonical_structure(body)};
}

}  // namespace ptq

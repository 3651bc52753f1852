#pragma once

#include "ptq/config.hpp"
#include "ptq/core_ops.hpp"
#include "ptq/relational.hpp"

namespace ptq {

// EXT instance: does a homomorphism extension -> target exist that agrees
// with anchor_map on the shared domain elements? anchor_map must be a total
// homomorphism anchor -> target (checked by make_ext_instance). When the
// anchor carries marker relations, the target must contain their h-images;
// marking_facts builds them.
struct ExtInstance {
    ExtensionPair pair;
    Structure target;
    Mapping anchor_map;
};

ExtInstance make_ext_instance(ExtensionPair pair, Structure target, Mapping anchor_map);

// {R_v(h(v))} facts for every marked element of `elements`.
Structure marking_facts(const std::set<Value>& elements, const Mapping& h);

bool ext_bruteforce(const ExtInstance& i, const Limits& limits = {});

// Rewrites the instance through the core of A ∪ B ∪ S_dom(A) and the
// projection under h; decides the residual HOM instance by decomposition DP
// when its treewidth fits limits.width_budget, else by backtracking.
bool ext_via_extcore(const ExtInstance& i, const Limits& limits = {});

// The anchor/source part of the rewriting, reusable across many h.
struct PreparedExt {
    Structure anchor;
    Structure source;  // anchor ∪ (core(A ∪ B ∪ S_dom(A)) minus markers)
};

PreparedExt prepare_ext(const ExtensionPair& pair, const Limits& limits = {});
bool ext_decide(const PreparedExt& prep, const Structure& target, const Mapping& anchor_map,
                const Limits& limits = {});

// extcq: anchor = canonical structure of the head Ans(free), extension =
// canonical structure of the body.
ExtensionPair cq_to_ext(const std::set<Atom>& body, const std::vector<std::string>& free);

}  // namespace ptq

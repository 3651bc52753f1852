#pragma once

#include <functional>
#include <optional>

#include "ptq/config.hpp"
#include "ptq/relational.hpp"
#include "ptq/treewidth.hpp"

namespace ptq {

// Total homomorphism source -> target extending `fixed`, or nullopt.
// Backtracking with forward pruning; variable order is smallest candidate set
// first, ties by name, so results are deterministic. A source symbol missing
// from the target counts as an empty relation unless limits.strict_symbols.
std::optional<Mapping> find_homomorphism(const Structure& source, const Structure& target,
                                         const Mapping& fixed, const Limits& limits = {});

// Calls fn for every total homomorphism extending fixed, in deterministic
// order; stops early when fn returns false. Returns false iff stopped early.
bool enumerate_homomorphisms(const Structure& source, const Structure& target,
                             const Mapping& fixed,
                             const std::function<bool(const Mapping&)>& fn,
                             const Limits& limits = {});

// Same answer semantics as find_homomorphism, by dynamic programming over a
// tree decomposition of the source's Gaifman graph.
std::optional<Mapping> hom_via_decomposition(const Structure& source, const TreeDecomposition& td,
                                             const Structure& target, const Mapping& fixed,
                                             const Limits& limits = {});

// Membership of binding(free) in q(db) for q = Ans(free) <- body. Uses the
// decomposition DP when the body's treewidth fits limits.width_budget.
bool evaluate_cq(const std::set<Atom>& body, const std::vector<std::string>& free,
                 const Structure& db, const Mapping& binding, const Limits& limits = {});

}  // namespace ptq

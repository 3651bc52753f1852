#pragma once

#include <set>
#include <vector>

#include "ptq/config.hpp"
#include "ptq/pattern_tree.hpp"

namespace ptq {

// One pending child test of a subtree: the labels of the subtree nodes
// preceding the child, the child's own label, and the child node.
struct CriticalPair {
    std::set<Atom> context;
    std::set<Atom> child_label;
    int child = -1;

    auto operator<=>(const CriticalPair&) const = default;
};

enum class ScanOrder { Forward, Reverse };

// Child-test pairs of `sub` surviving homomorphism-based elimination: a pair
// j is dropped while some pair i admits a homomorphism into j that is the
// identity on i's context variables. Scanning is deterministic; a final pass
// restores any dropped pair that lost all its surviving witnesses.
std::vector<CriticalPair> critical_subtrees(const PatternTree& p, const Subtree& sub,
                                            ScanOrder order = ScanOrder::Forward,
                                            const Limits& limits = {});

// Union over every root-containing subtree; CapExceeded beyond subtree_cap.
std::set<CriticalPair> csts_all(const PatternTree& p, long subtree_cap,
                                const Limits& limits = {});

// Projection-free evaluation: pp-solution check, then one extension test per
// surviving pair. Agrees with is_solution_bruteforce.
bool eval_projection_free(const PatternTree& p, const Structure& db, const Mapping& mu,
                          const Limits& limits = {});

}  // namespace ptq

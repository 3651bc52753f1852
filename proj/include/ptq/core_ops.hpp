#pragma once

#include <utility>

#include "ptq/config.hpp"
#include "ptq/relational.hpp"

namespace ptq {

// Pair (A, B) of the extension problem: anchor and extension may share
// domain elements.
struct ExtensionPair {
    Structure anchor;
    Structure extension;

    bool operator==(const ExtensionPair&) const = default;
};

// Minimal retract, computed by folding single element pairs first and
// falling back to a full search for a non-surjective endomorphism.
// Throws DomainLimit beyond limits.core_domain_limit.
Structure core(const Structure& a, const Limits& limits = {});

// core(A ∪ B ∪ S_dom(A)) with the marker relations removed and dom(A)
// projected out. The result carries selection-annotated symbols and its
// domain is contained in dom(B) \ dom(A).
Structure extension_core(const ExtensionPair& p, const Limits& limits = {});

// Moves every position holding an element of v into the symbol's selection
// annotations; all-selected tuples become 0-ary annotated facts.
Structure projection_under_set(const Structure& s, const std::set<Value>& v);

// Projection of (query, data) under a partial mapping h into dom(data):
// fully mapped tuples present in data are dropped, the rest are annotated
// with their h-images, and data relations are the matching selections.
std::pair<Structure, Structure> projection_under_hom(const Structure& query,
                                                     const Structure& data, const Mapping& h);

// Exact isomorphism test by bijection search; intended for small structures
// (test assertions, canonical-representative checks).
bool is_isomorphic(const Structure& a, const Structure& b);

}  // namespace ptq

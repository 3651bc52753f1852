#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ptq/config.hpp"
#include "ptq/graph.hpp"

namespace ptq {

// Rooted tree of bags. Node 0 is the root; parent[0] == -1.
// Width is max bag size minus one (-1 for the empty graph).
struct TreeDecomposition {
    std::vector<std::set<std::string>> bags;
    std::vector<int> parent;
    int width = -1;

    bool operator==(const TreeDecomposition&) const = default;
};

// Checks vertex/edge coverage and per-vertex connectedness against g.
bool validate_decomposition(const TreeDecomposition& td, const Graph& g,
                            std::string* why = nullptr);

// Minimum-width decomposition via branch-and-bound over elimination orders.
// Returns nullopt when the true treewidth exceeds cap. Throws VertexLimit
// when the graph is larger than limits.tw_vertex_limit.
std::optional<TreeDecomposition> treewidth_exact(const Graph& g, int cap,
                                                 const Limits& limits = {});

// Min-fill elimination heuristic; always returns a valid decomposition.
TreeDecomposition treewidth_upper(const Graph& g);

// Cheap lower bound (max-min-degree over subgraphs).
int treewidth_lower_bound(const Graph& g);

}  // namespace ptq

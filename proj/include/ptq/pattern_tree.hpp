#pragma once

#include <optional>
#include <set>
#include <vector>

#include "ptq/config.hpp"
#include "ptq/relational.hpp"

namespace ptq {

// Rooted ordered tree of atom-set labels plus the free variable set. Node 0
// is the root; child order is significant and fixes the traversal order.
// `id` is the external label kept through pruning and serialization.
class PatternTree {
public:
    struct Node {
        int id = 0;
        int parent = -1;
        std::vector<int> children;
        std::set<Atom> atoms;

        bool operator==(const Node&) const = default;
    };

    PatternTree() = default;
    explicit PatternTree(std::set<Atom> root_atoms, std::set<std::string> free = {});

    // Appends a child under `parent` (index), returns the new node's index.
    int add_node(int parent, std::set<Atom> atoms, int id = -1);

    int size() const { return static_cast<int>(nodes_.size()); }
    const Node& node(int i) const { return nodes_.at(i); }
    const std::vector<Node>& nodes() const { return nodes_; }
    const std::set<std::string>& free_vars() const { return free_vars_; }
    void set_free_vars(std::set<std::string> fv) { free_vars_ = std::move(fv); }

    // Depth-first left-to-right order; positions index into it.
    const std::vector<int>& preorder() const;
    int preorder_pos(int node) const;
    bool before(int a, int b) const { return preorder_pos(a) < preorder_pos(b); }

    std::set<std::string> vars_of(int node) const;
    std::set<std::string> all_vars() const;
    std::set<Atom> label_of(const std::set<int>& nodes) const;
    std::set<std::string> vars_of(const std::set<int>& nodes) const;
    std::set<std::string> fvars_of(const std::set<int>& nodes) const;

    // Structural equality: same labels, ids, order, and free variables;
    // internal node numbering is allowed to differ.
    bool operator==(const PatternTree& other) const;

private:
    std::vector<Node> nodes_;
    std::set<std::string> free_vars_;
    mutable std::vector<int> preorder_;
    mutable std::vector<int> preorder_pos_;
    void refresh_order() const;
};

// Connected node set containing the root.
struct Subtree {
    std::set<int> nodes;

    bool operator==(const Subtree&) const = default;
    auto operator<=>(const Subtree&) const = default;
};

bool is_valid_subtree(const PatternTree& p, const Subtree& s);
// Children of a subtree: nodes outside it whose parent is inside.
std::vector<int> subtree_children(const PatternTree& p, const Subtree& s);

// Every root-containing subtree, enumerated deterministically. Throws
// CapExceeded when there are more than cap of them.
std::vector<Subtree> root_subtrees(const PatternTree& p, long cap);
// Same but truncates at cap instead of throwing; sets *truncated.
std::vector<Subtree> root_subtrees_capped(const PatternTree& p, long cap, bool* truncated);
long count_root_subtrees(const PatternTree& p);

bool is_well_designed(const PatternTree& p);
bool is_simple(const PatternTree& p);
bool is_projection_free(const PatternTree& p);

// Maximal subtree witnessing mu as a pp-solution, or nullopt.
std::optional<Subtree> pp_solution_subtree(const PatternTree& p, const Structure& db,
                                           const Mapping& mu);

// mu restricted to the variables of nodes strictly before t.
Mapping restrict_before(const PatternTree& p, const Mapping& mu, int t);

// Reference semantics by exhaustive enumeration. Budgets are
// limits.oracle_max_vars / oracle_max_dom (BudgetExceeded beyond them).
std::set<Mapping> all_solutions_bruteforce(const PatternTree& p, const Structure& db,
                                           const Limits& limits = {});
bool is_solution_bruteforce(const PatternTree& p, const Structure& db, const Mapping& mu,
                            const Limits& limits = {});

}  // namespace ptq

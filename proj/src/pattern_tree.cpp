#include "ptq/pattern_tree.hpp"

#include <algorithm>
#include <functional>

#include "ptq/errors.hpp"
#include "ptq/homomorphism.hpp"

namespace ptq {

PatternTree::PatternTree(std::set<Atom> root_atoms, std::set<std::string> free)
    : free_vars_(std::move(free)) {
    Node root;
    root.atoms = std::move(root_atoms);
    nodes_.push_back(std::move(root));
}

int PatternTree::add_node(int parent, std::set<Atom> atoms, int id) {
    if (nodes_.empty()) {
        Node root;
        root.id = id == -1 ? 0 : id;
        root.atoms = std::move(atoms);
        nodes_.push_back(std::move(root));
        preorder_.clear();
        return 0;
    }
    Node n;
    n.parent = parent;
    n.atoms = std::move(atoms);
    int idx = static_cast<int>(nodes_.size());
    n.id = id == -1 ? idx : id;
    nodes_.push_back(std::move(n));
    nodes_.at(parent).children.push_back(idx);
    preorder_.clear();
    return idx;
}

bool PatternTree::operator==(const PatternTree& other) const {
    if (free_vars_ != other.free_vars_) return false;
    if (nodes_.size() != other.nodes_.size()) return false;
    if (nodes_.empty()) return true;
    std::function<bool(int, int)> same = [&](int a, int b) {
        const Node& na = nodes_[a];
        const Node& nb = other.nodes_[b];
        if (na.id != nb.id || na.atoms != nb.atoms) return false;
        if (na.children.size() != nb.children.size()) return false;
        for (size_t i = 0; i < na.children.size(); ++i)
            if (!same(na.children[i], nb.children[i])) return false;
        return true;
    };
    return same(0, 0);
}

void PatternTree::refresh_order() const {
    preorder_.clear();
    preorder_pos_.assign(nodes_.size(), -1);
    std::function<void(int)> dfs = [&](int v) {
        preorder_pos_[v] = static_cast<int>(preorder_.size());
        preorder_.push_back(v);
        for (int c : nodes_[v].children) dfs(c);
    };
    if (!nodes_.empty()) dfs(0);
}

const std::vector<int>& PatternTree::preorder() const {
    if (preorder_.size() != nodes_.size()) refresh_order();
    return preorder_;
}

int PatternTree::preorder_pos(int node) const {
    preorder();
    return preorder_pos_.at(node);
}

std::set<std::string> PatternTree::vars_of(int node) const {
    return variables_of(nodes_.at(node).atoms);
}

std::set<std::string> PatternTree::all_vars() const {
    std::set<std::string> out;
    for (const auto& n : nodes_) {
        auto v = variables_of(n.atoms);
        out.insert(v.begin(), v.end());
    }
    return out;
}

std::set<Atom> PatternTree::label_of(const std::set<int>& nodes) const {
    std::set<Atom> out;
    for (int i : nodes) {
        const auto& a = nodes_.at(i).atoms;
        out.insert(a.begin(), a.end());
    }
    return out;
}

std::set<std::string> PatternTree::vars_of(const std::set<int>& nodes) const {
    return variables_of(label_of(nodes));
}

std::set<std::string> PatternTree::fvars_of(const std::set<int>& nodes) const {
    std::set<std::string> out;
    for (const auto& v : vars_of(nodes))
        if (free_vars_.count(v)) out.insert(v);
    return out;
}

bool is_valid_subtree(const PatternTree& p, const Subtree& s) {
    if (!s.nodes.count(0)) return false;
    for (int n : s.nodes) {
        if (n < 0 || n >= p.size()) return false;
        if (n != 0 && !s.nodes.count(p.node(n).parent)) return false;
    }
    return true;
}

std::vector<int> subtree_children(const PatternTree& p, const Subtree& s) {
    std::vector<int> out;
    for (int n : p.preorder()) {
        if (s.nodes.count(n)) continue;
        int parent = p.node(n).parent;
        if (parent != -1 && s.nodes.count(parent)) out.push_back(n);
    }
    return out;
}

long count_root_subtrees(const PatternTree& p) {
    // count(t) = prod over children (1 + count(child)), saturating.
    const long cap = 1L << 40;
    std::function<long(int)> cnt = [&](int v) -> long {
        long prod = 1;
        for (int c : p.node(v).children) {
            prod *= 1 + cnt(c);
            if (prod > cap) return cap;
        }
        return prod;
    };
    return p.size() == 0 ? 0 : cnt(0);
}

std::vector<Subtree> root_subtrees(const PatternTree& p, long cap) {
    long total = count_root_subtrees(p);
    if (total > cap)
        throw CapExceeded("the tree has " + std::to_string(total) +
                          " root-containing subtrees, more than the cap of " + std::to_string(cap),
                          total);
    bool truncated = false;
    return root_subtrees_capped(p, cap, &truncated);
}

std::vector<Subtree> root_subtrees_capped(const PatternTree& p, long cap, bool* truncated) {
    std::vector<Subtree> out;
    *truncated = false;
    const auto& order = p.preorder();
    Subtree cur;
    std::function<void(size_t)> go = [&](size_t pos) {
        if (static_cast<long>(out.size()) >= cap) {
            *truncated = true;
            return;
        }
        if (pos == order.size()) {
            out.push_back(cur);
            return;
        }
        int n = order[pos];
        if (n == 0 || cur.nodes.count(p.node(n).parent)) {
            cur.nodes.insert(n);
            go(pos + 1);
            cur.nodes.erase(n);
        }
        if (n != 0) go(pos + 1);
    };
    if (p.size() > 0) go(0);
    return out;
}

bool is_well_designed(const PatternTree& p) {
    std::map<std::string, std::set<int>> occ;
    for (int i = 0; i < p.size(); ++i)
        for (const auto& v : p.vars_of(i)) occ[v].insert(i);
    for (const auto& [v, nodes] : occ) {
        // A node set is connected in a tree iff it has exactly one top
        // element (one whose parent lies outside the set).
        int tops = 0;
        for (int n : nodes) {
            int parent = p.node(n).parent;
            if (parent == -1 || !nodes.count(parent)) ++tops;
        }
        if (tops != 1) return false;
    }
    return true;
}

bool is_simple(const PatternTree& p) {
    std::map<std::string, int> symbol_count;
    for (const auto& n : p.nodes())
        for (const auto& a : n.atoms)
            if (++symbol_count[a.symbol.base] > 1) return false;
    return true;
}

bool is_projection_free(const PatternTree& p) { return p.free_vars() == p.all_vars(); }

namespace {

bool maps_label_in(const PatternTree& p, int node, const Structure& db, const Mapping& mu) {
    for (const auto& a : p.node(node).atoms) {
        Tuple image;
        image.reserve(a.args.size());
        for (const auto& t : a.args) {
            auto it = mu.find(t.name);
            if (it == mu.end()) return false;
            image.push_back(it->second);
        }
        if (!db.has_tuple(a.symbol, image)) return false;
    }
    return true;
}

}  // namespace

std::optional<Subtree> pp_solution_subtree(const PatternTree& p, const Structure& db,
                                           const Mapping& mu) {
    std::set<std::string> dom;
    for (const auto& [v, c] : mu) dom.insert(v);
    std::set<int> candidates;  // N = nodes with vars covered and label mapped in
    for (int i = 0; i < p.size(); ++i) {
        auto vars = p.vars_of(i);
        bool covered = std::includes(dom.begin(), dom.end(), vars.begin(), vars.end());
        if (covered && maps_label_in(p, i, db, mu)) candidates.insert(i);
    }
    if (!candidates.count(0)) return std::nullopt;
    Subtree sub;
    std::function<void(int)> grow = [&](int v) {
        sub.nodes.insert(v);
        for (int c : p.node(v).children)
            if (candidates.count(c)) grow(c);
    };
    grow(0);
    if (p.vars_of(sub.nodes) != dom) return std::nullopt;
    return sub;
}

Mapping restrict_before(const PatternTree& p, const Mapping& mu, int t) {
    std::set<std::string> vars;
    int pos = p.preorder_pos(t);
    for (int n : p.preorder()) {
        if (p.preorder_pos(n) >= pos) break;
        auto v = p.vars_of(n);
        vars.insert(v.begin(), v.end());
    }
    return restrict_mapping(mu, vars);
}

std::set<Mapping> all_solutions_bruteforce(const PatternTree& p, const Structure& db,
                                           const Limits& limits) {
    if (static_cast<int>(p.all_vars().size()) > limits.oracle_max_vars ||
        static_cast<int>(db.domain.size()) > limits.oracle_max_dom)
        throw BudgetExceeded("instance exceeds the brute-force oracle budget (" +
                             std::to_string(limits.oracle_max_vars) + " variables, " +
                             std::to_string(limits.oracle_max_dom) + " constants)");
    std::set<Mapping> pp;  // candidate mappings, total on their subtree's variables
    for (const auto& sub : root_subtrees(p, 1L << 20)) {
        Structure src = canonical_structure(p.label_of(sub.nodes));
        // Isolated query variables cannot occur (every var is in some atom),
        // so src.domain == vars of the subtree.
        enumerate_homomorphisms(src, db, {}, [&](const Mapping& nu) {
            pp.insert(nu);
            return true;
        });
    }
    std::set<Mapping> answers;
    for (const auto& nu : pp) {
        auto witness = pp_solution_subtree(p, db, nu);
        if (!witness) continue;
        bool maximal = true;
        for (int child : subtree_children(p, *witness)) {
            Mapping pins = restrict_before(p, nu, child);
            Structure child_src = canonical_structure(p.node(child).atoms);
            if (find_homomorphism(child_src, db, pins, limits)) {
                maximal = false;
                break;
            }
        }
        if (maximal) answers.insert(restrict_mapping(nu, p.free_vars()));
    }
    return answers;
}

bool is_solution_bruteforce(const PatternTree& p, const Structure& db, const Mapping& mu,
                            const Limits& limits) {
    for (const auto& [v, c] : mu)
        if (!p.free_vars().count(v))
            throw UsageError("mapping binds " + v + ", which is not a free variable");
    return all_solutions_bruteforce(p, db, limits).count(mu) > 0;
}

}  // namespace ptq

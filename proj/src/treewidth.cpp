#include "ptq/treewidth.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <unordered_map>

#include "ptq/errors.hpp"

namespace ptq {

namespace {

// Dense adjacency over vertex indices for the search.
struct DenseGraph {
    std::vector<std::string> names;
    std::vector<std::vector<char>> adj;

    explicit DenseGraph(const Graph& g) {
        names.assign(g.vertices.begin(), g.vertices.end());
        std::map<std::string, int> index;
        for (size_t i = 0; i < names.size(); ++i) index[names[i]] = static_cast<int>(i);
        adj.assign(names.size(), std::vector<char>(names.size(), 0));
        for (const auto& [u, v] : g.edges) {
            adj[index[u]][index[v]] = 1;
            adj[index[v]][index[u]] = 1;
        }
    }
    int size() const { return static_cast<int>(names.size()); }
};

int degree_in(const std::vector<std::vector<char>>& adj, const std::vector<char>& alive, int v) {
    int d = 0;
    for (size_t u = 0; u < adj.size(); ++u)
        if (alive[u] && adj[v][u]) ++d;
    return d;
}

// Eliminate v: clique-ify its alive neighborhood, then remove it.
void eliminate(std::vector<std::vector<char>>& adj, std::vector<char>& alive, int v) {
    std::vector<int> nb;
    for (size_t u = 0; u < adj.size(); ++u)
        if (alive[u] && adj[v][u]) nb.push_back(static_cast<int>(u));
    for (size_t i = 0; i < nb.size(); ++i)
        for (size_t j = i + 1; j < nb.size(); ++j) {
            adj[nb[i]][nb[j]] = 1;
            adj[nb[j]][nb[i]] = 1;
        }
    alive[v] = 0;
}

// Max over subgraphs of the minimum degree, computed greedily.
int mmd_lower_bound(std::vector<std::vector<char>> adj, std::vector<char> alive, int n) {
    int best = 0;
    int remaining = 0;
    for (int v = 0; v < n; ++v) remaining += alive[v];
    while (remaining > 1) {
        int minv = -1, mind = n + 1;
        for (int v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            int d = degree_in(adj, alive, v);
            if (d < mind) { mind = d; minv = v; }
        }
        best = std::max(best, mind);
        // Plain removal (no fill) keeps this a valid lower bound.
        alive[minv] = 0;
        --remaining;
    }
    return best;
}

struct BnB {
    const DenseGraph& g;
    int n;
    int best;                               // best width found so far (ub + 1 initially)
    std::vector<int> best_order;
    std::vector<int> order;
    std::unordered_map<uint64_t, int> seen; // eliminated-set -> best prefix width reached

    BnB(const DenseGraph& dg, int ub) : g(dg), n(dg.size()), best(ub) {}

    void search(std::vector<std::vector<char>>& adj, std::vector<char>& alive,
                uint64_t eliminated, int prefix_width, int remaining) {
        if (prefix_width >= best) return;
        if (remaining == 0) {
            best = prefix_width;
            best_order = order;
            return;
        }
        if (remaining - 1 <= prefix_width) {
            // Any order of the rest stays within prefix_width.
            best = prefix_width;
            best_order = order;
            for (int v = 0; v < n; ++v)
                if (alive[v]) best_order.push_back(v);
            return;
        }
        auto it = seen.find(eliminated);
        if (it != seen.end() && it->second <= prefix_width) return;
        seen[eliminated] = prefix_width;

        int lb = mmd_lower_bound(adj, alive, n);
        if (std::max(prefix_width, lb) >= best) return;

        for (int v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            int d = degree_in(adj, alive, v);
            int w = std::max(prefix_width, d);
            if (w >= best) continue;
            auto adj2 = adj;
            auto alive2 = alive;
            eliminate(adj2, alive2, v);
            order.push_back(v);
            search(adj2, alive2, eliminated | (uint64_t{1} << v), w, remaining - 1);
            order.pop_back();
        }
    }
};

// Decomposition from an elimination order: bag(v) = {v} + alive neighbors at
// elimination time; bag(v) hangs below the bag of its first later neighbor.
TreeDecomposition decomposition_from_order(const DenseGraph& g, const std::vector<int>& order) {
    int n = g.size();
    TreeDecomposition td;
    if (n == 0) {
        td.bags.push_back({});
        td.parent.push_back(-1);
        td.width = -1;
        return td;
    }
    auto adj = g.adj;
    std::vector<char> alive(n, 1);
    std::vector<int> pos(n);
    for (int i = 0; i < n; ++i) pos[order[i]] = i;
    std::vector<std::vector<int>> nbrs(n);
    for (int i = 0; i < n; ++i) {
        int v = order[i];
        for (int u = 0; u < n; ++u)
            if (alive[u] && u != v && adj[v][u]) nbrs[v].push_back(u);
        eliminate(adj, alive, v);
    }
    // Bags in elimination order; parent of bag(v) is the bag of the first
    // eliminated vertex among v's fill neighbors, or the previous root.
    std::vector<int> bag_of(n);
    int width = -1;
    for (int i = 0; i < n; ++i) {
        int v = order[i];
        std::set<std::string> bag = {g.names[v]};
        for (int u : nbrs[v]) bag.insert(g.names[u]);
        width = std::max(width, static_cast<int>(bag.size()) - 1);
        td.bags.push_back(std::move(bag));
        td.parent.push_back(-2);  // fixed up below
        bag_of[v] = i;
    }
    for (int i = 0; i < n; ++i) {
        int v = order[i];
        int next = -1;
        for (int u : nbrs[v])
            if (next == -1 || pos[u] < pos[next]) next = u;
        td.parent[i] = next == -1 ? -1 : bag_of[next];
    }
    // Multiple components give several -1 parents; chain them to bag 0's tree
    // so the result is a single tree. Reindex so the root is node 0.
    int root = -1;
    for (int i = 0; i < n; ++i) {
        if (td.parent[i] == -1) {
            if (root == -1) root = i;
            else td.parent[i] = root;
        }
    }
    if (root != 0) {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        std::swap(perm[0], perm[root]);
        TreeDecomposition out;
        out.bags.resize(n);
        out.parent.assign(n, -1);
        std::vector<int> inv(n);
        for (int i = 0; i < n; ++i) inv[perm[i]] = i;
        for (int i = 0; i < n; ++i) {
            out.bags[inv[i]] = td.bags[i];
            out.parent[inv[i]] = td.parent[i] == -1 ? -1 : inv[td.parent[i]];
        }
        td = std::move(out);
    }
    td.width = width;
    return td;
}

}  // namespace

bool validate_decomposition(const TreeDecomposition& td, const Graph& g, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (td.bags.empty()) return fail("no bags");
    if (td.bags.size() != td.parent.size()) return fail("bag/parent size mismatch");
    int roots = 0;
    for (size_t i = 0; i < td.parent.size(); ++i) {
        int p = td.parent[i];
        if (p == -1) ++roots;
        else if (p < 0 || p >= static_cast<int>(td.bags.size()) || p == static_cast<int>(i))
            return fail("bad parent index");
    }
    if (roots != 1 || td.parent[0] != -1) return fail("decomposition tree must have root 0");
    // Acyclicity: walking parents must terminate.
    for (size_t i = 0; i < td.parent.size(); ++i) {
        int steps = 0, cur = static_cast<int>(i);
        while (cur != -1) {
            cur = td.parent[cur];
            if (++steps > static_cast<int>(td.bags.size())) return fail("parent cycle");
        }
    }
    int width = -1;
    for (const auto& b : td.bags) width = std::max(width, static_cast<int>(b.size()) - 1);
    if (width != td.width) return fail("recorded width is wrong");
    // Coverage of vertices and edges.
    for (const auto& v : g.vertices) {
        bool found = false;
        for (const auto& b : td.bags)
            if (b.count(v)) { found = true; break; }
        if (!found) return fail("vertex " + v + " not covered");
    }
    for (const auto& [u, v] : g.edges) {
        bool found = false;
        for (const auto& b : td.bags)
            if (b.count(u) && b.count(v)) { found = true; break; }
        if (!found) return fail("edge {" + u + "," + v + "} not covered");
    }
    // Connectedness: the bags holding v must form a subtree.
    for (const auto& v : g.vertices) {
        std::vector<int> holders;
        for (size_t i = 0; i < td.bags.size(); ++i)
            if (td.bags[i].count(v)) holders.push_back(static_cast<int>(i));
        // Union-find style: climb from each holder towards the root while
        // staying inside holder bags; all must meet at one top holder.
        auto is_holder = [&](int i) { return td.bags[i].count(v) > 0; };
        int top = -1;
        for (int h : holders) {
            int cur = h;
            while (td.parent[cur] != -1 && is_holder(td.parent[cur])) cur = td.parent[cur];
            if (top == -1) top = cur;
            else if (top != cur) return fail("occurrences of " + v + " are disconnected");
        }
    }
    return true;
}

std::optional<TreeDecomposition> treewidth_exact(const Graph& g, int cap, const Limits& limits) {
    DenseGraph dg(g);
    int n = dg.size();
    if (n > limits.tw_vertex_limit)
        throw VertexLimit("graph with " + std::to_string(n) + " vertices exceeds the exact treewidth limit of " +
                          std::to_string(limits.tw_vertex_limit));
    if (n == 0) {
        TreeDecomposition td;
        td.bags.push_back({});
        td.parent.push_back(-1);
        td.width = -1;
        return td;
    }
    TreeDecomposition ub = treewidth_upper(g);
    int bound = std::min(ub.width, n - 1);
    BnB bnb(dg, bound + 1);
    {
        auto adj = dg.adj;
        std::vector<char> alive(n, 1);
        bnb.search(adj, alive, 0, -1, n);
    }
    int width = bnb.best;  // bnb.best was initialized to bound+1; search improves it
    std::vector<int> order = bnb.best_order;
    if (order.empty() || width > bound) {
        // Search could not beat the heuristic bound; the heuristic is optimal.
        width = ub.width;
        if (width > cap) return std::nullopt;
        return ub;
    }
    if (width > cap) return std::nullopt;
    TreeDecomposition td = decomposition_from_order(dg, order);
    int w = -1;
    for (const auto& b : td.bags) w = std::max(w, static_cast<int>(b.size()) - 1);
    td.width = w;
    return td;
}

TreeDecomposition treewidth_upper(const Graph& g) {
    DenseGraph dg(g);
    int n = dg.size();
    if (n == 0) {
        TreeDecomposition td;
        td.bags.push_back({});
        td.parent.push_back(-1);
        td.width = -1;
        return td;
    }
    auto adj = dg.adj;
    std::vector<char> alive(n, 1);
    std::vector<int> order;
    for (int step = 0; step < n; ++step) {
        int bestv = -1;
        long bestfill = -1;
        for (int v = 0; v < n; ++v) {
            if (!alive[v]) continue;
            std::vector<int> nb;
            for (int u = 0; u < n; ++u)
                if (alive[u] && adj[v][u]) nb.push_back(u);
            long fill = 0;
            for (size_t i = 0; i < nb.size(); ++i)
                for (size_t j = i + 1; j < nb.size(); ++j)
                    if (!adj[nb[i]][nb[j]]) ++fill;
            // Ties broken by vertex name for determinism.
            if (bestv == -1 || fill < bestfill ||
                (fill == bestfill && dg.names[v] < dg.names[bestv])) {
                bestv = v;
                bestfill = fill;
            }
        }
        order.push_back(bestv);
        eliminate(adj, alive, bestv);
    }
    return decomposition_from_order(dg, order);
}

int treewidth_lower_bound(const Graph& g) {
    DenseGraph dg(g);
    if (dg.size() == 0) return -1;
    std::vector<char> alive(dg.size(), 1);
    return mmd_lower_bound(dg.adj, alive, dg.size());
}

}  // namespace ptq

#include "ptq/graph.hpp"

namespace ptq {

void Graph::add_edge(const std::string& u, const std::string& v) {
    if (u == v) return;
    vertices.insert(u);
    vertices.insert(v);
    edges.insert(u < v ? std::make_pair(u, v) : std::make_pair(v, u));
}

bool Graph::has_edge(const std::string& u, const std::string& v) const {
    return edges.count(u < v ? std::make_pair(u, v) : std::make_pair(v, u)) > 0;
}

std::map<std::string, std::set<std::string>> Graph::adjacency() const {
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& v : vertices) adj[v];
    for (const auto& [u, v] : edges) {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    return adj;
}

Graph gaifman_graph(const std::set<Atom>& atoms) {
    Graph g;
    for (const auto& a : atoms) {
        std::vector<std::string> vars;
        for (const auto& t : a.args)
            if (t.kind == Term::Kind::Variable) vars.push_back(t.name);
        for (const auto& v : vars) g.add_vertex(v);
        for (size_t i = 0; i < vars.size(); ++i)
            for (size_t j = i + 1; j < vars.size(); ++j) g.add_edge(vars[i], vars[j]);
    }
    return g;
}

Graph gaifman_graph(const Structure& s) {
    Graph g;
    for (const auto& v : s.domain) g.add_vertex(v);
    for (const auto& [sym, tuples] : s.relations) {
        for (const auto& t : tuples)
            for (size_t i = 0; i < t.size(); ++i)
                for (size_t j = i + 1; j < t.size(); ++j) g.add_edge(t[i], t[j]);
    }
    return g;
}

}  // namespace ptq

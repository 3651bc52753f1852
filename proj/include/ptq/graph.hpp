#pragma once

#include <map>
#include <set>
#include <string>

#include "ptq/relational.hpp"

namespace ptq {

// Simple undirected graph, no self-loops. Edges stored with u < v.
struct Graph {
    std::set<std::string> vertices;
    std::set<std::pair<std::string, std::string>> edges;

    void add_vertex(const std::string& v) { vertices.insert(v); }
    void add_edge(const std::string& u, const std::string& v);
    bool has_edge(const std::string& u, const std::string& v) const;
    std::map<std::string, std::set<std::string>> adjacency() const;

    bool operator==(const Graph&) const = default;
};

// Variables as vertices, co-occurrence in an atom as edges.
Graph gaifman_graph(const std::set<Atom>& atoms);
// Same on a structure: domain elements as vertices, co-occurrence in tuples.
Graph gaifman_graph(const Structure& s);

}  // namespace ptq

#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace ptq {

using Value = std::string;
using Tuple = std::vector<Value>;

// Relation symbol, possibly annotated with selection conditions produced by
// the projection operators. Positions are 1-based indices into the base
// relation and strictly increasing; a plain symbol has no selections.
struct Symbol {
    std::string base;
    std::vector<std::pair<int, Value>> selections{};

    auto operator<=>(const Symbol&) const = default;
};

std::string to_string(const Symbol& s);

struct Term {
    enum class Kind { Variable, Constant };
    Kind kind;
    std::string name;

    static Term var(std::string n) { return {Kind::Variable, std::move(n)}; }
    static Term constant(std::string n) { return {Kind::Constant, std::move(n)}; }

    auto operator<=>(const Term&) const = default;
};

struct Atom {
    Symbol symbol;
    std::vector<Term> args;

    auto operator<=>(const Atom&) const = default;
};

std::string to_string(const Atom& a);

// Partial variable assignment.
using Mapping = std::map<std::string, Value>;

// mu extends nu iff mu agrees with nu on all of nu's bindings.
bool extends(const Mapping& mu, const Mapping& nu);
Mapping restrict_mapping(const Mapping& mu, const std::set<std::string>& vars);

// Finite relational structure. Doubles as a query body via the canonical
// structure whose domain is the variable set.
struct Structure {
    std::set<Value> domain;
    std::map<Symbol, std::set<Tuple>> relations;

    void add_element(const Value& v) { domain.insert(v); }
    // Inserts the tuple and its elements; rejects arity clashes per symbol.
    void add_tuple(const Symbol& sym, Tuple t);
    bool has_tuple(const Symbol& sym, const Tuple& t) const;
    // Arity of the (reduced) relation stored under sym; nullopt when absent.
    std::optional<int> arity(const Symbol& sym) const;
    long tuple_count() const;

    bool operator==(const Structure&) const = default;
};

Structure union_structures(const Structure& a, const Structure& b);
// Keeps only the elements of `keep` and the tuples entirely inside it.
Structure restrict_structure(const Structure& a, const std::set<Value>& keep);
// Drops entire relations by symbol; the domain is unchanged.
Structure drop_relations(const Structure& a, const std::set<Symbol>& syms);

// S_A: one fresh unary marker relation per element, pinning it under cores.
Symbol marking_symbol(const Value& element);
bool is_marking_symbol(const Symbol& sym);
Structure singleton_marking(const std::set<Value>& elements);

std::set<std::string> variables_of(const std::set<Atom>& atoms);
// Canonical structure of an atom set: domain = its variables.
Structure canonical_structure(const std::set<Atom>& atoms);

}  // namespace ptq

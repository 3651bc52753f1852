#include "ptq/relational.hpp"

#include "ptq/errors.hpp"

namespace ptq {

std::string to_string(const Symbol& s) {
    if (s.selections.empty()) return s.base;
    std::string out = s.base + "[";
    bool first = true;
    for (const auto& [pos, val] : s.selections) {
        if (!first) out += ",";
        first = false;
        out += std::to_string(pos) + "=" + val;
    }
    return out + "]";
}

std::string to_string(const Atom& a) {
    std::string out = to_string(a.symbol) + "(";
    bool first = true;
    for (const auto& t : a.args) {
        if (!first) out += ",";
        first = false;
        out += t.name;
    }
    return out + ")";
}

bool extends(const Mapping& mu, const Mapping& nu) {
    for (const auto& [v, c] : nu) {
        auto it = mu.find(v);
        if (it == mu.end() || it->second != c) return false;
    }
    return true;
}

Mapping restrict_mapping(const Mapping& mu, const std::set<std::string>& vars) {
    Mapping out;
    for (const auto& [v, c] : mu)
        if (vars.count(v)) out.emplace(v, c);
    return out;
}

void Structure::add_tuple(const Symbol& sym, Tuple t) {
    auto it = relations.find(sym);
    if (it != relations.end() && !it->second.empty() &&
        it->second.begin()->size() != t.size()) {
        throw ArityMismatch("inconsistent arity for relation " + to_string(sym));
    }
    for (const auto& v : t) domain.insert(v);
    relations[sym].insert(std::move(t));
}

bool Structure::has_tuple(const Symbol& sym, const Tuple& t) const {
    auto it = relations.find(sym);
    return it != relations.end() && it->second.count(t) > 0;
}

std::optional<int> Structure::arity(const Symbol& sym) const {
    auto it = relations.find(sym);
    if (it == relations.end() || it->second.empty()) return std::nullopt;
    return static_cast<int>(it->second.begin()->size());
}

long Structure::tuple_count() const {
    long n = 0;
    for (const auto& [sym, tuples] : relations) n += static_cast<long>(tuples.size());
    return n;
}

Structure union_structures(const Structure& a, const Structure& b) {
    Structure out = a;
    out.domain.insert(b.domain.begin(), b.domain.end());
    for (const auto& [sym, tuples] : b.relations)
        for (const auto& t : tuples) out.add_tuple(sym, t);
    return out;
}

Structure restrict_structure(const Structure& a, const std::set<Value>& keep) {
    Structure out;
    for (const auto& v : a.domain)
        if (keep.count(v)) out.domain.insert(v);
    for (const auto& [sym, tuples] : a.relations) {
        for (const auto& t : tuples) {
            bool inside = true;
            for (const auto& v : t)
                if (!keep.count(v)) { inside = false; break; }
            if (inside) out.relations[sym].insert(t);
        }
    }
    return out;
}

Structure drop_relations(const Structure& a, const std::set<Symbol>& syms) {
    Structure out;
    out.domain = a.domain;
    for (const auto& [sym, tuples] : a.relations)
        if (!syms.count(sym)) out.relations.emplace(sym, tuples);
    return out;
}

Symbol marking_symbol(const Value& element) { return Symbol{"__mark_" + element, {}}; }

bool is_marking_symbol(const Symbol& sym) {
    return sym.base.rfind("__mark_", 0) == 0;
}

Structure singleton_marking(const std::set<Value>& elements) {
    Structure out;
    for (const auto& e : elements) {
        out.domain.insert(e);
        out.relations[marking_symbol(e)].insert({e});
    }
    return out;
}

std::set<std::string> variables_of(const std::set<Atom>& atoms) {
    std::set<std::string> vars;
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t.kind == Term::Kind::Variable) vars.insert(t.name);
    return vars;
}

Structure canonical_structure(const std::set<Atom>& atoms) {
    Structure out;
    for (const auto& a : atoms) {
        Tuple t;
        t.reserve(a.args.size());
        for (const auto& arg : a.args) t.push_back(arg.name);
        out.add_tuple(a.symbol, std::move(t));
    }
    return out;
}

}  // namespace ptq

#include "ptq/core_ops.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

#include "ptq/errors.hpp"
#include "ptq/homomorphism.hpp"

namespace ptq {

namespace {

// 1-based base-relation positions of the reduced slots of sym.
std::vector<int> slot_positions(const Symbol& sym, size_t reduced_arity) {
    size_t base_arity = sym.selections.size() + reduced_arity;
    std::vector<int> slots;
    slots.reserve(reduced_arity);
    size_t si = 0;
    for (int pos = 1; pos <= static_cast<int>(base_arity); ++pos) {
        if (si < sym.selections.size() && sym.selections[si].first == pos) {
            ++si;
            continue;
        }
        slots.push_back(pos);
    }
    return slots;
}

Symbol with_selections(const Symbol& sym, std::vector<std::pair<int, Value>> extra) {
    Symbol out = sym;
    out.selections.insert(out.selections.end(), extra.begin(), extra.end());
    std::sort(out.selections.begin(), out.selections.end());
    return out;
}

// The fold u -> v (identity elsewhere) is an endomorphism iff every tuple
// mentioning u keeps a matching tuple after substitution.
bool fold_ok(const Structure& s, const Value& u, const Value& v) {
    for (const auto& [sym, tuples] : s.relations) {
        for (const auto& t : tuples) {
            bool mentions = false;
            for (const auto& x : t)
                if (x == u) { mentions = true; break; }
            if (!mentions) continue;
            Tuple image = t;
            for (auto& x : image)
                if (x == u) x = v;
            if (!tuples.count(image)) return false;
        }
    }
    return true;
}

}  // namespace

Structure core(const Structure& a, const Limits& limits) {
    if (static_cast<int>(a.domain.size()) > limits.core_domain_limit)
        throw DomainLimit("core search over " + std::to_string(a.domain.size()) +
                          " elements exceeds the limit of " + std::to_string(limits.core_domain_limit));
    Structure cur = a;
    bool changed = true;
    while (changed && cur.domain.size() > 1) {
        changed = false;
        for (const auto& u : cur.domain) {
            for (const auto& v : cur.domain) {
                if (u == v) continue;
                if (fold_ok(cur, u, v)) {
                    auto keep = cur.domain;
                    keep.erase(u);
                    cur = restrict_structure(cur, keep);
                    changed = true;
                    break;
                }
            }
            if (changed) break;
        }
        if (changed) continue;
        // No single fold: look for any endomorphism avoiding one element.
        for (const auto& e : cur.domain) {
            auto keep = cur.domain;
            keep.erase(e);
            Structure target = restrict_structure(cur, keep);
            if (find_homomorphism(cur, target, {}, limits)) {
                cur = std::move(target);
                changed = true;
                break;
            }
        }
    }
    return cur;
}

Structure projection_under_set(const Structure& s, const std::set<Value>& v) {
    Structure out;
    for (const auto& [sym, tuples] : s.relations) {
        if (tuples.empty()) continue;
        auto slots = slot_positions(sym, tuples.begin()->size());
        for (const auto& t : tuples) {
            std::vector<std::pair<int, Value>> extra;
            Tuple rest;
            for (size_t j = 0; j < t.size(); ++j) {
                if (v.count(t[j])) extra.emplace_back(slots[j], t[j]);
                else rest.push_back(t[j]);
            }
            out.relations[with_selections(sym, std::move(extra))].insert(std::move(rest));
        }
    }
    for (const auto& e : s.domain)
        if (!v.count(e)) out.domain.insert(e);
    return out;
}

namespace {

// Looks up the data relation for an annotated query symbol: either the data
// holds the same annotated symbol (conditions already applied) or the plain
// base relation (apply all conditions). Returns tuples projected to
// `remaining_slots` (base positions) after selecting on `conditions`.
std::set<Tuple> data_selection(const Structure& data, const Symbol& base_plus_old,
                               const std::vector<std::pair<int, Value>>& new_conditions,
                               const std::vector<int>& old_slots,
                               const std::vector<int>& remaining_slots) {
    std::set<Tuple> out;
    auto it = data.relations.find(base_plus_old);
    if (it != data.relations.end()) {
        // Reduced relation: conditions and projection act on slot indices.
        std::map<int, size_t> slot_index;
        for (size_t i = 0; i < old_slots.size(); ++i) slot_index[old_slots[i]] = i;
        for (const auto& t : it->second) {
            if (t.size() != old_slots.size()) continue;
            bool ok = true;
            for (const auto& [pos, val] : new_conditions)
                if (t[slot_index[pos]] != val) { ok = false; break; }
            if (!ok) continue;
            Tuple proj;
            proj.reserve(remaining_slots.size());
            for (int pos : remaining_slots) proj.push_back(t[slot_index[pos]]);
            out.insert(std::move(proj));
        }
        return out;
    }
    Symbol plain{base_plus_old.base, {}};
    auto pit = data.relations.find(plain);
    if (pit == data.relations.end()) return out;
    size_t base_arity = base_plus_old.selections.size() + old_slots.size();
    for (const auto& t : pit->second) {
        if (t.size() != base_arity) continue;
        bool ok = true;
        for (const auto& [pos, val] : base_plus_old.selections)
            if (t[pos - 1] != val) { ok = false; break; }
        for (const auto& [pos, val] : new_conditions)
            if (!ok || t[pos - 1] != val) { ok = false; break; }
        if (!ok) continue;
        Tuple proj;
        proj.reserve(remaining_slots.size());
        for (int pos : remaining_slots) proj.push_back(t[pos - 1]);
        out.insert(std::move(proj));
    }
    return out;
}

}  // namespace

std::pair<Structure, Structure> projection_under_hom(const Structure& query,
                                                     const Structure& data, const Mapping& h) {
    Structure qp, dp;
    dp.domain = data.domain;
    for (const auto& e : query.domain)
        if (!h.count(e)) qp.domain.insert(e);

    for (const auto& [sym, tuples] : query.relations) {
        if (tuples.empty()) continue;
        size_t m = tuples.begin()->size();
        auto slots = slot_positions(sym, m);
        // Annotation constants already present in the symbol are rewritten
        // through h so both sides end up over the same vocabulary.
        Symbol data_sym = sym;
        for (auto& [pos, val] : data_sym.selections) {
            auto hit = h.find(val);
            if (hit != h.end()) val = hit->second;
        }
        for (const auto& t : tuples) {
            std::vector<std::pair<int, Value>> conds;
            std::vector<int> remaining;
            Tuple rest;
            for (size_t j = 0; j < m; ++j) {
                auto hit = h.find(t[j]);
                if (hit != h.end()) {
                    conds.emplace_back(slots[j], hit->second);
                } else {
                    remaining.push_back(slots[j]);
                    rest.push_back(t[j]);
                }
            }
            if (rest.empty()) {
                // Fully mapped: drop when the image is present in the data.
                std::set<Tuple> sel = data_selection(data, data_sym, conds, slots, remaining);
                if (!sel.empty()) continue;  // contains () exactly when present
            }
            Symbol qsym = with_selections(data_sym, conds);
            qp.relations[qsym].insert(rest);
            if (!dp.relations.count(qsym)) {
                std::set<Tuple> sel = data_selection(data, data_sym, conds, slots, remaining);
                if (!sel.empty()) dp.relations.emplace(qsym, std::move(sel));
            }
        }
    }
    // Recompute Q' domain elements that survive in tuples plus unmapped ones.
    for (const auto& [sym, tuples] : qp.relations)
        for (const auto& t : tuples)
            for (const auto& e : t) qp.domain.insert(e);
    return {std::move(qp), std::move(dp)};
}

Structure extension_core(const ExtensionPair& p, const Limits& limits) {
    Structure u = union_structures(union_structures(p.anchor, p.extension),
                                   singleton_marking(p.anchor.domain));
    Structure c = core(u, limits);
    std::set<Symbol> marks;
    for (const auto& [sym, tuples] : c.relations)
        if (is_marking_symbol(sym)) marks.insert(sym);
    Structure s = drop_relations(c, marks);
    return projection_under_set(s, p.anchor.domain);
}

namespace {

// Occurrence profile per element: counts per (symbol, position).
std::map<Value, std::map<std::pair<Symbol, int>, int>> profiles(const Structure& s) {
    std::map<Value, std::map<std::pair<Symbol, int>, int>> out;
    for (const auto& e : s.domain) out[e];
    for (const auto& [sym, tuples] : s.relations)
        for (const auto& t : tuples)
            for (size_t i = 0; i < t.size(); ++i) out[t[i]][{sym, static_cast<int>(i)}]++;
    return out;
}

}  // namespace

bool is_isomorphic(const Structure& a, const Structure& b) {
    if (a.domain.size() != b.domain.size()) return false;
    if (a.relations.size() != b.relations.size()) return false;
    for (const auto& [sym, tuples] : a.relations) {
        auto it = b.relations.find(sym);
        if (it == b.relations.end() || it->second.size() != tuples.size()) return false;
        if (!tuples.empty() && it->second.begin()->size() != tuples.begin()->size()) return false;
    }
    auto pa = profiles(a);
    auto pb = profiles(b);
    std::vector<Value> avs(a.domain.begin(), a.domain.end());
    std::vector<Value> bvs(b.domain.begin(), b.domain.end());
    std::map<Value, Value> fwd;
    std::set<Value> used;
    std::function<bool(size_t)> go = [&](size_t i) -> bool {
        if (i == avs.size()) {
            for (const auto& [sym, tuples] : a.relations) {
                std::set<Tuple> image;
                for (const auto& t : tuples) {
                    Tuple m;
                    m.reserve(t.size());
                    for (const auto& x : t) m.push_back(fwd[x]);
                    image.insert(std::move(m));
                }
                if (image != b.relations.at(sym)) return false;
            }
            return true;
        }
        const Value& x = avs[i];
        for (const auto& y : bvs) {
            if (used.count(y)) continue;
            if (pa[x] != pb[y]) continue;
            fwd[x] = y;
            used.insert(y);
            if (go(i + 1)) return true;
            used.erase(y);
            fwd.erase(x);
        }
        return false;
    };
    return go(0);
}

}  // namespace ptq

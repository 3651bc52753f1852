#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptq/config.hpp"
#include "ptq/csts.hpp"
#include "ptq/pattern_tree.hpp"
#include "ptq/relational.hpp"

namespace ptq {

// Interface component of a non-root node: either a single atom over the
// parent interface (type 1) or a boundary-attached connected block of the
// node's label relative to the interface (type 2).
struct InterfaceComponent {
    enum class Kind { Type1, Type2 };
    int node = -1;
    std::set<Atom> atoms;
    Kind kind = Kind::Type2;
    std::set<std::string> inherited;       // (I ∩ var(atoms)) minus the free variables
    std::set<std::string> inherited_plus;  // inherited plus parent's free vars in atoms

    auto operator<=>(const InterfaceComponent&) const = default;
};

struct CiaAtom {
    Symbol symbol;
    std::vector<std::string> args;  // the inherited variables, sorted

    Atom to_atom() const;
};

// Nodes whose subtree holds a free variable absent from their branch.
std::set<int> relevant_nodes(const PatternTree& p);
// Relevant nodes plus the root, as a tree (node ids preserved).
PatternTree prune_to_relevant(const PatternTree& p);

// Connected components of the Gaifman graph minus s, realized on atoms;
// atoms entirely inside s belong to no component.
std::vector<std::set<Atom>> s_components(const std::set<Atom>& atoms,
                                         const std::set<std::string>& s);

std::vector<InterfaceComponent> interface_components(const PatternTree& p, int t);

// Assignments of the component's inherited variables that cannot be extended
// to map the component into db consistently with mu. Every membership test
// is an extension-core instance.
std::set<Mapping> stop_set(const PatternTree& p, const InterfaceComponent& comp,
                           const Structure& db, const Mapping& mu, const Limits& limits = {});

// Per-combination evaluation record, filled when a trace sink is passed.
struct FptTrace {
    struct Entry {
        Subtree subtree;
        std::vector<InterfaceComponent> combination;
        Structure dprime;
        bool matched = false;
    };
    std::vector<Entry> entries;
};

// Membership of mu in p(db) for well-designed pattern trees.
bool eval_fpt(const PatternTree& p, const Structure& db, const Mapping& mu,
              const Limits& limits = {}, FptTrace* trace = nullptr, bool prune = true);

// Treewidth report value: exact when both bounds agree via the exact solver.
struct TwValue {
    int lower = -1;
    int upper = -1;
    bool exact = true;
};

struct TractabilityReport {
    bool well_designed = false;
    bool simple = false;
    bool projection_free = false;
    int c = 0;

    bool conditions_applicable = false;  // (a)/(b)/(c) need well-designedness
    bool a_holds = false;
    TwValue a_max;
    std::string a_witness;
    bool b_holds = false;
    int b_width = 0;
    std::string b_witness;
    bool c_holds = false;
    TwValue c_max;
    std::string c_witness;
    bool c_truncated = false;
    bool c_unpruned_differs = false;
    TwValue c_unpruned_max;

    bool csts_applicable = false;  // dichotomy quantity, projection-free inputs only
    TwValue csts_max;
    bool csts_truncated = false;
    std::vector<std::string> notes;
};

// Evaluates the three tractability conditions at threshold c, plus the
// projection-free dichotomy quantity when it applies.
TractabilityReport check_conditions(const PatternTree& p, int c, long combo_cap,
                                    const Limits& limits = {});

// Treewidth of a structure's Gaifman graph: exact within the vertex limit,
// otherwise a [lower, min-fill upper] interval.
TwValue structure_treewidth(const Structure& s, const Limits& limits = {});

}  // namespace ptq

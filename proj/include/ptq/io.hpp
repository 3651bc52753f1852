#pragma once

#include <string>

#include "ptq/core_ops.hpp"
#include "ptq/csts.hpp"
#include "ptq/fpt.hpp"
#include "ptq/pattern_tree.hpp"
#include "ptq/relational.hpp"

#include <json.hpp>

namespace ptq {

// Fact files: one `rel(c1,c2,...).` per line, `#` comments, constants
// [A-Za-z0-9_]+. Annotated symbols parse and print as rel[i=c,...](...).
Structure parse_facts(const std::string& text);
std::string write_facts(const Structure& s);

// Pair files for the extension problem: a `#anchor` line starts the anchor
// section, `#extension` (or the top of the file) the extension section.
ExtensionPair parse_pair_file(const std::string& text);

// Atom over variables, e.g. "r1(x,y)".
Atom parse_atom_text(const std::string& text);

nlohmann::json mapping_to_json(const Mapping& m);
Mapping mapping_from_json(const nlohmann::json& j);

// {"freeVars":[...],"nodes":[{"id":..,"parent":..,"atoms":[...]},...]};
// array order is sibling order.
nlohmann::json pattern_tree_to_json(const PatternTree& p);
PatternTree pattern_tree_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const TractabilityReport& r);
nlohmann::json critical_pairs_to_json(const std::set<CriticalPair>& pairs, const Limits& limits);

std::string read_file(const std::string& path);

}  // namespace ptq

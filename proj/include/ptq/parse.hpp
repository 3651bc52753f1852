#pragma once

#include <string>
#include <vector>

#include "ptq/pattern_tree.hpp"

namespace ptq {

// SELECT <?vars|*> WHERE { atoms... (OPTIONAL { ... })* }
// The outer group is the root label, each OPTIONAL group a child in source
// order. SELECT * marks the tree projection free. Throws ParseError.
PatternTree parse_query(const std::string& text);
// Same, collecting warnings (e.g. a selected variable that never occurs).
PatternTree parse_query(const std::string& text, std::vector<std::string>& warnings);

// Inverse of parse_query up to whitespace.
std::string to_query_text(const PatternTree& p);

}  // namespace ptq

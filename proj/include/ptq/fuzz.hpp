#pragma once

#include <cstdint>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "ptq/config.hpp"
#include "ptq/pattern_tree.hpp"

namespace ptq {

struct FuzzKnobs {
    int max_nodes = 4;
    int max_atoms_per_node = 3;
    int max_arity = 3;
    int max_vars = 6;
    int max_dom = 5;
    int symbol_pool = 4;    // ignored when every atom gets a fresh symbol
    int extra_mappings = 8; // random candidate mappings per instance
    enum class Shape { Any, ProjectionFree, WellDesigned, SimpleWellDesigned } shape = Shape::Any;
};

using Rng = std::mt19937_64;

PatternTree random_pattern_tree(Rng& rng, const FuzzKnobs& knobs);
// Random database over the tree's vocabulary.
Structure random_database(Rng& rng, const FuzzKnobs& knobs, const PatternTree& p);
// Oracle answers, their mutations, and random partial mappings over the free
// variables; the interesting membership queries for differential runs.
std::vector<Mapping> candidate_mappings(Rng& rng, const FuzzKnobs& knobs, const PatternTree& p,
                                        const Structure& db, const std::set<Mapping>& answers);

struct FuzzResult {
    long trials = 0;
    long checked = 0;      // membership queries compared
    long divergences = 0;
    std::vector<std::string> reports;  // one minimized repro per divergence
};

// Compares the engines applicable to each random instance against the
// brute-force oracle; on divergence, shrinks the instance and records it.
FuzzResult run_fuzz(uint64_t seed, long trials, const FuzzKnobs& knobs, const Limits& limits,
                    std::ostream* log = nullptr);

}  // namespace ptq

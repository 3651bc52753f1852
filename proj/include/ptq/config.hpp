#pragma once

namespace ptq {

// Knobs shared across the engines. The query side is the parameter of every
// problem here, so these bound query-sized searches, never the data.
struct Limits {
    int core_domain_limit = 16;  // exact core search is exponential in |dom|
    int tw_vertex_limit = 24;    // exact treewidth branch-and-bound limit
    int width_budget = 3;        // max width for which the DP hom path is used
    int oracle_max_vars = 10;    // brute-force semantics budget
    int oracle_max_dom = 8;
    long subtree_cap = 4096;     // root-subtree enumeration cap in csts_all
    long combo_cap = 4096;       // component-combination cap in the analyzer
    int stop_width_cap = 8;      // |V_t(S)| cap for stop-set enumeration
    bool strict_symbols = false; // treat missing target relation as an error
};

}  // namespace ptq

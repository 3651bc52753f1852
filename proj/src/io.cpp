#include "ptq/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "ptq/errors.hpp"
#include "ptq/ext.hpp"

namespace ptq {

namespace {

bool valid_constant(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool valid_relation_name(const std::string& s) {
    if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) return false;
    if (s.rfind("__", 0) == 0) return false;  // reserved for internal symbols
    return valid_constant(s);
}

// rel[1=a,...](c1,...) with 1-based strictly increasing positions.
struct ParsedFact {
    Symbol symbol;
    Tuple args;
};

ParsedFact parse_fact_expr(const std::string& text, int line) {
    size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto take_token = [&](const char* extra) -> std::string {
        std::string out;
        while (i < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' ||
                (extra && std::string(extra).find(text[i]) != std::string::npos)))
            out += text[i++];
        return out;
    };
    skip_ws();
    std::string name = take_token(nullptr);
    if (!valid_relation_name(name))
        throw ParseError("invalid relation name '" + name + "'", line, static_cast<int>(i) + 1);
    Symbol sym{name, {}};
    skip_ws();
    if (i < text.size() && text[i] == '[') {
        ++i;
        int last_pos = 0;
        while (true) {
            skip_ws();
            std::string pos_text = take_token(nullptr);
            size_t parsed = 0;
            int pos = 0;
            try {
                pos = std::stoi(pos_text, &parsed);
            } catch (...) {
                parsed = 0;
            }
            if (parsed != pos_text.size() || pos <= last_pos)
                throw ParseError("selection positions must be increasing 1-based integers", line,
                                 static_cast<int>(i) + 1);
            last_pos = pos;
            skip_ws();
            if (i >= text.size() || text[i] != '=')
                throw ParseError("expected '=' in selection", line, static_cast<int>(i) + 1);
            ++i;
            skip_ws();
            std::string val = take_token(nullptr);
            if (!valid_constant(val))
                throw ParseError("invalid selection constant", line, static_cast<int>(i) + 1);
            sym.selections.emplace_back(pos, val);
            skip_ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        if (i >= text.size() || text[i] != ']')
            throw ParseError("expected ']'", line, static_cast<int>(i) + 1);
        ++i;
        skip_ws();
    }
    if (i >= text.size() || text[i] != '(')
        throw ParseError("expected '('", line, static_cast<int>(i) + 1);
    ++i;
    ParsedFact out{std::move(sym), {}};
    skip_ws();
    if (i < text.size() && text[i] == ')') {
        ++i;
    } else {
        while (true) {
            skip_ws();
            std::string val = take_token(nullptr);
            if (!valid_constant(val))
                throw ParseError("invalid constant", line, static_cast<int>(i) + 1);
            out.args.push_back(val);
            skip_ws();
            if (i < text.size() && text[i] == ',') {
                ++i;
                continue;
            }
            break;
        }
        if (i >= text.size() || text[i] != ')')
            throw ParseError("expected ')'", line, static_cast<int>(i) + 1);
        ++i;
    }
    skip_ws();
    if (i < text.size())
        throw ParseError("trailing input after fact", line, static_cast<int>(i) + 1);
    return out;
}

// Splits into (section, fact-text) entries; facts end with '.'.
std::vector<std::pair<std::string, std::pair<std::string, int>>> fact_lines(const std::string& text) {
    std::vector<std::pair<std::string, std::pair<std::string, int>>> out;
    std::istringstream in(text);
    std::string line;
    std::string section = "extension";
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        std::string comment;
        if (hash != std::string::npos) {
            comment = line.substr(hash + 1);
            line = line.substr(0, hash);
        }
        // Section markers are comment lines holding exactly the marker word.
        {
            std::string word;
            for (char c : comment)
                if (!std::isspace(static_cast<unsigned char>(c))) word += c;
            if (word == "anchor" || word == "extension") section = word;
        }
        size_t a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos) continue;
        size_t b = line.find_last_not_of(" \t\r");
        std::string body = line.substr(a, b - a + 1);
        if (body.empty()) continue;
        if (body.back() != '.')
            throw ParseError("facts must end with '.'", lineno, static_cast<int>(b) + 1);
        body.pop_back();
        out.push_back({section, {body, lineno}});
    }
    return out;
}

}  // namespace

Structure parse_facts(const std::string& text) {
    Structure s;
    for (const auto& [section, entry] : fact_lines(text)) {
        ParsedFact f = parse_fact_expr(entry.first, entry.second);
        s.add_tuple(f.symbol, std::move(f.args));
    }
    return s;
}

ExtensionPair parse_pair_file(const std::string& text) {
    ExtensionPair pair;
    for (const auto& [section, entry] : fact_lines(text)) {
        ParsedFact f = parse_fact_expr(entry.first, entry.second);
        if (section == "anchor") pair.anchor.add_tuple(f.symbol, std::move(f.args));
        else pair.extension.add_tuple(f.symbol, std::move(f.args));
    }
    return pair;
}

std::string write_facts(const Structure& s) {
    std::string out;
    for (const auto& [sym, tuples] : s.relations) {
        for (const auto& t : tuples) {
            out += to_string(sym) + "(";
            bool first = true;
            for (const auto& v : t) {
                if (!first) out += ",";
                first = false;
                out += v;
            }
            out += ").\n";
        }
    }
    // Isolated elements have no fact lines; list them in a comment so the
    // file round-trips the domain for human readers.
    std::set<Value> mentioned;
    for (const auto& [sym, tuples] : s.relations)
        for (const auto& t : tuples) mentioned.insert(t.begin(), t.end());
    std::string isolated;
    for (const auto& v : s.domain)
        if (!mentioned.count(v)) isolated += (isolated.empty() ? "" : " ") + v;
    if (!isolated.empty()) out += "# isolated elements: " + isolated + "\n";
    return out;
}

Atom parse_atom_text(const std::string& text) {
    ParsedFact f = parse_fact_expr(text, 1);
    Atom a;
    a.symbol = std::move(f.symbol);
    for (auto& v : f.args) a.args.push_back(Term::var(std::move(v)));
    return a;
}

nlohmann::json mapping_to_json(const Mapping& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [v, c] : m) j[v] = c;
    return j;
}

Mapping mapping_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("a mapping must be a JSON object");
    Mapping m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_string()) throw UsageError("mapping values must be strings");
        m.emplace(it.key(), it.value().get<std::string>());
    }
    return m;
}

nlohmann::json pattern_tree_to_json(const PatternTree& p) {
    nlohmann::json nodes = nlohmann::json::array();
    for (int n : p.preorder()) {
        nlohmann::json jn;
        jn["id"] = p.node(n).id;
        if (n == 0) jn["parent"] = nullptr;
        else jn["parent"] = p.node(p.node(n).parent).id;
        nlohmann::json atoms = nlohmann::json::array();
        for (const auto& a : p.node(n).atoms) atoms.push_back(to_string(a));
        jn["atoms"] = std::move(atoms);
        nodes.push_back(std::move(jn));
    }
    nlohmann::json j;
    nlohmann::json fv = nlohmann::json::array();
    for (const auto& v : p.free_vars()) fv.push_back(v);
    j["freeVars"] = std::move(fv);
    j["nodes"] = std::move(nodes);
    return j;
}

PatternTree pattern_tree_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("nodes") || !j["nodes"].is_array())
        throw UsageError("pattern tree JSON needs a 'nodes' array");
    PatternTree p;
    std::map<long, int> by_id;
    for (const auto& jn : j["nodes"]) {
        if (!jn.contains("id")) throw UsageError("pattern tree node without an id");
        long id = jn["id"].get<long>();
        std::set<Atom> atoms;
        if (jn.contains("atoms"))
            for (const auto& ja : jn["atoms"]) atoms.insert(parse_atom_text(ja.get<std::string>()));
        int idx;
        if (!jn.contains("parent") || jn["parent"].is_null()) {
            if (p.size() != 0) throw UsageError("pattern tree has more than one root");
            idx = p.add_node(-1, std::move(atoms), static_cast<int>(id));
        } else {
            long pid = jn["parent"].get<long>();
            auto it = by_id.find(pid);
            if (it == by_id.end())
                throw UsageError("node " + std::to_string(id) + " references unknown parent " +
                                 std::to_string(pid));
            idx = p.add_node(it->second, std::move(atoms), static_cast<int>(id));
        }
        if (!by_id.emplace(id, idx).second)
            throw UsageError("duplicate node id " + std::to_string(id));
    }
    if (p.size() == 0) throw UsageError("pattern tree is empty");
    std::set<std::string> fv;
    if (j.contains("freeVars"))
        for (const auto& v : j["freeVars"]) fv.insert(v.get<std::string>());
    p.set_free_vars(std::move(fv));
    return p;
}

namespace {

nlohmann::json tw_to_json(const TwValue& tw) {
    nlohmann::json j;
    j["lower"] = tw.lower;
    j["upper"] = tw.upper;
    j["exact"] = tw.exact;
    return j;
}

}  // namespace

nlohmann::json report_to_json(const TractabilityReport& r) {
    nlohmann::json j;
    j["flags"] = {{"wellDesigned", r.well_designed},
                  {"simple", r.simple},
                  {"projectionFree", r.projection_free}};
    nlohmann::json cond;
    cond["applicable"] = r.conditions_applicable;
    cond["c"] = r.c;
    if (r.conditions_applicable) {
        cond["a"] = {{"holds", r.a_holds},
                     {"maxExtcoreTreewidth", tw_to_json(r.a_max)},
                     {"witness", r.a_witness}};
        cond["b"] = {{"holds", r.b_holds}, {"width", r.b_width}, {"witness", r.b_witness}};
        nlohmann::json cc = {{"holds", r.c_holds},
                             {"maxExtcoreTreewidth", tw_to_json(r.c_max)},
                             {"witness", r.c_witness},
                             {"truncated", r.c_truncated}};
        if (r.c_unpruned_differs) cc["unprunedMaxExtcoreTreewidth"] = tw_to_json(r.c_unpruned_max);
        cond["c"] = std::move(cc);
    }
    j["conditions"] = std::move(cond);
    nlohmann::json csts;
    csts["applicable"] = r.csts_applicable;
    if (r.csts_applicable) {
        csts["maxExtcoreTreewidth"] = tw_to_json(r.csts_max);
        csts["truncated"] = r.csts_truncated;
    }
    j["cstsDichotomy"] = std::move(csts);
    j["notes"] = r.notes;
    return j;
}

nlohmann::json critical_pairs_to_json(const std::set<CriticalPair>& pairs, const Limits& limits) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& pair : pairs) {
        nlohmann::json jp;
        jp["child"] = pair.child;
        nlohmann::json ctx = nlohmann::json::array();
        for (const auto& a : pair.context) ctx.push_back(to_string(a));
        nlohmann::json lbl = nlohmann::json::array();
        for (const auto& a : pair.child_label) lbl.push_back(to_string(a));
        jp["context"] = std::move(ctx);
        jp["childLabel"] = std::move(lbl);
        ExtensionPair ep{canonical_structure(pair.context), canonical_structure(pair.child_label)};
        try {
            Structure e = extension_core(ep, limits);
            TwValue tw = structure_treewidth(e, limits);
            jp["extcoreTreewidth"] = tw_to_json(tw);
            nlohmann::json atoms = nlohmann::json::array();
            for (const auto& [sym, tuples] : e.relations)
                for (const auto& t : tuples) {
                    Atom a;
                    a.symbol = sym;
                    for (const auto& v : t) a.args.push_back(Term::var(v));
                    atoms.push_back(to_string(a));
                }
            jp["extcore"] = std::move(atoms);
        } catch (const LimitError& err) {
            jp["extcoreTreewidth"] = nullptr;
            jp["note"] = err.what();
        }
        arr.push_back(std::move(jp));
    }
    return arr;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read file: " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace ptq

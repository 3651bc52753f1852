#include "ptq/parse.hpp"

#include <cctype>
#include <functional>

#include "ptq/errors.hpp"

namespace ptq {

namespace {

struct Token {
    enum class Kind { Ident, Var, Star, LBrace, RBrace, LParen, RParen, Comma, End };
    Kind kind;
    std::string text;
    int line;
    int col;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1;
    int col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    void advance() {
        if (src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    Token next() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) advance();
        if (pos >= src.size()) return {Token::Kind::End, "", line, col};
        int l = line, c = col;
        char ch = src[pos];
        auto single = [&](Token::Kind k) {
            advance();
            return Token{k, std::string(1, ch), l, c};
        };
        switch (ch) {
            case '*': return single(Token::Kind::Star);
            case '{': return single(Token::Kind::LBrace);
            case '}': return single(Token::Kind::RBrace);
            case '(': return single(Token::Kind::LParen);
            case ')': return single(Token::Kind::RParen);
            case ',': return single(Token::Kind::Comma);
            default: break;
        }
        if (ch == '?') {
            advance();
            std::string name;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                name += src[pos];
                advance();
            }
            if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0])))
                throw ParseError("malformed variable after '?'", l, c);
            return {Token::Kind::Var, name, l, c};
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string name;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) {
                name += src[pos];
                advance();
            }
            return {Token::Kind::Ident, name, l, c};
        }
        throw ParseError(std::string("unexpected character '") + ch + "'", l, c);
    }
};

struct Parser {
    Lexer lex;
    Token tok;

    explicit Parser(const std::string& s) : lex(s) { tok = lex.next(); }

    void bump() { tok = lex.next(); }

    void expect_ident(const std::string& kw) {
        if (tok.kind != Token::Kind::Ident || tok.text != kw)
            throw ParseError("expected '" + kw + "'", tok.line, tok.col);
        bump();
    }

    Atom parse_atom() {
        if (tok.kind != Token::Kind::Ident)
            throw ParseError("expected a relation name", tok.line, tok.col);
        if (tok.text.rfind("__", 0) == 0)
            throw ParseError("relation names starting with '__' are reserved", tok.line, tok.col);
        Atom a;
        a.symbol = Symbol{tok.text, {}};
        bump();
        if (tok.kind != Token::Kind::LParen)
            throw ParseError("expected '(' after relation name", tok.line, tok.col);
        bump();
        if (tok.kind != Token::Kind::RParen) {
            while (true) {
                if (tok.kind != Token::Kind::Var)
                    throw ParseError("expected a ?variable", tok.line, tok.col);
                a.args.push_back(Term::var(tok.text));
                bump();
                if (tok.kind == Token::Kind::Comma) {
                    bump();
                    continue;
                }
                break;
            }
        }
        if (tok.kind != Token::Kind::RParen)
            throw ParseError("expected ')'", tok.line, tok.col);
        bump();
        return a;
    }

    // group := '{' atom* ('OPTIONAL' group)* '}'
    int parse_group(PatternTree& p, int parent) {
        if (tok.kind != Token::Kind::LBrace)
            throw ParseError("expected '{'", tok.line, tok.col);
        bump();
        std::set<Atom> atoms;
        while (tok.kind == Token::Kind::Ident && tok.text != "OPTIONAL") atoms.insert(parse_atom());
        int idx = p.add_node(parent, std::move(atoms));
        while (tok.kind == Token::Kind::Ident && tok.text == "OPTIONAL") {
            bump();
            parse_group(p, idx);
        }
        if (tok.kind == Token::Kind::Ident)
            throw ParseError("atoms must precede OPTIONAL groups", tok.line, tok.col);
        if (tok.kind != Token::Kind::RBrace)
            throw ParseError("expected '}'", tok.line, tok.col);
        bump();
        return idx;
    }
};

}  // namespace

PatternTree parse_query(const std::string& text) {
    std::vector<std::string> warnings;
    return parse_query(text, warnings);
}

PatternTree parse_query(const std::string& text, std::vector<std::string>& warnings) {
    Parser parser(text);
    parser.expect_ident("SELECT");
    bool star = false;
    std::vector<std::string> selected;
    if (parser.tok.kind == Token::Kind::Star) {
        star = true;
        parser.bump();
    } else {
        while (parser.tok.kind == Token::Kind::Var) {
            selected.push_back(parser.tok.text);
            parser.bump();
        }
        if (selected.empty())
            throw ParseError("expected '*' or a list of ?variables after SELECT", parser.tok.line,
                             parser.tok.col);
    }
    parser.expect_ident("WHERE");
    PatternTree p;
    parser.parse_group(p, -1);
    if (parser.tok.kind != Token::Kind::End)
        throw ParseError("trailing input after the query", parser.tok.line, parser.tok.col);
    if (star) {
        p.set_free_vars(p.all_vars());
    } else {
        std::set<std::string> fv(selected.begin(), selected.end());
        auto occurring = p.all_vars();
        for (const auto& v : fv)
            if (!occurring.count(v))
                warnings.push_back("selected variable ?" + v + " never occurs in the query");
        p.set_free_vars(std::move(fv));
    }
    return p;
}

namespace {

void group_text(const PatternTree& p, int node, std::string& out) {
    out += "{ ";
    for (const auto& a : p.node(node).atoms) {
        out += a.symbol.base + "(";
        bool first = true;
        for (const auto& t : a.args) {
            if (!first) out += ",";
            first = false;
            out += "?" + t.name;
        }
        out += ") ";
    }
    for (int c : p.node(node).children) {
        out += "OPTIONAL ";
        group_text(p, c, out);
    }
    out += "} ";
}

}  // namespace

std::string to_query_text(const PatternTree& p) {
    std::string out = "SELECT";
    if (is_projection_free(p)) {
        out += " *";
    } else {
        for (const auto& v : p.free_vars()) out += " ?" + v;
    }
    out += " WHERE ";
    group_text(p, 0, out);
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

}  // namespace ptq

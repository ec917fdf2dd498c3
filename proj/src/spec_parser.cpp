#include "rftflow/spec.hpp"

#include "rftflow/errors.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rftflow {

namespace {

// Number of leading indices of a family probed during validation.
constexpr long long kProbeCount = 256;

bool is_label_char(char c) {
    if (std::isspace(static_cast<unsigned char>(c)))
        return false;
    switch (c) {
    case '{':
    case '}':
    case '(':
    case ')':
    case '[':
    case ']':
    case ',':
    case ':':
    case '#': return false;
    default: return true;
    }
}

struct Token {
    enum class Kind { Word, Punct, Newline, End } kind;
    std::string text;
    std::size_t line;
    std::size_t column;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    Token next() {
        for (;;) {
            while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'
                                           || text_[pos_] == '\r'))
                advance();
            if (pos_ < text_.size() && text_[pos_] == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            }
            break;
        }
        Token t{Token::Kind::End, {}, line_, column_, pos_};
        if (pos_ >= text_.size())
            return t;
        char c = text_[pos_];
        if (c == '\n') {
            advance();
            t.kind = Token::Kind::Newline;
            return t;
        }
        if (!is_label_char(c)) {
            advance();
            t.kind = Token::Kind::Punct;
            t.text = std::string(1, c);
            return t;
        }
        t.kind = Token::Kind::Word;
        while (pos_ < text_.size() && is_label_char(text_[pos_])) {
            t.text += text_[pos_];
            advance();
        }
        return t;
    }

    /// Raw text up to (not including) the first top-level character in
    /// `stops`, or the end of the line; parentheses are balanced.
    std::string_view raw_until(std::string_view stops, std::size_t& line, std::size_t& column) {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            advance();
        line = line_;
        column = column_;
        std::size_t start = pos_;
        int depth = 0;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n' || c == '#')
                break;
            if (depth == 0 && stops.find(c) != std::string_view::npos)
                break;
            if (c == '(')
                ++depth;
            else if (c == ')') {
                if (depth == 0)
                    break;
                --depth;
            }
            advance();
        }
        std::string_view raw = text_.substr(start, pos_ - start);
        while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back())))
            raw.remove_suffix(1);
        return raw;
    }

    /// Expression text for `height`/`mult` clauses: up to the keyword
    /// `mult`, a comment, or end of line.
    std::string_view raw_clause(std::size_t& line, std::size_t& column) {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t'))
            advance();
        line = line_;
        column = column_;
        std::size_t start = pos_;
        std::size_t end = pos_;
        while (end < text_.size() && text_[end] != '\n' && text_[end] != '#')
            ++end;
        std::string_view rest = text_.substr(start, end - start);
        std::size_t cut = rest.size();
        for (std::size_t i = 0; i + 4 <= rest.size(); ++i) {
            if (rest.compare(i, 4, "mult") == 0
                && (i == 0 || !std::isalnum(static_cast<unsigned char>(rest[i - 1])))
                && (i + 4 == rest.size() || !std::isalnum(static_cast<unsigned char>(rest[i + 4])))) {
                cut = i;
                break;
            }
        }
        while (pos_ < start + cut)
            advance();
        std::string_view raw = rest.substr(0, cut);
        while (!raw.empty() && std::isspace(static_cast<unsigned char>(raw.back())))
            raw.remove_suffix(1);
        return raw;
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_'))
        return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            return false;
    return true;
}

class SpecParser {
public:
    explicit SpecParser(std::string_view text) : lex_(text) { shift(); }

    RftSpec parse() {
        bool edges_seen = false;
        for (;;) {
            skip_newlines();
            if (tok_.kind == Token::Kind::End)
                break;
            if (tok_.kind != Token::Kind::Word)
                fail("expected a statement keyword");
            if (tok_.text == "class")
                parse_class();
            else if (tok_.text == "edges") {
                if (edges_seen)
                    fail("duplicate 'edges' statement");
                edges_seen = true;
                parse_edges();
            } else if (tok_.text == "forbid")
                parse_forbid();
            else if (tok_.text == "root")
                parse_root();
            else
                fail("unknown statement '" + tok_.text + "'");
            end_statement();
        }
        if (spec_.classes.empty())
            throw SpecError("specification declares no classes");
        if (!edges_seen)
            throw SpecError("specification has no 'edges' statement");
        resolve();
        spec_.validate();
        return std::move(spec_);
    }

private:
    struct PendingRef {
        std::string label;
        std::size_t line, column;
    };

    [[noreturn]] void fail(const std::string& what) const {
        throw SpecError(what, tok_.line, tok_.column);
    }

    void shift() { tok_ = lex_.next(); }

    void skip_newlines() {
        while (tok_.kind == Token::Kind::Newline)
            shift();
    }

    void end_statement() {
        if (tok_.kind != Token::Kind::Newline && tok_.kind != Token::Kind::End)
            fail("unexpected '" + tok_.text + "' after statement");
    }

    void expect_punct(char c) {
        skip_newlines();
        if (tok_.kind != Token::Kind::Punct || tok_.text[0] != c)
            fail(std::string("expected '") + c + "'");
        shift();
    }

    bool accept_punct(char c) {
        skip_newlines();
        if (tok_.kind == Token::Kind::Punct && tok_.text[0] == c) {
            shift();
            return true;
        }
        return false;
    }

    std::string expect_word(const char* what) {
        if (tok_.kind != Token::Kind::Word)
            fail(std::string("expected ") + what);
        std::string w = tok_.text;
        shift();
        return w;
    }

    void expect_keyword(const char* kw) {
        if (tok_.kind != Token::Kind::Word || tok_.text != kw)
            fail(std::string("expected '") + kw + "'");
        shift();
    }

    Expr clause_expr() {
        std::size_t line, column;
        std::string_view raw = lex_.raw_clause(line, column);
        if (raw.empty())
            throw SpecError("missing expression", line, column);
        Expr e = Expr::parse(raw, line, column);
        shift();
        return e;
    }

    void parse_class() {
        shift();
        std::size_t line = tok_.line, column = tok_.column;
        std::string name = expect_word("class name");
        if (!is_identifier(name))
            throw SpecError("class name '" + name + "' is not an identifier", line, column);
        for (const auto& c : spec_.classes)
            if (c.name == name)
                throw SpecError("duplicate class name '" + name + "'", line, column);
        ClassDecl decl{name, FiniteClass{}};
        std::string kind = expect_word("'finite' or 'family'");
        if (kind == "finite") {
            // Lexer sits on '{': read entries by hand so heights can be
            // arbitrary constant expressions.
            if (tok_.kind != Token::Kind::Punct || tok_.text != "{")
                fail("expected '{'");
            FiniteClass fc;
            for (;;) {
                shift();
                skip_newlines();
                if (tok_.kind == Token::Kind::Punct && tok_.text == "}" && fc.vertices.empty())
                    fail("finite class '" + name + "' is empty");
                std::size_t vline = tok_.line, vcol = tok_.column;
                std::string label = expect_word("vertex label");
                if (label.find_first_of("[]") != std::string::npos)
                    throw SpecError("invalid vertex label '" + label + "'", vline, vcol);
                if (tok_.kind != Token::Kind::Punct || tok_.text != ":")
                    fail("expected ':' after vertex label");
                std::size_t eline, ecol;
                std::string_view raw = lex_.raw_until(",}", eline, ecol);
                if (raw.empty())
                    throw SpecError("missing height for vertex '" + label + "'", eline, ecol);
                Expr h = Expr::parse(raw, eline, ecol);
                if (h.depends_on_index())
                    throw SpecError("height of a finite-class vertex may not use k", eline, ecol);
                double value;
                try {
                    value = h.eval(0);
                } catch (const ExprDomainError& e) {
                    throw SpecError(e.detail(), eline, ecol);
                }
                if (!(value > 0.0))
                    throw SpecError("height of '" + label + "' is not positive ("
                                        + format_number(value) + ")",
                                    eline, ecol);
                fc.vertices.push_back(NamedVertex{label, h, value});
                positions_[label] = {vline, vcol};
                shift();
                skip_newlines();
                if (tok_.kind == Token::Kind::Punct && tok_.text == ",")
                    continue;
                if (tok_.kind == Token::Kind::Punct && tok_.text == "}")
                    break;
                fail("expected ',' or '}' in finite class");
            }
            shift();
            decl.kind = std::move(fc);
        } else if (kind == "family") {
            expect_keyword("k");
            expect_keyword("from");
            std::size_t sline = tok_.line, scol = tok_.column;
            std::string start = expect_word("start index");
            FamilyClass fam;
            try {
                std::size_t used = 0;
                fam.start = std::stoll(start, &used);
                if (used != start.size())
                    throw std::invalid_argument(start);
            } catch (const std::exception&) {
                throw SpecError("start index '" + start + "' is not an integer", sline, scol);
            }
            if (tok_.kind != Token::Kind::Word || tok_.text != "height")
                fail("expected 'height'");
            fam.height = clause_expr();
            if (tok_.kind == Token::Kind::Word && tok_.text == "mult")
                fam.multiplicity = clause_expr();
            decl.kind = std::move(fam);
        } else {
            throw SpecError("expected 'finite' or 'family', got '" + kind + "'", line, column);
        }
        decl_pos_.push_back({line, column});
        spec_.classes.push_back(std::move(decl));
    }

    void parse_edges() {
        shift();
        std::string mode = expect_word("'complete_minus_D' or 'pairs'");
        if (mode == "complete_minus_D") {
            spec_.edges.mode = EdgeMode::CompleteMinusForbidden;
            return;
        }
        if (mode != "pairs")
            fail("unknown edge mode '" + mode + "'");
        spec_.edges.mode = EdgeMode::ClassPairs;
        expect_punct('{');
        if (accept_punct('}'))
            return;
        do {
            expect_punct('(');
            skip_newlines();
            std::size_t l1 = tok_.line, c1 = tok_.column;
            std::string from = expect_word("class name");
            expect_punct(',');
            skip_newlines();
            std::size_t l2 = tok_.line, c2 = tok_.column;
            std::string to = expect_word("class name");
            expect_punct(')');
            pending_pairs_.push_back({{from, l1, c1}, {to, l2, c2}});
        } while (accept_punct(','));
        expect_punct('}');
    }

    PendingRef vertex_token() {
        skip_newlines();
        PendingRef r{{}, tok_.line, tok_.column};
        r.label = expect_word("vertex label");
        // '[' must follow on the same line.
        if (tok_.kind == Token::Kind::Punct && tok_.text[0] == '[') {
            shift();
            skip_newlines();
            r.label += "[" + expect_word("index") + "]";
            expect_punct(']');
        }
        return r;
    }

    void parse_forbid() {
        shift();
        expect_punct('{');
        if (accept_punct('}'))
            return;
        do {
            expect_punct('(');
            PendingRef a = vertex_token();
            expect_punct(',');
            PendingRef b = vertex_token();
            expect_punct(')');
            pending_forbid_.push_back({a, b});
        } while (accept_punct(','));
        expect_punct('}');
    }

    void parse_root() {
        if (root_)
            fail("duplicate 'root' statement");
        shift();
        root_ = vertex_token();
    }

    std::size_t class_index(const PendingRef& r) const {
        for (std::size_t i = 0; i < spec_.classes.size(); ++i)
            if (spec_.classes[i].name == r.label)
                return i;
        throw SpecError("unknown class '" + r.label + "'", r.line, r.column);
    }

    VertexRef vertex(const PendingRef& r) const {
        auto v = spec_.find_vertex(r.label);
        if (!v)
            throw SpecError("unknown vertex '" + r.label + "'", r.line, r.column);
        const ClassDecl& d = spec_.classes[v->decl];
        if (!d.is_finite()) {
            double m;
            try {
                m = d.family().multiplicity.eval(v->member);
            } catch (const ExprDomainError& e) {
                throw SpecError(e.what(), r.line, r.column);
            }
            if (m != 1.0)
                throw SpecError("family member '" + r.label
                                    + "' has multiplicity != 1 and cannot be named",
                                r.line, r.column);
        }
        return *v;
    }

    void resolve() {
        // Duplicate labels across finite classes.
        std::map<std::string, std::size_t> seen;
        for (std::size_t i = 0; i < spec_.classes.size(); ++i) {
            if (!spec_.classes[i].is_finite())
                continue;
            for (const auto& v : spec_.classes[i].finite().vertices) {
                if (!seen.emplace(v.label, i).second) {
                    auto [l, c] = positions_.at(v.label);
                    throw SpecError("duplicate vertex label '" + v.label + "'", l, c);
                }
            }
        }
        for (const auto& [a, b] : pending_pairs_)
            spec_.edges.class_pairs.emplace(class_index(a), class_index(b));
        for (const auto& [a, b] : pending_forbid_) {
            VertexRef va = vertex(a);
            VertexRef vb = vertex(b);
            if (spec_.edges.mode == EdgeMode::ClassPairs && !spec_.class_edge(va.decl, vb.decl))
                throw SpecError("forbidden pair (" + a.label + "," + b.label
                                    + ") is not allowed at class level",
                                a.line, a.column);
            spec_.edges.forbidden.emplace(va, vb);
        }
        if (root_)
            spec_.root = vertex(*root_);
    }

    Lexer lex_;
    Token tok_;
    RftSpec spec_;
    std::vector<std::pair<std::size_t, std::size_t>> decl_pos_;
    std::map<std::string, std::pair<std::size_t, std::size_t>> positions_;
    std::vector<std::pair<PendingRef, PendingRef>> pending_pairs_;
    std::vector<std::pair<PendingRef, PendingRef>> pending_forbid_;
    std::optional<PendingRef> root_;
};

} // namespace

double eval_expr(const Expr& e, long long k) { return e.eval(k); }

std::optional<VertexRef> RftSpec::find_vertex(std::string_view label) const {
    auto open = label.find('[');
    if (open != std::string_view::npos) {
        if (label.back() != ']')
            return std::nullopt;
        std::string_view name = label.substr(0, open);
        std::string idx(label.substr(open + 1, label.size() - open - 2));
        long long k;
        try {
            std::size_t used = 0;
            k = std::stoll(idx, &used);
            if (used != idx.size())
                return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        for (std::size_t i = 0; i < classes.size(); ++i) {
            if (classes[i].name != name || classes[i].is_finite())
                continue;
            if (k < classes[i].family().start)
                return std::nullopt;
            return VertexRef{i, k};
        }
        return std::nullopt;
    }
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (!classes[i].is_finite())
            continue;
        const auto& vs = classes[i].finite().vertices;
        for (std::size_t j = 0; j < vs.size(); ++j)
            if (vs[j].label == label)
                return VertexRef{i, static_cast<long long>(j)};
    }
    return std::nullopt;
}

std::string RftSpec::label_of(const VertexRef& v) const {
    const ClassDecl& d = classes.at(v.decl);
    if (d.is_finite())
        return d.finite().vertices.at(static_cast<std::size_t>(v.member)).label;
    return d.name + "[" + std::to_string(v.member) + "]";
}

double RftSpec::height_of(const VertexRef& v) const {
    const ClassDecl& d = classes.at(v.decl);
    if (d.is_finite())
        return d.finite().vertices.at(static_cast<std::size_t>(v.member)).value;
    return d.family().height.eval(v.member);
}

bool RftSpec::class_edge(std::size_t from_decl, std::size_t to_decl) const {
    if (edges.mode == EdgeMode::CompleteMinusForbidden)
        return true;
    return edges.class_pairs.count({from_decl, to_decl}) != 0;
}

bool RftSpec::edge(const VertexRef& from, const VertexRef& to) const {
    return class_edge(from.decl, to.decl) && edges.forbidden.count({from, to}) == 0;
}

bool RftSpec::all_finite() const {
    for (const auto& c : classes)
        if (!c.is_finite())
            return false;
    return true;
}

std::size_t RftSpec::named_vertex_count() const {
    std::set<VertexRef> named;
    for (std::size_t i = 0; i < classes.size(); ++i)
        if (classes[i].is_finite())
            for (std::size_t j = 0; j < classes[i].finite().vertices.size(); ++j)
                named.insert({i, static_cast<long long>(j)});
    for (const auto& [a, b] : edges.forbidden) {
        named.insert(a);
        named.insert(b);
    }
    if (root)
        named.insert(*root);
    return named.size();
}

void RftSpec::validate() const {
    std::set<std::string> names, labels;
    for (const auto& c : classes) {
        if (!names.insert(c.name).second)
            throw SpecError("duplicate class name '" + c.name + "'");
        if (c.is_finite()) {
            if (c.finite().vertices.empty())
                throw SpecError("finite class '" + c.name + "' is empty");
            for (const auto& v : c.finite().vertices) {
                if (!labels.insert(v.label).second)
                    throw SpecError("duplicate vertex label '" + v.label + "'");
                double h;
                try {
                    h = v.height.eval(0);
                } catch (const ExprDomainError& e) {
                    throw SpecError("height of '" + v.label + "': " + e.what());
                }
                if (!(h > 0.0))
                    throw SpecError("height of '" + v.label + "' is not positive ("
                                    + format_number(h) + ")");
                if (h != v.value)
                    throw SpecError("stored height of '" + v.label + "' is stale");
            }
            continue;
        }
        const FamilyClass& f = c.family();
        bool any_member = false;
        for (long long k = f.start; k < f.start + kProbeCount; ++k) {
            double h, m;
            try {
                h = f.height.eval(k);
                m = f.multiplicity.eval(k);
            } catch (const ExprDomainError& e) {
                throw SpecError("family '" + c.name + "': " + e.what());
            }
            if (!(h > 0.0))
                throw SpecError("family '" + c.name + "': height " + format_number(h)
                                + " is not positive at k = " + std::to_string(k));
            if (m < 0.0 || m != std::floor(m))
                throw SpecError("family '" + c.name + "': multiplicity " + format_number(m)
                                + " is not a non-negative integer at k = " + std::to_string(k));
            any_member = any_member || m >= 1.0;
        }
        if (!any_member)
            throw SpecError("family '" + c.name + "' has no members among its first "
                            + std::to_string(kProbeCount) + " indices");
        if (auto g = f.multiplicity.growth_form()) {
            bool decays = g->base < 1.0 || (g->base == 1.0 && g->power < 0.0);
            if (decays && g->envelope)
                throw SpecError("family '" + c.name
                                + "': multiplicity is eventually zero (family is finite)");
        }
        if (auto h = f.height.additive_form()) {
            bool eventually_negative = h->lin < 0.0 || (h->lin == 0.0 && h->logk < 0.0);
            if (eventually_negative)
                throw SpecError("family '" + c.name + "': height is eventually non-positive");
        }
    }
    auto check_ref = [&](const VertexRef& v) {
        if (v.decl >= classes.size())
            throw SpecError("vertex reference to unknown class");
        const ClassDecl& d = classes[v.decl];
        if (d.is_finite()) {
            if (v.member < 0 || static_cast<std::size_t>(v.member) >= d.finite().vertices.size())
                throw SpecError("vertex reference out of range in class '" + d.name + "'");
        } else if (v.member < d.family().start) {
            throw SpecError("index " + std::to_string(v.member) + " precedes start of family '"
                            + d.name + "'");
        }
    };
    for (const auto& [a, b] : edges.forbidden) {
        check_ref(a);
        check_ref(b);
        if (edges.mode == EdgeMode::ClassPairs && !class_edge(a.decl, b.decl))
            throw SpecError("forbidden pair (" + label_of(a) + "," + label_of(b)
                            + ") is not allowed at class level");
    }
    for (const auto& [a, b] : edges.class_pairs)
        if (a >= classes.size() || b >= classes.size())
            throw SpecError("class pair refers to unknown class");
    if (root)
        check_ref(*root);
}

RftSpec parse_spec(std::string_view text) {
    RftSpec spec = SpecParser(text).parse();
    return spec;
}

RftSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SpecError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_spec(ss.str());
    } catch (const SpecError& e) {
        throw SpecError(path + ": " + e.message(), e.line(), e.column());
    }
}

std::string to_text(const RftSpec& spec) {
    std::ostringstream out;
    for (const auto& c : spec.classes) {
        out << "class " << c.name;
        if (c.is_finite()) {
            out << " finite { ";
            const auto& vs = c.finite().vertices;
            for (std::size_t i = 0; i < vs.size(); ++i)
                out << (i ? ", " : "") << vs[i].label << ": " << vs[i].height.to_string();
            out << " }\n";
        } else {
            const auto& f = c.family();
            out << " family k from " << f.start << " height " << f.height.to_string();
            if (!(f.multiplicity == Expr::constant(1.0)))
                out << " mult " << f.multiplicity.to_string();
            out << "\n";
        }
    }
    if (spec.edges.mode == EdgeMode::CompleteMinusForbidden) {
        out << "edges complete_minus_D\n";
    } else {
        out << "edges pairs {";
        bool first = true;
        for (const auto& [a, b] : spec.edges.class_pairs) {
            out << (first ? " " : ", ") << "(" << spec.classes[a].name << ","
                << spec.classes[b].name << ")";
            first = false;
        }
        out << " }\n";
    }
    if (!spec.edges.forbidden.empty()) {
        out << "forbid {";
        bool first = true;
        for (const auto& [a, b] : spec.edges.forbidden) {
            out << (first ? " " : ", ") << "(" << spec.label_of(a) << "," << spec.label_of(b)
                << ")";
            first = false;
        }
        out << " }\n";
    }
    if (spec.root)
        out << "root " << spec.label_of(*spec.root) << "\n";
    return out.str();
}

} // namespace rftflow

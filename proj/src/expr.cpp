#include "rftflow/expr.hpp"

#include "rftflow/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace rftflow {

struct Expr::Node {
    Op op = Op::Const;
    double value = 0.0;
    Expr a{std::shared_ptr<const Node>{}};
    Expr b{std::shared_ptr<const Node>{}};
};

namespace {

int precedence(Expr::Op op) {
    switch (op) {
    case Expr::Op::Add:
    case Expr::Op::Sub: return 1;
    case Expr::Op::Mul:
    case Expr::Op::Div: return 2;
    case Expr::Op::Neg: return 3;
    case Expr::Op::Pow: return 4;
    default: return 5;
    }
}

const char* function_name(Expr::Op op) {
    switch (op) {
    case Expr::Op::Abs: return "abs";
    case Expr::Op::Ln: return "ln";
    case Expr::Op::Exp: return "exp";
    case Expr::Op::Floor: return "floor";
    default: return nullptr;
    }
}

double checked(double v, long long k, const char* what) {
    if (!std::isfinite(v))
        throw ExprDomainError(std::string(what) + " is not finite", k);
    return v;
}

} // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = value;
    return Expr(std::move(n));
}

Expr Expr::index() {
    auto n = std::make_shared<Node>();
    n->op = Op::Var;
    return Expr(std::move(n));
}

Expr Expr::unary(Op op, Expr operand) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(operand);
    return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(lhs);
    n->b = std::move(rhs);
    return Expr(std::move(n));
}

Expr::Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
const Expr* Expr::lhs() const { return node_->a.node_ ? &node_->a : nullptr; }
const Expr* Expr::rhs() const { return node_->b.node_ ? &node_->b : nullptr; }

double Expr::eval(long long k) const {
    const Node& n = *node_;
    switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return static_cast<double>(k);
    case Op::Neg: return -n.a.eval(k);
    case Op::Abs: return std::fabs(n.a.eval(k));
    case Op::Floor: return std::floor(n.a.eval(k));
    case Op::Exp: return checked(std::exp(n.a.eval(k)), k, "exp()");
    case Op::Ln: {
        double v = n.a.eval(k);
        if (!(v > 0.0))
            throw ExprDomainError("ln() of non-positive value " + format_number(v), k);
        return std::log(v);
    }
    case Op::Add: return checked(n.a.eval(k) + n.b.eval(k), k, "sum");
    case Op::Sub: return checked(n.a.eval(k) - n.b.eval(k), k, "difference");
    case Op::Mul: return checked(n.a.eval(k) * n.b.eval(k), k, "product");
    case Op::Div: {
        double den = n.b.eval(k);
        if (den == 0.0)
            throw ExprDomainError("division by zero", k);
        return checked(n.a.eval(k) / den, k, "quotient");
    }
    case Op::Pow: {
        double base = n.a.eval(k);
        double ex = n.b.eval(k);
        double v = std::pow(base, ex);
        if (std::isnan(v))
            throw ExprDomainError("power " + format_number(base) + "^" + format_number(ex)
                                      + " is undefined",
                                  k);
        return checked(v, k, "power");
    }
    }
    return 0.0;
}

bool Expr::depends_on_index() const {
    const Node& n = *node_;
    if (n.op == Op::Var)
        return true;
    if (n.op == Op::Const)
        return false;
    if (n.a.node_ && n.a.depends_on_index())
        return true;
    return n.b.node_ && n.b.depends_on_index();
}

std::string format_number(double value) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, value);
        if (std::strtod(buf, nullptr) == value)
            break;
    }
    return buf;
}

std::string Expr::to_string() const {
    const Node& n = *node_;
    auto wrap = [](const Expr& e, bool paren) {
        std::string s = e.to_string();
        return paren ? "(" + s + ")" : s;
    };
    switch (n.op) {
    case Op::Const: {
        std::string s = format_number(n.value);
        return n.value < 0 ? "(" + s + ")" : s;
    }
    case Op::Var: return "k";
    case Op::Neg: return "-" + wrap(n.a, precedence(n.a.op()) < 3);
    case Op::Abs:
    case Op::Ln:
    case Op::Exp:
    case Op::Floor: return std::string(function_name(n.op)) + "(" + n.a.to_string() + ")";
    case Op::Add:
    case Op::Sub:
        return wrap(n.a, false) + (n.op == Op::Add ? " + " : " - ")
             + wrap(n.b, precedence(n.b.op()) <= 1);
    case Op::Mul:
    case Op::Div:
        return wrap(n.a, precedence(n.a.op()) < 2) + (n.op == Op::Mul ? "*" : "/")
             + wrap(n.b, precedence(n.b.op()) <= 2);
    case Op::Pow:
        return wrap(n.a, precedence(n.a.op()) <= 4) + "^" + wrap(n.b, precedence(n.b.op()) < 3);
    }
    return {};
}

bool operator==(const Expr& x, const Expr& y) {
    if (x.node_ == y.node_)
        return true;
    if (!x.node_ || !y.node_)
        return false;
    const auto& a = *x.node_;
    const auto& b = *y.node_;
    if (a.op != b.op)
        return false;
    if (a.op == Expr::Op::Const)
        return a.value == b.value;
    if (a.op == Expr::Op::Var)
        return true;
    if (!(a.a == b.a))
        return false;
    return (!a.b.node_ && !b.b.node_) || (a.b.node_ && b.b.node_ && a.b == b.b);
}

// ---------------------------------------------------------------------------
// Shape recognition

std::optional<AdditiveForm> Expr::additive_form() const {
    if (!depends_on_index()) {
        double v;
        try {
            v = eval(1);
        } catch (const ExprDomainError&) {
            return std::nullopt;
        }
        return AdditiveForm{0.0, 0.0, v};
    }
    const Node& n = *node_;
    auto is_const = [](const AdditiveForm& f) { return f.lin == 0.0 && f.logk == 0.0; };
    auto scale = [](AdditiveForm f, double s) {
        return AdditiveForm{f.lin * s, f.logk * s, f.constant * s};
    };
    switch (n.op) {
    case Op::Var: return AdditiveForm{1.0, 0.0, 0.0};
    case Op::Neg: {
        auto f = n.a.additive_form();
        if (!f)
            return std::nullopt;
        return scale(*f, -1.0);
    }
    case Op::Add:
    case Op::Sub: {
        auto f = n.a.additive_form();
        auto g = n.b.additive_form();
        if (!f || !g)
            return std::nullopt;
        double s = n.op == Op::Add ? 1.0 : -1.0;
        return AdditiveForm{f->lin + s * g->lin, f->logk + s * g->logk,
                            f->constant + s * g->constant};
    }
    case Op::Mul: {
        auto f = n.a.additive_form();
        auto g = n.b.additive_form();
        if (!f || !g)
            return std::nullopt;
        if (is_const(*f))
            return scale(*g, f->constant);
        if (is_const(*g))
            return scale(*f, g->constant);
        return std::nullopt;
    }
    case Op::Div: {
        auto f = n.a.additive_form();
        auto g = n.b.additive_form();
        if (!f || !g || !is_const(*g) || g->constant == 0.0)
            return std::nullopt;
        return scale(*f, 1.0 / g->constant);
    }
    case Op::Ln: {
        auto g = n.a.growth_form();
        if (!g || g->envelope)
            return std::nullopt;
        return AdditiveForm{std::log(g->base), g->power, std::log(g->coef)};
    }
    default: return std::nullopt;
    }
}

std::optional<GrowthForm> Expr::growth_form() const {
    if (!depends_on_index()) {
        double v;
        try {
            v = eval(1);
        } catch (const ExprDomainError&) {
            return std::nullopt;
        }
        if (!(v > 0.0))
            return std::nullopt;
        return GrowthForm{v, 1.0, 0.0, false};
    }
    const Node& n = *node_;
    switch (n.op) {
    case Op::Var: return GrowthForm{1.0, 1.0, 1.0, false};
    case Op::Abs: return n.a.growth_form();
    case Op::Floor: {
        auto g = n.a.growth_form();
        if (!g)
            return std::nullopt;
        g->envelope = true;
        return g;
    }
    case Op::Mul: {
        auto f = n.a.growth_form();
        auto g = n.b.growth_form();
        if (!f || !g)
            return std::nullopt;
        return GrowthForm{f->coef * g->coef, f->base * g->base, f->power + g->power,
                          f->envelope || g->envelope};
    }
    case Op::Div: {
        auto f = n.a.growth_form();
        auto g = n.b.growth_form();
        if (!f || !g || g->envelope)
            return std::nullopt;
        return GrowthForm{f->coef / g->coef, f->base / g->base, f->power - g->power,
                          f->envelope};
    }
    case Op::Exp: {
        auto f = n.a.additive_form();
        if (!f)
            return std::nullopt;
        return GrowthForm{std::exp(f->constant), std::exp(f->lin), f->logk, false};
    }
    case Op::Pow: {
        if (!n.b.depends_on_index()) {
            auto f = n.a.growth_form();
            if (!f)
                return std::nullopt;
            double c = n.b.eval(1);
            if (f->envelope && !(c > 0.0))
                return std::nullopt;
            return GrowthForm{std::pow(f->coef, c), std::pow(f->base, c), f->power * c,
                              f->envelope};
        }
        if (n.a.depends_on_index())
            return std::nullopt;
        double b = n.a.eval(1);
        auto e = n.b.additive_form();
        if (!(b > 0.0) || !e)
            return std::nullopt;
        return GrowthForm{std::pow(b, e->constant), std::pow(b, e->lin), e->logk * std::log(b),
                          false};
    }
    default: return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Parser

class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t line, std::size_t column)
        : text_(text), line_(line), column_(column) {}

    Expr parse_all() {
        Expr e = parse_sum();
        skip_ws();
        if (pos_ < text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "' in expression");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw SpecError(what, line_, column_ + pos_);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c))
            fail(std::string("expected '") + c + "' in expression");
    }

    Expr parse_sum() {
        Expr lhs = parse_product();
        for (;;) {
            if (accept('+'))
                lhs = Expr::binary(Expr::Op::Add, lhs, parse_product());
            else if (accept('-'))
                lhs = Expr::binary(Expr::Op::Sub, lhs, parse_product());
            else
                return lhs;
        }
    }

    Expr parse_product() {
        Expr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = Expr::binary(Expr::Op::Mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = Expr::binary(Expr::Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    Expr parse_unary() {
        if (accept('-'))
            return Expr::unary(Expr::Op::Neg, parse_unary());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (accept('^'))
            return Expr::binary(Expr::Op::Pow, base, parse_unary());
        return base;
    }

    Expr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size())
            fail("unexpected end of expression");
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (accept('(')) {
            Expr e = parse_sum();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size()
                   && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string_view word = text_.substr(start, pos_ - start);
            if (word == "k")
                return Expr::index();
            Expr::Op op;
            if (word == "ln")
                op = Expr::Op::Ln;
            else if (word == "exp")
                op = Expr::Op::Exp;
            else if (word == "abs")
                op = Expr::Op::Abs;
            else if (word == "floor")
                op = Expr::Op::Floor;
            else {
                pos_ = start;
                fail("unknown identifier '" + std::string(word) + "'");
            }
            expect('(');
            Expr arg = parse_sum();
            expect(')');
            return Expr::unary(op, arg);
        }
        fail(std::string("unexpected '") + c + "' in expression");
    }

    Expr parse_number() {
        std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits();
            else
                pos_ = save;
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return Expr::constant(v);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t column_;
};

Expr Expr::parse(std::string_view text) { return ExprParser(text, 0, 1).parse_all(); }

Expr Expr::parse(std::string_view text, std::size_t line, std::size_t column) {
    return ExprParser(text, line, column).parse_all();
}

// ---------------------------------------------------------------------------

SpecError::SpecError(const std::string& what, std::size_t line, std::size_t column)
    : Error(line ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": "
                       + what
                 : what),
      message_(what), line_(line), column_(column) {}

ExprDomainError::ExprDomainError(const std::string& what, long long k)
    : NumericalError(what + " at k = " + std::to_string(k)), detail_(what), k_(k) {}

} // namespace rftflow

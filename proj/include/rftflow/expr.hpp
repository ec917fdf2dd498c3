#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace rftflow {

// Arithmetic expressions in the family index k:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?          (right-associative)
//   atom   := number | 'k' | func '(' expr ')' | '(' expr ')'
//   func   := 'ln' | 'exp' | 'abs' | 'floor'
//
// so -2^2 = -(2^2) and 2^-1 = 0.5.

/// Asymptotic additive shape  g(k) = lin*k + logk*ln(k) + constant.
struct AdditiveForm {
    double lin = 0.0;
    double logk = 0.0;
    double constant = 0.0;
};

/// Asymptotic multiplicative shape  m(k) = coef * base^k * k^power, coef > 0, base > 0.
/// `envelope` is set when the form only bounds the expression from above
/// (it sits under floor()); otherwise the identity is exact for k >= 1.
struct GrowthForm {
    double coef = 1.0;
    double base = 1.0;
    double power = 0.0;
    bool envelope = false;
};

class Expr {
public:
    enum class Op { Const, Var, Neg, Abs, Ln, Exp, Floor, Add, Sub, Mul, Div, Pow };

    /// The constant 0.
    Expr();

    static Expr constant(double value);
    static Expr index();
    static Expr unary(Op op, Expr operand);
    static Expr binary(Op op, Expr lhs, Expr rhs);

    /// Parses a complete expression; throws SpecError on trailing input.
    static Expr parse(std::string_view text);
    /// Same, reporting error positions relative to (line, column) of the
    /// first character of `text` in an enclosing document.
    static Expr parse(std::string_view text, std::size_t line, std::size_t column);

    /// Evaluates at index k. Throws ExprDomainError instead of producing
    /// NaN or infinity.
    double eval(long long k) const;

    bool depends_on_index() const;

    /// Round-trippable text (minimal parentheses, 17 significant digits).
    std::string to_string() const;

    /// Exact linear-in-(k, ln k) shape, when the tree has one.
    std::optional<AdditiveForm> additive_form() const;
    /// Exact or upper-envelope exponential-polynomial shape.
    std::optional<GrowthForm> growth_form() const;

    Op op() const;
    double value() const;
    const Expr* lhs() const;
    const Expr* rhs() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    struct Node;
    explicit Expr(std::shared_ptr<const Node> node);
    std::shared_ptr<const Node> node_;

    friend class ExprParser;
};

bool operator==(const Expr& a, const Expr& b);

/// Formats a double so that parsing the text yields the same value.
std::string format_number(double value);

} // namespace rftflow

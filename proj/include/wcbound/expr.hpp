#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wcbound/error.hpp"

namespace wcb {

struct BoxRegion; // model.hpp

// Closed interval with outward-rounded arithmetic: every operation widens its
// result by at least one ulp per endpoint, so the exact range of the operation
// over the operand intervals is always contained in the computed interval.
// Endpoints may be infinite (e.g. after division by an interval containing 0).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

enum class Op {
    Lit,  // real literal
    Var,  // x1..xd, 1-based index
    Neg,
    Abs,
    Exp,
    Ln,
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent only
    Min,  // n-ary, n >= 2
    Max   // n-ary, n >= 2
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    Op op;
    double lit = 0.0;             // Op::Lit
    int var = 0;                  // Op::Var
    int expo = 0;                 // Op::Pow
    std::vector<ExprPtr> kids;
};

// Node constructors (shared by the parser and programmatic builders).
ExprPtr lit(double v);
ExprPtr var(int index);
ExprPtr node(Op op, std::vector<ExprPtr> kids);
ExprPtr pow_node(ExprPtr base, int exponent);

// Parse `text` against dimension `dim` (variables x1..x<dim> allowed).
// Grammar (precedence low to high): + - | * / | unary - | ^int | primary.
// Throws Error{SyntaxError (with byte offset), UnknownIdentifier, ArityError}.
ExprPtr parse(const std::string& text, int dim);

// Canonical fully parenthesized rendering; parse(render(e), d) reproduces e
// exactly (literals are emitted in shortest round-trip form).
std::string render(const ExprPtr& e);

// Structural equality (literals compared bitwise).
bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Largest variable index referenced (0 for constant expressions).
int max_var(const ExprPtr& e);

// IEEE double evaluation at a point. Throws Error{DomainError} for ln of a
// nonpositive value or division by zero, carrying the offending subtree.
double eval_point(const ExprPtr& e, const std::vector<double>& x);

// Natural interval extension over a box; guaranteed to contain the exact range
// of e over the box (not required to be tight). Throws Error{DomainError} only
// when an intermediate interval violates a function domain entirely.
Interval eval_interval(const ExprPtr& e, const BoxRegion& box);

// Central-difference gradient with explicit step h (same h per component).
std::vector<double> grad_fd(const ExprPtr& e, const std::vector<double>& x, double h);

// Default-step variant: h_i = 1e-6 * max(1, |x_i|) per component.
std::vector<double> grad_fd(const ExprPtr& e, const std::vector<double>& x);

} // namespace wcb

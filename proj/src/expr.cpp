#include "wcbound/expr.hpp"

#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>

#include "wcbound/model.hpp"

namespace wcb {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

ExprPtr lit(double v) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Lit;
    e->lit = v;
    return e;
}

ExprPtr var(int index) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Var;
    e->var = index;
    return e;
}

ExprPtr node(Op op, std::vector<ExprPtr> kids) {
    // canonical form: negation of a literal folds into a (signed) literal, so
    // that rendering and reparsing reproduce the same tree
    if (op == Op::Neg && kids.size() == 1 && kids[0]->op == Op::Lit)
        return lit(-kids[0]->lit);
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->kids = std::move(kids);
    return e;
}

ExprPtr pow_node(ExprPtr base, int exponent) {
    auto e = std::make_shared<Expr>();
    e->op = Op::Pow;
    e->expo = exponent;
    e->kids.push_back(std::move(base));
    return e;
}

// ---------------------------------------------------------------------------
// Parser: recursive descent over bytes, tracking offsets for error messages.
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(const std::string& text, int dim) : s_(text), dim_(dim) {}

    ExprPtr run() {
        ExprPtr e = parse_sum();
        skip_ws();
        if (pos_ != s_.size())
            fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    int dim_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg, ErrorCode code = ErrorCode::SyntaxError) {
        throw Error(code, msg + " at offset " + std::to_string(pos_),
                    static_cast<long>(pos_));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) { ++pos_; return true; }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    ExprPtr parse_sum() {
        ExprPtr e = parse_prod();
        for (;;) {
            if (eat('+')) e = node(Op::Add, {e, parse_prod()});
            else if (eat('-')) e = node(Op::Sub, {e, parse_prod()});
            else return e;
        }
    }

    ExprPtr parse_prod() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (eat('*')) e = node(Op::Mul, {e, parse_unary()});
            else if (eat('/')) e = node(Op::Div, {e, parse_unary()});
            else return e;
        }
    }

    ExprPtr parse_unary() {
        if (eat('-')) return node(Op::Neg, {parse_unary()});
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_primary();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            bool neg = false;
            if (pos_ < s_.size() && s_[pos_] == '-') { neg = true; ++pos_; }
            size_t dstart = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (pos_ == dstart) { pos_ = start; fail("integer literal exponent expected"); }
            if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
                fail("integer literal exponent expected");
            long expo = std::strtol(s_.c_str() + dstart, nullptr, 10);
            if (expo > 64) fail("exponent too large (max 64)");
            return pow_node(base, static_cast<int>(neg ? -expo : expo));
        }
        return base;
    }

    ExprPtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            ExprPtr e = parse_sum();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_ident();
        fail("unexpected character");
    }

    ExprPtr parse_number() {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<size_t>(end - begin);
        return lit(v);
    }

    ExprPtr parse_ident() {
        size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);

        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            long idx = std::strtol(name.c_str() + 1, nullptr, 10);
            if (idx < 1 || idx > dim_) {
                pos_ = start;
                fail("variable " + name + " exceeds dimension " + std::to_string(dim_),
                     ErrorCode::UnknownIdentifier);
            }
            return var(static_cast<int>(idx));
        }

        Op op;
        int min_args, max_args;
        if (name == "min")      { op = Op::Min; min_args = 2; max_args = 1 << 20; }
        else if (name == "max") { op = Op::Max; min_args = 2; max_args = 1 << 20; }
        else if (name == "abs") { op = Op::Abs; min_args = 1; max_args = 1; }
        else if (name == "exp") { op = Op::Exp; min_args = 1; max_args = 1; }
        else if (name == "ln")  { op = Op::Ln;  min_args = 1; max_args = 1; }
        else {
            pos_ = start;
            fail("unknown identifier '" + name + "'", ErrorCode::UnknownIdentifier);
        }

        if (!eat('(')) fail("expected '(' after " + name);
        std::vector<ExprPtr> args;
        args.push_back(parse_sum());
        while (eat(',')) args.push_back(parse_sum());
        if (!eat(')')) fail("expected ')'");
        if (static_cast<int>(args.size()) < min_args || static_cast<int>(args.size()) > max_args) {
            pos_ = start;
            fail(name + " takes " + (min_args == max_args ? std::to_string(min_args)
                                                          : "at least " + std::to_string(min_args)) +
                     " argument(s), got " + std::to_string(args.size()),
                 ErrorCode::ArityError);
        }
        return node(op, std::move(args));
    }
};

} // namespace

ExprPtr parse(const std::string& text, int dim) {
    return Parser(text, dim).run();
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

namespace {

std::string lit_to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void render_rec(const ExprPtr& e, std::string& out) {
    switch (e->op) {
    case Op::Lit:
        if (e->lit < 0 || std::signbit(e->lit)) {
            out += "(";
            out += lit_to_string(e->lit);
            out += ")";
        } else {
            out += lit_to_string(e->lit);
        }
        return;
    case Op::Var:
        out += "x" + std::to_string(e->var);
        return;
    case Op::Neg:
        out += "(-";
        render_rec(e->kids[0], out);
        out += ")";
        return;
    case Op::Abs: case Op::Exp: case Op::Ln: {
        out += e->op == Op::Abs ? "abs(" : e->op == Op::Exp ? "exp(" : "ln(";
        render_rec(e->kids[0], out);
        out += ")";
        return;
    }
    case Op::Add: case Op::Sub: case Op::Mul: case Op::Div: {
        const char* sym = e->op == Op::Add ? " + " : e->op == Op::Sub ? " - "
                        : e->op == Op::Mul ? "*" : "/";
        out += "(";
        render_rec(e->kids[0], out);
        out += sym;
        render_rec(e->kids[1], out);
        out += ")";
        return;
    }
    case Op::Pow:
        out += "(";
        render_rec(e->kids[0], out);
        out += ")^";
        out += std::to_string(e->expo);
        return;
    case Op::Min: case Op::Max: {
        out += e->op == Op::Min ? "min(" : "max(";
        for (size_t i = 0; i < e->kids.size(); ++i) {
            if (i) out += ", ";
            render_rec(e->kids[i], out);
        }
        out += ")";
        return;
    }
    }
}

} // namespace

std::string render(const ExprPtr& e) {
    std::string out;
    render_rec(e, out);
    return out;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->op != b->op) return false;
    switch (a->op) {
    case Op::Lit: {
        // bitwise comparison so that -0.0 != 0.0 round-trips are caught
        double x = a->lit, y = b->lit;
        return std::memcmp(&x, &y, sizeof x) == 0;
    }
    case Op::Var: return a->var == b->var;
    case Op::Pow:
        if (a->expo != b->expo) return false;
        break;
    default: break;
    }
    if (a->kids.size() != b->kids.size()) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!expr_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

int max_var(const ExprPtr& e) {
    int m = e->op == Op::Var ? e->var : 0;
    for (const auto& k : e->kids) m = std::max(m, max_var(k));
    return m;
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void domain_fail(const ExprPtr& e, const char* what) {
    throw Error(ErrorCode::DomainError,
                std::string(what) + " in subexpression " + render(e));
}

double pow_int(double base, int k) {
    // exponentiation by squaring; for k=2 this is exactly base*base
    double result = 1.0;
    double b = base;
    unsigned n = static_cast<unsigned>(k);
    while (n) {
        if (n & 1u) result = (result == 1.0) ? b : result * b;
        n >>= 1;
        if (n) b *= b;
    }
    return result;
}

} // namespace

double eval_point(const ExprPtr& e, const std::vector<double>& x) {
    switch (e->op) {
    case Op::Lit: return e->lit;
    case Op::Var: return x[static_cast<size_t>(e->var - 1)];
    case Op::Neg: return -eval_point(e->kids[0], x);
    case Op::Abs: return std::fabs(eval_point(e->kids[0], x));
    case Op::Exp: return std::exp(eval_point(e->kids[0], x));
    case Op::Ln: {
        double v = eval_point(e->kids[0], x);
        if (!(v > 0.0)) domain_fail(e, "ln of nonpositive value");
        return std::log(v);
    }
    case Op::Add: return eval_point(e->kids[0], x) + eval_point(e->kids[1], x);
    case Op::Sub: return eval_point(e->kids[0], x) - eval_point(e->kids[1], x);
    case Op::Mul: return eval_point(e->kids[0], x) * eval_point(e->kids[1], x);
    case Op::Div: {
        double num = eval_point(e->kids[0], x);
        double den = eval_point(e->kids[1], x);
        if (den == 0.0) domain_fail(e, "division by zero");
        return num / den;
    }
    case Op::Pow: {
        double b = eval_point(e->kids[0], x);
        if (e->expo >= 0) return pow_int(b, e->expo);
        double p = pow_int(b, -e->expo);
        if (p == 0.0) domain_fail(e, "zero raised to negative power");
        return 1.0 / p;
    }
    case Op::Min: case Op::Max: {
        double v = eval_point(e->kids[0], x);
        for (size_t i = 1; i < e->kids.size(); ++i) {
            double w = eval_point(e->kids[i], x);
            v = e->op == Op::Min ? std::min(v, w) : std::max(v, w);
        }
        return v;
    }
    }
    throw Error(ErrorCode::Internal, "unreachable op");
}

// ---------------------------------------------------------------------------
// Interval evaluation (outward rounded)
// ---------------------------------------------------------------------------

namespace {

double round_down(double v) { return std::isfinite(v) ? std::nextafter(v, -kInf) : v; }
double round_up(double v)   { return std::isfinite(v) ? std::nextafter(v,  kInf) : v; }
// transcendental library calls get two ulps of slack
double round_down2(double v) { return round_down(round_down(v)); }
double round_up2(double v)   { return round_up(round_up(v)); }

Interval make_iv(double lo, double hi) { return Interval{lo, hi}; }

// 0 * inf would be NaN; in interval arithmetic the factor 0 makes the product 0.
double safe_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

Interval iv_add(Interval a, Interval b) {
    return make_iv(round_down(a.lo + b.lo), round_up(a.hi + b.hi));
}

Interval iv_sub(Interval a, Interval b) {
    return make_iv(round_down(a.lo - b.hi), round_up(a.hi - b.lo));
}

Interval iv_mul(Interval a, Interval b) {
    double p1 = safe_mul(a.lo, b.lo), p2 = safe_mul(a.lo, b.hi);
    double p3 = safe_mul(a.hi, b.lo), p4 = safe_mul(a.hi, b.hi);
    return make_iv(round_down(std::min({p1, p2, p3, p4})),
                   round_up(std::max({p1, p2, p3, p4})));
}

Interval iv_neg(Interval a) { return make_iv(-a.hi, -a.lo); }

Interval iv_abs(Interval a) {
    if (a.lo >= 0.0) return a;
    if (a.hi <= 0.0) return iv_neg(a);
    return make_iv(0.0, std::max(-a.lo, a.hi));
}

Interval iv_div(Interval a, Interval b, const ExprPtr& e) {
    if (b.lo == 0.0 && b.hi == 0.0) domain_fail(e, "division by zero interval");
    if (b.lo > 0.0 || b.hi < 0.0) {
        double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
        return make_iv(round_down(std::min({q1, q2, q3, q4})),
                       round_up(std::max({q1, q2, q3, q4})));
    }
    // denominator straddles zero: sound but useless bound
    return make_iv(-kInf, kInf);
}

Interval iv_pow(Interval a, int k, const ExprPtr& e) {
    if (k == 0) return make_iv(1.0, 1.0);
    if (k < 0) return iv_div(make_iv(1.0, 1.0), iv_pow(a, -k, e), e);
    // slack grows with the number of multiplications in pow_int
    auto widen = [k](double v, bool up) {
        for (int i = 0; i <= k; ++i) v = up ? round_up(v) : round_down(v);
        return v;
    };
    if (k % 2 == 1 || a.lo >= 0.0) {
        return make_iv(widen(pow_int(a.lo, k), false), widen(pow_int(a.hi, k), true));
    }
    if (a.hi <= 0.0) {
        return make_iv(widen(pow_int(a.hi, k), false), widen(pow_int(a.lo, k), true));
    }
    double m = std::max(-a.lo, a.hi);
    return make_iv(0.0, widen(pow_int(m, k), true));
}

Interval iv_rec(const ExprPtr& e, const std::vector<Interval>& vars) {
    switch (e->op) {
    case Op::Lit: return make_iv(e->lit, e->lit);
    case Op::Var: return vars[static_cast<size_t>(e->var - 1)];
    case Op::Neg: return iv_neg(iv_rec(e->kids[0], vars));
    case Op::Abs: return iv_abs(iv_rec(e->kids[0], vars));
    case Op::Exp: {
        Interval a = iv_rec(e->kids[0], vars);
        double lo = std::max(0.0, round_down2(std::exp(a.lo)));
        return make_iv(lo, round_up2(std::exp(a.hi)));
    }
    case Op::Ln: {
        Interval a = iv_rec(e->kids[0], vars);
        if (a.hi <= 0.0) domain_fail(e, "ln of entirely nonpositive interval");
        double lo = a.lo > 0.0 ? round_down2(std::log(a.lo)) : -kInf;
        return make_iv(lo, round_up2(std::log(a.hi)));
    }
    case Op::Add: return iv_add(iv_rec(e->kids[0], vars), iv_rec(e->kids[1], vars));
    case Op::Sub: return iv_sub(iv_rec(e->kids[0], vars), iv_rec(e->kids[1], vars));
    case Op::Mul: return iv_mul(iv_rec(e->kids[0], vars), iv_rec(e->kids[1], vars));
    case Op::Div: return iv_div(iv_rec(e->kids[0], vars), iv_rec(e->kids[1], vars), e);
    case Op::Pow: return iv_pow(iv_rec(e->kids[0], vars), e->expo, e);
    case Op::Min: case Op::Max: {
        Interval v = iv_rec(e->kids[0], vars);
        for (size_t i = 1; i < e->kids.size(); ++i) {
            Interval w = iv_rec(e->kids[i], vars);
            if (e->op == Op::Min)
                v = make_iv(std::min(v.lo, w.lo), std::min(v.hi, w.hi));
            else
                v = make_iv(std::max(v.lo, w.lo), std::max(v.hi, w.hi));
        }
        return v;
    }
    }
    throw Error(ErrorCode::Internal, "unreachable op");
}

} // namespace

Interval eval_interval(const ExprPtr& e, const BoxRegion& box) {
    std::vector<Interval> vars(box.lower.size());
    for (size_t i = 0; i < vars.size(); ++i)
        vars[i] = Interval{box.lower[i], box.upper[i]};
    return iv_rec(e, vars);
}

// ---------------------------------------------------------------------------
// Finite differences
// ---------------------------------------------------------------------------

std::vector<double> grad_fd(const ExprPtr& e, const std::vector<double>& x, double h) {
    std::vector<double> g(x.size());
    std::vector<double> y = x;
    for (size_t i = 0; i < x.size(); ++i) {
        y[i] = x[i] + h;
        double fp = eval_point(e, y);
        y[i] = x[i] - h;
        double fm = eval_point(e, y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

std::vector<double> grad_fd(const ExprPtr& e, const std::vector<double>& x) {
    std::vector<double> g(x.size());
    std::vector<double> y = x;
    for (size_t i = 0; i < x.size(); ++i) {
        double h = 1e-6 * std::max(1.0, std::fabs(x[i]));
        y[i] = x[i] + h;
        double fp = eval_point(e, y);
        y[i] = x[i] - h;
        double fm = eval_point(e, y);
        y[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace wcb

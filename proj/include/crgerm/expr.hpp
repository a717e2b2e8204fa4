#pragma once

// Expression DSL for the defining functions of a hypersurface germ.
//
// Expressions are immutable trees over the variables z, zbar, v with exact
// rational complex constants and the function whitelist
//   exp, log, logabs, sin, cos, tan, re, im, conj, abs2, pow-by-integer.
// zbar always denotes the conjugate of z; v is a real variable.

#include "crgerm/rational.hpp"

#include <cctype>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crgerm {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

enum class Var { Z, ZBar, V };

enum class ExprKind {
    Const,
    Variable,
    // unary
    Neg,
    Exp,
    Log,
    LogAbs,
    Sin,
    Cos,
    Tan,
    Re,
    Im,
    Conj,
    Abs2,
    // binary
    Add,
    Sub,
    Mul,
    Div,
    Pow,  // integer exponent in `exponent`, operand in `a`
};

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    RatC value;        // Const
    Var var = Var::Z;  // Variable
    int exponent = 0;  // Pow
    Expr a, b;
};

inline bool is_const(const Expr& e, const RatC& c) {
    return e->kind == ExprKind::Const && e->value == c;
}

// ---------------------------------------------------------------------------
// Smart constructors. These fold exact constant arithmetic and the handful of
// identities needed to keep derivative output tidy; they are not a simplifier.
// ---------------------------------------------------------------------------

inline Expr constant(RatC c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Const;
    n->value = std::move(c);
    return n;
}

inline Expr constant(int k) { return constant(RatC(k)); }

inline Expr variable(Var v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Variable;
    n->var = v;
    return n;
}

inline Expr make_unary(ExprKind k, Expr a) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    return n;
}

inline Expr make_binary(ExprKind k, Expr a, Expr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

inline Expr neg(const Expr& e) {
    if (e->kind == ExprKind::Const) return constant(-e->value);
    if (e->kind == ExprKind::Neg) return e->a;
    return make_unary(ExprKind::Neg, e);
}

inline Expr add(const Expr& x, const Expr& y) {
    if (is_const(x, RatC(0))) return y;
    if (is_const(y, RatC(0))) return x;
    if (x->kind == ExprKind::Const && y->kind == ExprKind::Const)
        return constant(x->value + y->value);
    return make_binary(ExprKind::Add, x, y);
}

inline Expr sub(const Expr& x, const Expr& y) {
    if (is_const(y, RatC(0))) return x;
    if (is_const(x, RatC(0))) return neg(y);
    if (x->kind == ExprKind::Const && y->kind == ExprKind::Const)
        return constant(x->value - y->value);
    return make_binary(ExprKind::Sub, x, y);
}

inline Expr mul(const Expr& x, const Expr& y) {
    if (is_const(x, RatC(0)) || is_const(y, RatC(0))) return constant(0);
    if (is_const(x, RatC(1))) return y;
    if (is_const(y, RatC(1))) return x;
    if (x->kind == ExprKind::Const && y->kind == ExprKind::Const)
        return constant(x->value * y->value);
    return make_binary(ExprKind::Mul, x, y);
}

inline Expr div(const Expr& x, const Expr& y) {
    if (is_const(y, RatC(1))) return x;
    if (x->kind == ExprKind::Const && y->kind == ExprKind::Const && !y->value.is_zero())
        return constant(x->value / y->value);
    return make_binary(ExprKind::Div, x, y);
}

inline Expr pow_int(const Expr& x, int n) {
    if (n == 1) return x;
    if (n == 0) return constant(1);
    if (x->kind == ExprKind::Const && (n > 0 || !x->value.is_zero()))
        return constant(ratc_pow(x->value, n));
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprKind::Pow;
    node->a = x;
    node->exponent = n;
    return node;
}

inline Expr conj_expr(const Expr& e) {
    if (e->kind == ExprKind::Const) return constant(e->value.conj());
    if (e->kind == ExprKind::Variable) {
        if (e->var == Var::Z) return variable(Var::ZBar);
        if (e->var == Var::ZBar) return variable(Var::Z);
        return e;  // v is real
    }
    if (e->kind == ExprKind::Conj) return e->a;
    return make_unary(ExprKind::Conj, e);
}

inline Expr apply_func(ExprKind k, const Expr& arg) {
    switch (k) {
        case ExprKind::Conj:
            return conj_expr(arg);
        case ExprKind::Exp:
            if (is_const(arg, RatC(0))) return constant(1);
            break;
        case ExprKind::Sin:
        case ExprKind::Tan:
            if (is_const(arg, RatC(0))) return constant(0);
            break;
        case ExprKind::Cos:
            if (is_const(arg, RatC(0))) return constant(1);
            break;
        case ExprKind::Log:
        case ExprKind::LogAbs:
            if (is_const(arg, RatC(1))) return constant(0);
            break;
        case ExprKind::Re:
            if (arg->kind == ExprKind::Const) return constant(RatC(arg->value.re));
            break;
        case ExprKind::Im:
            if (arg->kind == ExprKind::Const) return constant(RatC(arg->value.im));
            break;
        case ExprKind::Abs2:
            if (arg->kind == ExprKind::Const) return constant(RatC(arg->value.norm()));
            break;
        default:
            break;
    }
    return make_unary(k, arg);
}

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SyntaxError : Error {
    std::size_t offset;  // 1-based byte offset into the source
    SyntaxError(const std::string& msg, std::size_t off)
        : Error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct UnknownIdentifier : Error {
    std::string name;
    std::size_t offset;
    UnknownIdentifier(std::string id, std::size_t off)
        : Error("unknown identifier '" + id + "' (at byte " + std::to_string(off) + ")"),
          name(std::move(id)),
          offset(off) {}
};

std::string to_string(const Expr& e);

struct EvalSingularity : Error {
    Expr subtree;
    Complex z;
    double v;
    EvalSingularity(Expr sub, Complex zz, double vv)
        : Error("evaluation singularity in '" + to_string(sub) + "' at z=(" +
                std::to_string(zz.real()) + "," + std::to_string(zz.imag()) +
                "), v=" + std::to_string(vv)),
          subtree(std::move(sub)),
          z(zz),
          v(vv) {}
};

// ---------------------------------------------------------------------------
// Parser.  Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := number | 'i' | ident | ident '(' expr (',' expr)* ')'
//           | '(' expr ')' | '-' atom
// Numbers are decimals or rationals p/q; all are kept exact.
// ---------------------------------------------------------------------------

namespace detail {

class Parser {
public:
    explicit Parser(std::string src) : src_(std::move(src)) {}

    Expr run() {
        Expr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_ + 1); }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' ||
                                      src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool match(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr parse_expr() {
        Expr left = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                left = add(left, parse_term());
            } else if (c == '-') {
                ++pos_;
                left = sub(left, parse_term());
            } else {
                return left;
            }
        }
    }

    Expr parse_term() {
        Expr left = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                left = mul(left, parse_factor());
            } else if (c == '/') {
                ++pos_;
                left = div(left, parse_factor());
            } else {
                return left;
            }
        }
    }

    Expr parse_factor() {
        Expr base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            return pow_int(base, parse_integer());
        }
        return base;
    }

    int parse_integer() {
        skip_ws();
        bool negative = false;
        if (pos_ < src_.size() && src_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
            fail("expected integer exponent");
        long value = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            value = value * 10 + (src_[pos_] - '0');
            if (value > 1000000) fail("exponent too large");
            ++pos_;
        }
        return static_cast<int>(negative ? -value : value);
    }

    Expr parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            Expr e = parse_expr();
            if (!match(')')) fail("expected ')'");
            return e;
        }
        if (c == '-') {
            // pow binds tighter than unary minus: -z^2 is -(z^2)
            ++pos_;
            return neg(parse_factor());
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("expected number, identifier, or '('");
    }

    Expr parse_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
            ++pos_;
        std::string text = src_.substr(start, pos_ - start);
        if (text.empty() || text == "." || text.find('.') != text.rfind('.')) {
            pos_ = start;
            fail("malformed number");
        }
        return constant(RatC(rat_parse(text)));
    }

    Expr parse_ident() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
                                      src_[pos_] == '_'))
            ++pos_;
        std::string name = src_.substr(start, pos_ - start);

        if (name == "i") return constant(RatC::unit_i());
        if (name == "z") return variable(Var::Z);
        if (name == "zbar") return variable(Var::ZBar);
        if (name == "v") return variable(Var::V);

        static const std::pair<const char*, ExprKind> funcs[] = {
            {"exp", ExprKind::Exp},   {"log", ExprKind::Log}, {"logabs", ExprKind::LogAbs},
            {"sin", ExprKind::Sin},   {"cos", ExprKind::Cos}, {"tan", ExprKind::Tan},
            {"re", ExprKind::Re},     {"im", ExprKind::Im},   {"conj", ExprKind::Conj},
            {"abs2", ExprKind::Abs2},
        };
        for (const auto& [fname, kind] : funcs) {
            if (name == fname) {
                if (!match('(')) fail("expected '(' after function name");
                std::vector<Expr> args;
                args.push_back(parse_expr());
                while (match(',')) args.push_back(parse_expr());
                if (!match(')')) fail("expected ')'");
                if (args.size() != 1) fail(std::string(fname) + " expects exactly one argument");
                return apply_func(kind, args[0]);
            }
        }
        throw UnknownIdentifier(name, start + 1);
    }
};

}  // namespace detail

inline Expr parse(const std::string& source) { return detail::Parser(source).run(); }

// ---------------------------------------------------------------------------
// Printing. print∘parse∘print is a fixed point.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string rat_print(const Rat& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return rat_string(r);
}

// Precedence: add/sub 1, mul/div 2, unary minus 2, pow 4, atoms 5.
inline int print_prec(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Add:
        case ExprKind::Sub:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Neg:
            return 2;
        case ExprKind::Pow:
            return 4;
        case ExprKind::Const: {
            const RatC& c = e->value;
            if (c.im == 0) return c.re < 0 ? 2 : 5;
            if (c.re == 0) return (c.im == 1) ? 5 : 2;
            return 1;
        }
        default:
            return 5;
    }
}

inline void print_to(const Expr& e, int min_prec, std::string& out) {
    bool parens = print_prec(e) < min_prec;
    if (parens) out += '(';
    switch (e->kind) {
        case ExprKind::Const: {
            const RatC& c = e->value;
            if (c.im == 0) {
                if (c.re < 0) out += '-';
                out += rat_print(abs(c.re));
            } else if (c.re == 0) {
                if (c.im == 1) {
                    out += 'i';
                } else {
                    if (c.im < 0) out += '-';
                    out += rat_print(abs(c.im));
                    out += "*i";
                }
            } else {
                if (c.re < 0) out += '-';
                out += rat_print(abs(c.re));
                out += (c.im < 0) ? '-' : '+';
                if (abs(c.im) == 1) {
                    out += 'i';
                } else {
                    out += rat_print(abs(c.im));
                    out += "*i";
                }
            }
            break;
        }
        case ExprKind::Variable:
            out += (e->var == Var::Z) ? "z" : (e->var == Var::ZBar) ? "zbar" : "v";
            break;
        case ExprKind::Neg:
            out += '-';
            print_to(e->a, 3, out);
            break;
        case ExprKind::Add:
            print_to(e->a, 1, out);
            out += '+';
            print_to(e->b, 2, out);
            break;
        case ExprKind::Sub:
            print_to(e->a, 1, out);
            out += '-';
            print_to(e->b, 2, out);
            break;
        case ExprKind::Mul:
            print_to(e->a, 2, out);
            out += '*';
            print_to(e->b, 3, out);
            break;
        case ExprKind::Div:
            print_to(e->a, 2, out);
            out += '/';
            print_to(e->b, 3, out);
            break;
        case ExprKind::Pow:
            print_to(e->a, 5, out);
            out += '^';
            out += std::to_string(e->exponent);
            break;
        default: {
            const char* name = nullptr;
            switch (e->kind) {
                case ExprKind::Exp: name = "exp"; break;
                case ExprKind::Log: name = "log"; break;
                case ExprKind::LogAbs: name = "logabs"; break;
                case ExprKind::Sin: name = "sin"; break;
                case ExprKind::Cos: name = "cos"; break;
                case ExprKind::Tan: name = "tan"; break;
                case ExprKind::Re: name = "re"; break;
                case ExprKind::Im: name = "im"; break;
                case ExprKind::Conj: name = "conj"; break;
                case ExprKind::Abs2: name = "abs2"; break;
                default: throw Error("print: unhandled node");
            }
            out += name;
            out += '(';
            print_to(e->a, 0, out);
            out += ')';
            break;
        }
    }
    if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::print_to(e, 0, out);
    return out;
}

// ---------------------------------------------------------------------------
// Numeric evaluation. zbar is bound to conj(z); v is real.
// ---------------------------------------------------------------------------

inline Complex pow_complex(Complex base, int n) {
    if (n < 0) return Complex(1.0, 0.0) / pow_complex(base, -n);
    Complex acc(1.0, 0.0);
    for (int k = 0; k < n; ++k) acc *= base;
    return acc;
}

inline Complex eval(const Expr& e, Complex z, double v) {
    switch (e->kind) {
        case ExprKind::Const:
            return e->value.to_complex();
        case ExprKind::Variable:
            switch (e->var) {
                case Var::Z: return z;
                case Var::ZBar: return std::conj(z);
                case Var::V: return Complex(v, 0.0);
            }
            break;
        case ExprKind::Neg:
            return -eval(e->a, z, v);
        case ExprKind::Add:
            return eval(e->a, z, v) + eval(e->b, z, v);
        case ExprKind::Sub:
            return eval(e->a, z, v) - eval(e->b, z, v);
        case ExprKind::Mul:
            return eval(e->a, z, v) * eval(e->b, z, v);
        case ExprKind::Div: {
            Complex den = eval(e->b, z, v);
            if (den == Complex(0.0, 0.0)) throw EvalSingularity(e, z, v);
            return eval(e->a, z, v) / den;
        }
        case ExprKind::Pow: {
            Complex base = eval(e->a, z, v);
            if (e->exponent < 0 && base == Complex(0.0, 0.0)) throw EvalSingularity(e, z, v);
            return pow_complex(base, e->exponent);
        }
        case ExprKind::Exp:
            return std::exp(eval(e->a, z, v));
        case ExprKind::Sin:
            return std::sin(eval(e->a, z, v));
        case ExprKind::Cos:
            return std::cos(eval(e->a, z, v));
        case ExprKind::Tan: {
            Complex u = eval(e->a, z, v);
            Complex c = std::cos(u);
            if (c == Complex(0.0, 0.0)) throw EvalSingularity(e, z, v);
            return std::sin(u) / c;
        }
        case ExprKind::Log: {
            Complex u = eval(e->a, z, v);
            if (u == Complex(0.0, 0.0)) throw EvalSingularity(e, z, v);
            return std::log(u);
        }
        case ExprKind::LogAbs: {
            Complex u = eval(e->a, z, v);
            if (u == Complex(0.0, 0.0)) throw EvalSingularity(e, z, v);
            return Complex(std::log(std::abs(u)), 0.0);
        }
        case ExprKind::Re:
            return Complex(eval(e->a, z, v).real(), 0.0);
        case ExprKind::Im:
            return Complex(eval(e->a, z, v).imag(), 0.0);
        case ExprKind::Conj:
            return std::conj(eval(e->a, z, v));
        case ExprKind::Abs2: {
            Complex u = eval(e->a, z, v);
            return Complex(u.real() * u.real() + u.imag() * u.imag(), 0.0);
        }
    }
    throw Error("eval: unhandled node");
}

// Magnitude evaluation in log scale. Products, quotients, powers, and exp
// nodes are tracked structurally so flat functions like exp(-1/|z|^2) keep a
// finite log-magnitude long after the plain value underflows. Returns -inf
// for a genuine zero value.
inline double logabs_eval(const Expr& e, Complex z, double v) {
    switch (e->kind) {
        case ExprKind::Exp:
            return eval(e->a, z, v).real();
        case ExprKind::Neg:
        case ExprKind::Conj:
            return logabs_eval(e->a, z, v);
        case ExprKind::Mul:
            return logabs_eval(e->a, z, v) + logabs_eval(e->b, z, v);
        case ExprKind::Div: {
            double den = logabs_eval(e->b, z, v);
            if (den == -std::numeric_limits<double>::infinity()) throw EvalSingularity(e, z, v);
            return logabs_eval(e->a, z, v) - den;
        }
        case ExprKind::Pow: {
            double base = logabs_eval(e->a, z, v);
            if (e->exponent < 0 && base == -std::numeric_limits<double>::infinity())
                throw EvalSingularity(e, z, v);
            return e->exponent * base;
        }
        case ExprKind::Abs2: {
            Complex u = eval(e->a, z, v);
            double m = std::abs(u);
            return m == 0.0 ? -std::numeric_limits<double>::infinity() : 2.0 * std::log(m);
        }
        default: {
            double m = std::abs(eval(e, z, v));
            return m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(m);
        }
    }
}

inline bool structurally_real(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Const:
            return e->value.im == 0;
        case ExprKind::Variable:
            return e->var == Var::V;
        case ExprKind::Re:
        case ExprKind::Im:
        case ExprKind::Abs2:
        case ExprKind::LogAbs:
            return true;
        case ExprKind::Neg:
        case ExprKind::Conj:
        case ExprKind::Pow:
        case ExprKind::Exp:
        case ExprKind::Log:
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Tan:
            return structurally_real(e->a);
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div:
            return structurally_real(e->a) && structurally_real(e->b);
    }
    return false;
}

// ---------------------------------------------------------------------------
// A function split at z = 0: the paper's flat defining functions are given by
// a closed form away from the origin together with a declared value there.
// ---------------------------------------------------------------------------

struct PiecewiseAtZero {
    Expr body;
    Rat origin_value{0};

    Complex eval_at(Complex z, double v) const {
        if (z == Complex(0.0, 0.0)) return Complex(to_double(origin_value), 0.0);
        return eval(body, z, v);
    }

    double logabs_at(Complex z, double v) const {
        if (z == Complex(0.0, 0.0)) {
            double m = std::abs(to_double(origin_value));
            return m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(m);
        }
        return logabs_eval(body, z, v);
    }

    // Numeric consistency of the declared origin value with the body limit
    // along radii r = 2^-k, k = 4..20.
    bool consistent(double tol = 1e-8, int angles = 8) const {
        double worst = 0.0;
        for (int k = 18; k <= 20; ++k) {
            double r = std::ldexp(1.0, -k);
            for (int a = 0; a < angles; ++a) {
                double th = 2.0 * 3.14159265358979323846 * a / angles;
                Complex zz = std::polar(r, th);
                Complex val;
                try {
                    val = eval(body, zz, 0.0);
                } catch (const EvalSingularity&) {
                    return false;
                }
                worst = std::max(worst, std::abs(val - Complex(to_double(origin_value), 0.0)));
            }
        }
        return worst <= tol;
    }
};

}  // namespace crgerm

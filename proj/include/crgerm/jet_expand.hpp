#pragma once

// Exact Taylor expansion of DSL expressions at the origin.
//
// Expansion succeeds for compositions of polynomials in z, zbar, v with
// elementary functions applied to subtrees that vanish at 0 (log and logabs
// need value 1 there). Anything else, in particular flat functions like
// exp(-1/abs2(z)), raises NotJetExpandable with the offending subtree — the
// signal that a germ must be handled numerically.

#include "crgerm/expr.hpp"
#include "crgerm/jet.hpp"

#include <functional>
#include <vector>

namespace crgerm {

struct NotJetExpandable : Error {
    Expr subtree;
    NotJetExpandable(Expr sub, const std::string& why)
        : Error("not jet-expandable: " + why + " in '" + to_string(sub) + "'"),
          subtree(std::move(sub)) {}
};

namespace detail {

// sum_k c(k) u^k for a series argument u with zero constant term.
inline Jet apply_series(const std::function<Rat(int)>& c, const Jet& u) {
    Jet acc = Jet::constant(u.cutoff(), RatC(c(0)));
    Jet pw = Jet::constant(u.cutoff(), RatC(1));
    for (int k = 1; k <= u.cutoff(); ++k) {
        pw = pw * u;
        if (pw.is_zero()) break;
        Rat ck = c(k);
        if (ck != 0) acc = acc + pw * RatC(ck);
    }
    return acc;
}

inline Rat series_exp(int k) { return Rat(1, factorial(k)); }
inline Rat series_sin(int k) {
    if (k % 2 == 0) return 0;
    Rat r(1, factorial(k));
    return (k % 4 == 1) ? r : -r;
}
inline Rat series_cos(int k) {
    if (k % 2 == 1) return 0;
    Rat r(1, factorial(k));
    return (k % 4 == 0) ? r : -r;
}
inline Rat series_log1p(int k) {
    if (k == 0) return 0;
    Rat r(1, k);
    return (k % 2 == 1) ? r : -r;
}

}  // namespace detail

inline Jet jet_of_expr(const Expr& e, int cutoff) {
    const auto rec = [&](const Expr& u) { return jet_of_expr(u, cutoff); };
    switch (e->kind) {
        case ExprKind::Const:
            return Jet::constant(cutoff, e->value);
        case ExprKind::Variable:
            switch (e->var) {
                case Var::Z: return Jet::variable(JVar::Z, cutoff);
                case Var::ZBar: return Jet::variable(JVar::ZBar, cutoff);
                case Var::V: return Jet::variable(JVar::V, cutoff);
            }
            break;
        case ExprKind::Neg:
            return -rec(e->a);
        case ExprKind::Add:
            return rec(e->a) + rec(e->b);
        case ExprKind::Sub:
            return rec(e->a) - rec(e->b);
        case ExprKind::Mul:
            return rec(e->a) * rec(e->b);
        case ExprKind::Div: {
            Jet den = rec(e->b);
            if (den.constant_term().is_zero())
                throw NotJetExpandable(e, "denominator vanishes at 0");
            return rec(e->a) * invert(den);
        }
        case ExprKind::Pow: {
            Jet base = rec(e->a);
            if (e->exponent >= 0) return jet_pow(base, e->exponent);
            if (base.constant_term().is_zero())
                throw NotJetExpandable(e, "negative power of a series vanishing at 0");
            return jet_pow(invert(base), -e->exponent);
        }
        case ExprKind::Exp: {
            Jet u = rec(e->a);
            if (!u.constant_term().is_zero())
                throw NotJetExpandable(e, "exp argument has nonzero value at 0");
            return detail::apply_series(detail::series_exp, u);
        }
        case ExprKind::Sin: {
            Jet u = rec(e->a);
            if (!u.constant_term().is_zero())
                throw NotJetExpandable(e, "sin argument has nonzero value at 0");
            return detail::apply_series(detail::series_sin, u);
        }
        case ExprKind::Cos: {
            Jet u = rec(e->a);
            if (!u.constant_term().is_zero())
                throw NotJetExpandable(e, "cos argument has nonzero value at 0");
            return detail::apply_series(detail::series_cos, u);
        }
        case ExprKind::Tan: {
            Jet u = rec(e->a);
            if (!u.constant_term().is_zero())
                throw NotJetExpandable(e, "tan argument has nonzero value at 0");
            Jet s = detail::apply_series(detail::series_sin, u);
            Jet c = detail::apply_series(detail::series_cos, u);
            return s * invert(c);
        }
        case ExprKind::Log: {
            Jet u = rec(e->a);
            if (u.constant_term() != RatC(1))
                throw NotJetExpandable(e, "log argument must have value 1 at 0");
            return detail::apply_series(detail::series_log1p,
                                        u - Jet::constant(cutoff, RatC(1)));
        }
        case ExprKind::LogAbs: {
            Jet u = rec(e->a);
            if (u.constant_term() != RatC(1))
                throw NotJetExpandable(e, "logabs argument must have value 1 at 0");
            Jet lg = detail::apply_series(detail::series_log1p,
                                          u - Jet::constant(cutoff, RatC(1)));
            return real_part(lg);
        }
        case ExprKind::Re:
            return real_part(rec(e->a));
        case ExprKind::Im:
            return imag_part(rec(e->a));
        case ExprKind::Conj:
            return rec(e->a).conj();
        case ExprKind::Abs2: {
            Jet u = rec(e->a);
            return u * u.conj();
        }
    }
    throw Error("jet_of_expr: unhandled node");
}

}  // namespace crgerm

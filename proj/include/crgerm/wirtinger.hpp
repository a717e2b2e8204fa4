#pragma once

// Exact symbolic Wirtinger differentiation of DSL expressions.
//
// Rules: d z / d z = 1, d zbar / d z = 0, d v / d z = 0 (and symmetrically);
// conjugation swaps the z and zbar derivatives, so for any node
//   d/dz  conj(u) = conj(d/dzbar u),
//   re(u) -> (du + conj(du_dual))/2,   abs2(u) -> du*conj(u) + u*conj(du_dual),
// with the usual chain rule for the elementary functions.

#include "crgerm/expr.hpp"

namespace crgerm {

enum class Deriv { Dz, Dzbar, Dv };

inline Deriv conj_dual(Deriv d) {
    switch (d) {
        case Deriv::Dz: return Deriv::Dzbar;
        case Deriv::Dzbar: return Deriv::Dz;
        case Deriv::Dv: return Deriv::Dv;
    }
    return d;
}

inline Expr wirtinger(const Expr& e, Deriv which) {
    const auto rec = [&](const Expr& u) { return wirtinger(u, which); };
    const auto rec_dual = [&](const Expr& u) { return wirtinger(u, conj_dual(which)); };

    switch (e->kind) {
        case ExprKind::Const:
            return constant(0);
        case ExprKind::Variable: {
            bool hit = (e->var == Var::Z && which == Deriv::Dz) ||
                       (e->var == Var::ZBar && which == Deriv::Dzbar) ||
                       (e->var == Var::V && which == Deriv::Dv);
            return constant(hit ? 1 : 0);
        }
        case ExprKind::Neg:
            return neg(rec(e->a));
        case ExprKind::Add:
            return add(rec(e->a), rec(e->b));
        case ExprKind::Sub:
            return sub(rec(e->a), rec(e->b));
        case ExprKind::Mul:
            return add(mul(rec(e->a), e->b), mul(e->a, rec(e->b)));
        case ExprKind::Div:
            return div(sub(mul(rec(e->a), e->b), mul(e->a, rec(e->b))), pow_int(e->b, 2));
        case ExprKind::Pow:
            return mul(mul(constant(e->exponent), pow_int(e->a, e->exponent - 1)), rec(e->a));
        case ExprKind::Exp:
            return mul(apply_func(ExprKind::Exp, e->a), rec(e->a));
        case ExprKind::Log:
            return div(rec(e->a), e->a);
        case ExprKind::LogAbs: {
            // log|u| = (1/2) log(u conj(u))
            Expr du = rec(e->a);
            Expr du_bar = conj_expr(rec_dual(e->a));
            Expr num = add(mul(du, conj_expr(e->a)), mul(e->a, du_bar));
            return div(num, mul(constant(2), apply_func(ExprKind::Abs2, e->a)));
        }
        case ExprKind::Sin:
            return mul(apply_func(ExprKind::Cos, e->a), rec(e->a));
        case ExprKind::Cos:
            return neg(mul(apply_func(ExprKind::Sin, e->a), rec(e->a)));
        case ExprKind::Tan:
            return div(rec(e->a), pow_int(apply_func(ExprKind::Cos, e->a), 2));
        case ExprKind::Re:
            return mul(constant(RatC(Rat(1, 2))), add(rec(e->a), conj_expr(rec_dual(e->a))));
        case ExprKind::Im:
            // (u - conj u)/(2i); 1/(2i) = -i/2
            return mul(constant(RatC(Rat(0), Rat(-1, 2))),
                       sub(rec(e->a), conj_expr(rec_dual(e->a))));
        case ExprKind::Conj:
            return conj_expr(rec_dual(e->a));
        case ExprKind::Abs2:
            return add(mul(rec(e->a), conj_expr(e->a)), mul(e->a, conj_expr(rec_dual(e->a))));
    }
    throw Error("wirtinger: unhandled node");
}

}  // namespace crgerm

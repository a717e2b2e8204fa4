#pragma once

// Jet-level construction of the infinite-type germ built from the summands
//   f_n(z) = (1 / (n^n lambda_n^n)) Re g_n(lambda_n z),
//   g_n(t) = 1/(t^n - a_n) + 1/a_n,  a_n = 2/n^n,
// together with the probing curves
//   phi_N(t) = (-sum_{n=2}^N (1/(n^n lambda_n^n)) g_n(lambda_n t), t).
//
// The scaling parameters lambda_n only matter for smooth convergence of the
// full sum, which has no jet-level content; they default to 1 and are kept
// rational so everything stays exact.

#include "crgerm/type_analysis.hpp"

#include <map>
#include <vector>

namespace crgerm {

struct CounterexampleSpec {
    int n_max = 9;             // largest summand index
    int cutoff = 12;           // jet cutoff
    std::vector<Rat> lambdas;  // lambda_2..lambda_{n_max}; empty means all 1
};

struct CounterexampleBuild {
    CounterexampleSpec spec;
    std::vector<Jet> g_jets;             // g_n, univariate in t (index n-2)
    std::vector<Jet> f_jets;             // f_n, in (z, zbar) (index n-2)
    Jet p_jet;                           // sum of the f_n
    Jet q_jet;                           // identically zero
    std::vector<HoloCurve> curves;       // phi_N for N = 2..n_max-1 (index N-2)
    std::map<int, std::vector<RatC>> deriv_table;  // n -> d^k f_n / dz^k (0), k = 0..cutoff
};

inline CounterexampleBuild build_counterexample(const CounterexampleSpec& spec) {
    if (spec.n_max < 2 || spec.n_max > 10)
        throw Error("counterexample: n_max must lie in [2, 10]");
    if (!spec.lambdas.empty() &&
        static_cast<int>(spec.lambdas.size()) != spec.n_max - 1)
        throw Error("counterexample: need one lambda per summand n = 2..n_max");

    const auto lambda = [&](int n) -> Rat {
        if (spec.lambdas.empty()) return Rat(1);
        Rat l = spec.lambdas[n - 2];
        if (l < 1) throw Error("counterexample: lambda_n must be >= 1");
        return l;
    };

    const int N = spec.cutoff;
    CounterexampleBuild out;
    out.spec = spec;
    out.p_jet = Jet(N);
    out.q_jet = Jet(N, 1u << static_cast<int>(JVar::V));

    Jet phi_z1(N);
    for (int n = 2; n <= spec.n_max; ++n) {
        Rat a_n = Rat(2) / rat_pow(Rat(n), n);

        // g_n = 1/(t^n - a_n) + 1/a_n, built by series inversion
        Jet base = Jet::monomial({0, 0, 0, n}, RatC(1), N) - Jet::constant(N, RatC(a_n));
        Jet g = invert(base) + Jet::constant(N, RatC(Rat(1) / a_n));
        out.g_jets.push_back(g);

        Rat l = lambda(n);
        RatC scale(Rat(1) / (rat_pow(Rat(n), n) * rat_pow(l, n)));

        // f_n(z) = scale * Re g_n(lambda z)
        Jet g_lz = compose(g, Jet::variable(JVar::Z, N) * RatC(l));
        Jet f = real_part(g_lz) * scale;
        out.f_jets.push_back(f);
        out.p_jet = out.p_jet + f;

        std::vector<RatC> derivs;
        for (int k = 0; k <= N; ++k)
            derivs.push_back(f.coeff({k, 0, 0, 0}) * RatC(Rat(factorial(k))));
        out.deriv_table[n] = std::move(derivs);

        // phi_N accumulates -scale * g_n(lambda t); record the curve once the
        // first N summands are in place
        phi_z1 = phi_z1 - compose(g, Jet::variable(JVar::T, N) * RatC(l)) * scale;
        if (n < spec.n_max)
            out.curves.push_back(HoloCurve::make(phi_z1, Jet::variable(JVar::T, N)));
    }
    return out;
}

}  // namespace crgerm

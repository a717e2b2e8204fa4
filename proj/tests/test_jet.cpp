#include "crgerm/jet.hpp"

#include <doctest.h>

#include "crgerm/expr.hpp"
#include "crgerm/jet_expand.hpp"
#include "helpers.hpp"

using namespace crgerm;
using testutil::Sampler;

namespace {

Jet tpow(int n, int cutoff) { return Jet::monomial({0, 0, 0, n}, RatC(1), cutoff); }

// random sparse jet over the given variable slots
Jet random_jet(Sampler& rng, int cutoff, std::initializer_list<JVar> vars, int max_terms = 4) {
    Jet j(cutoff);
    int terms = rng.integer(0, max_terms);
    for (int t = 0; t < terms; ++t) {
        ExpKey key{0, 0, 0, 0};
        int budget = cutoff;
        for (JVar v : vars) {
            int e = rng.integer(0, budget);
            key[static_cast<int>(v)] = e;
            budget -= e;
        }
        RatC c(Rat(rng.integer(-9, 9), rng.integer(1, 9)), Rat(rng.integer(-9, 9), rng.integer(1, 9)));
        j.accumulate(key, c);
    }
    return j;
}

}  // namespace

TEST_CASE("ring operations") {
    int N = 8;
    CHECK(tpow(2, N) * tpow(3, N) == tpow(5, N));

    Jet z = Jet::variable(JVar::Z, N), zb = Jet::variable(JVar::ZBar, N);
    Jet prod = (z + zb) * (z - zb);
    Jet expected = Jet::monomial({2, 0, 0, 0}, RatC(1), N) + Jet::monomial({0, 2, 0, 0}, RatC(-1), N);
    CHECK(prod == expected);

    // common cutoff is the minimum
    Jet a = tpow(2, 10), b = tpow(1, 4);
    CHECK((a * b).cutoff() == 4);
    CHECK((a + b).cutoff() == 4);
    CHECK_THROWS_AS(require_same_cutoff(a, b), CutoffMismatch);

    // scalar multiplication
    CHECK((z * RatC(Rat(2, 3))).coeff({1, 0, 0, 0}) == RatC(Rat(2, 3)));
}

TEST_CASE("invert") {
    int N = 8;
    SUBCASE("geometric series") {
        Jet one_minus_t = Jet::constant(N, RatC(1)) - tpow(1, N);
        Jet inv = invert(one_minus_t);
        for (int k = 0; k <= N; ++k) CHECK(inv.coeff({0, 0, 0, k}) == RatC(1));
        CHECK(inv * one_minus_t == Jet::constant(N, RatC(1)));
    }
    SUBCASE("pole-shifted series") {
        // 1/(t^2 - 1/2) = -2 - 4 t^2 - 8 t^4 - 16 t^6 - ...
        Jet base = tpow(2, N) - Jet::constant(N, RatC(Rat(1, 2)));
        Jet inv = invert(base);
        CHECK(inv.coeff({0, 0, 0, 0}) == RatC(-2));
        CHECK(inv.coeff({0, 0, 0, 2}) == RatC(-4));
        CHECK(inv.coeff({0, 0, 0, 4}) == RatC(-8));
        CHECK(inv.coeff({0, 0, 0, 6}) == RatC(-16));
        CHECK(inv.coeff({0, 0, 0, 3}) == RatC(0));
        CHECK(inv * base == Jet::constant(N, RatC(1)));
    }
    SUBCASE("zero constant term is rejected") {
        CHECK_THROWS_AS(invert(tpow(1, N)), NotInvertible);
    }
}

TEST_CASE("compose") {
    int N = 6;
    SUBCASE("hand expansion") {
        Jet outer = tpow(2, N);
        Jet inner = tpow(1, N) + tpow(2, N);
        Jet got = compose(outer, inner);
        Jet want = tpow(2, N) + RatC(2) * tpow(3, N) + tpow(4, N);
        CHECK(got == want);
    }
    SUBCASE("identity outer") {
        Sampler rng(7);
        Jet inner = random_jet(rng, N, {JVar::Z, JVar::ZBar});
        Jet id = tpow(1, N);
        Jet inner0 = inner - Jet::constant(N, inner.constant_term());
        CHECK(compose(id, inner0) == inner0);
    }
    SUBCASE("unit scaling of a univariate series") {
        Jet g = RatC(-4) * tpow(2, N) + RatC(-8) * tpow(4, N);
        CHECK(compose(g, tpow(1, N)) == g);
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(compose(tpow(2, N), Jet::constant(N, RatC(1)) + tpow(1, N)),
                        NonzeroConstantTerm);
        Jet not_univar = Jet::variable(JVar::Z, N);
        CHECK_THROWS_AS(compose(not_univar, tpow(1, N)), std::domain_error);
        CHECK_THROWS_AS(compose(tpow(2, 4), tpow(1, 8)), CutoffMismatch);
    }
}

TEST_CASE("vanishing order") {
    CHECK(vanishing_order(Jet(8)) == VanishingOrder{false, 9});
    Jet g2 = RatC(-4) * tpow(2, 8) + RatC(-8) * tpow(4, 8);
    CHECK(vanishing_order(g2) == VanishingOrder{true, 2});
    Jet x = tpow(3, 8) + RatC(2) * tpow(5, 8);
    CHECK(vanishing_order(x) == VanishingOrder{true, 3});
}

TEST_CASE("real part") {
    int N = 6;
    SUBCASE("definition") {
        Jet x = Jet::monomial({2, 0, 0, 0}, RatC::unit_i(), N);  // i z^2
        Jet rp = real_part(x);
        CHECK(rp.coeff({2, 0, 0, 0}) == RatC(Rat(0), Rat(1, 2)));
        CHECK(rp.coeff({0, 2, 0, 0}) == RatC(Rat(0), Rat(-1, 2)));
        CHECK(rp.is_real());
    }
    SUBCASE("idempotent on real jets") {
        Jet x = Jet::monomial({1, 1, 0, 0}, RatC(3), N) + Jet::monomial({0, 0, 2, 0}, RatC(Rat(1, 2)), N);
        REQUIRE(x.is_real());
        CHECK(real_part(x) == x);
    }
    SUBCASE("mixed coefficient") {
        Jet x = Jet::monomial({1, 0, 1, 0}, RatC(1, 1), N);  // (1+i) z v
        Jet rp = real_part(x);
        CHECK(rp.coeff({1, 0, 1, 0}) == RatC(Rat(1, 2), Rat(1, 2)));
        CHECK(rp.coeff({0, 1, 1, 0}) == RatC(Rat(1, 2), Rat(-1, 2)));
    }
}

TEST_CASE("jet derivatives") {
    int N = 6;
    Jet z2zb2 = Jet::monomial({2, 2, 0, 0}, RatC(1), N);
    Jet d = wirtinger_jet(z2zb2, JVar::Z);
    CHECK(d == Jet::monomial({1, 2, 0, 0}, RatC(2), N - 1));

    Jet z3 = Jet::monomial({3, 0, 0, 0}, RatC(1), N);
    CHECK(wirtinger_jet(z3, JVar::ZBar).is_zero());

    Jet re_z3 = real_part(z3);
    CHECK(wirtinger_jet(re_z3, JVar::Z) == Jet::monomial({2, 0, 0, 0}, RatC(Rat(3, 2)), N - 1));
}

TEST_CASE("jet_of_expr") {
    SUBCASE("tan composes through its Taylor series") {
        Jet got = jet_of_expr(parse("tan(im(z)^2)"), 6);
        // oracle: build im(z)^2 + im(z)^6/3 from jet primitives
        Jet im_z = imag_part(Jet::variable(JVar::Z, 6));
        Jet u = im_z * im_z;
        Jet want = u + u * u * u * RatC(Rat(1, 3));
        CHECK(got == want);
    }
    SUBCASE("polynomials expand exactly") {
        CHECK(jet_of_expr(parse("abs2(z)^2"), 8) == Jet::monomial({2, 2, 0, 0}, RatC(1), 8));
    }
    SUBCASE("flat functions are rejected with the offending subtree") {
        try {
            jet_of_expr(parse("exp(-1/abs2(z))"), 8);
            FAIL("expected NotJetExpandable");
        } catch (const NotJetExpandable& err) {
            CHECK(err.subtree->kind == ExprKind::Div);
        }
    }
    SUBCASE("log needs value 1 at the origin") {
        CHECK_NOTHROW(jet_of_expr(parse("log(1+z*zbar)"), 6));
        CHECK_THROWS_AS(jet_of_expr(parse("log(z)"), 6), NotJetExpandable);
        CHECK_THROWS_AS(jet_of_expr(parse("log(2+z)"), 6), NotJetExpandable);
        Jet lg = jet_of_expr(parse("logabs(cos(im(z)^2))"), 8);
        CHECK(lg.is_real());
    }
    SUBCASE("negative powers invert when possible") {
        Jet got = jet_of_expr(parse("(1-z)^-1"), 5);
        for (int k = 0; k <= 5; ++k) CHECK(got.coeff({k, 0, 0, 0}) == RatC(1));
        CHECK_THROWS_AS(jet_of_expr(parse("z^-2"), 5), NotJetExpandable);
    }
}

TEST_CASE("algebraic properties on random jets") {
    Sampler rng(99173);

    SUBCASE("ring axioms") {
        for (int iter = 0; iter < 1000; ++iter) {
            int cutoff = rng.integer(2, 8);
            Jet a = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar, JVar::V});
            Jet b = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar, JVar::V});
            Jet c = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar, JVar::V});
            CHECK((a + b) + c == a + (b + c));
            CHECK(a + b == b + a);
            CHECK((a * b) * c == a * (b * c));
            CHECK(a * b == b * a);
            CHECK(a * (b + c) == a * b + a * c);
            CHECK(a + Jet(cutoff) == a);
            CHECK(a * Jet::constant(cutoff, RatC(1)) == a);
        }
    }

    SUBCASE("vanishing order is additive under multiplication") {
        int checked = 0;
        for (int iter = 0; iter < 2000 && checked < 300; ++iter) {
            int cutoff = rng.integer(3, 8);
            Jet a = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar});
            Jet b = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar});
            VanishingOrder va = vanishing_order(a), vb = vanishing_order(b);
            if (!va.finite || !vb.finite || va.value + vb.value > cutoff) continue;
            CHECK(vanishing_order(a * b) == VanishingOrder{true, va.value + vb.value});
            ++checked;
        }
        CHECK(checked >= 300);
    }

    SUBCASE("compose is associative") {
        for (int iter = 0; iter < 200; ++iter) {
            int cutoff = rng.integer(3, 7);
            Jet f = random_jet(rng, cutoff, {JVar::T});
            Jet g = random_jet(rng, cutoff, {JVar::T});
            g.set({0, 0, 0, 0}, RatC(0));
            Jet h = random_jet(rng, cutoff, {JVar::Z, JVar::V});
            h.set({0, 0, 0, 0}, RatC(0));
            CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
        }
    }

    SUBCASE("real_part is idempotent and conj is an involution") {
        for (int iter = 0; iter < 300; ++iter) {
            int cutoff = rng.integer(2, 8);
            Jet a = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar, JVar::V});
            CHECK(real_part(real_part(a)) == real_part(a));
            CHECK(real_part(a).is_real());
            CHECK(a.conj().conj() == a);
        }
    }

    SUBCASE("invert is a true inverse") {
        for (int iter = 0; iter < 1000; ++iter) {
            int cutoff = rng.integer(2, 8);
            Jet a = random_jet(rng, cutoff, {JVar::Z, JVar::ZBar});
            if (a.constant_term().is_zero())
                a = a + Jet::constant(cutoff, RatC(Rat(rng.integer(1, 5)), Rat(rng.integer(-3, 3))));
            CHECK(a * invert(a) == Jet::constant(cutoff, RatC(1)));
        }
    }
}

#include "crgerm/tangency.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace crgerm;
using testutil::Sampler;

namespace {

Germ flat_radial_germ() {
    GermOptions opts;
    opts.p_origin_value = Rat(0);
    opts.name = "flat-radial";
    return Germ::make(parse("exp(-1/abs2(z))"), parse("0"), opts);
}

Germ tan_example_germ() {
    GermOptions opts;
    opts.p_origin_value = Rat(0);
    opts.name = "tan-example";
    return Germ::make(parse("exp(-1/abs2(z)+im(z^2)/2-logabs(cos(im(z)^2)))"),
                      parse("tan(im(z)^2)"), opts);
}

VectorField field_sum(const VectorField& A, const VectorField& B) {
    PolyMap h1 = A.h1, h2 = B.h2;
    for (const auto& [jk, c] : B.h1) {
        RatC v = (h1.count(jk) ? h1[jk] : RatC(0)) + c;
        if (v.is_zero()) h1.erase(jk); else h1[jk] = v;
    }
    PolyMap h2a = A.h2;
    for (const auto& [jk, c] : h2) {
        RatC v = (h2a.count(jk) ? h2a[jk] : RatC(0)) + c;
        if (v.is_zero()) h2a.erase(jk); else h2a[jk] = v;
    }
    return VectorField::make(std::move(h1), std::move(h2a));
}

Complex eval_jet(const Jet& j, Complex z, double v) {
    Complex acc(0, 0);
    for (const auto& [key, c] : j.terms()) {
        Complex term = c.to_complex();
        term *= pow_complex(z, key[0]);
        term *= pow_complex(std::conj(z), key[1]);
        term *= pow_complex(Complex(v, 0.0), key[2]);
        acc += term;
    }
    return acc;
}

std::vector<double> linspace_radii(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

}  // namespace

TEST_CASE("vector field parsing and evaluation") {
    VectorField H = parse_field("z1*z2^2 ; i*z2");
    REQUIRE(H.h1.size() == 1);
    CHECK(H.h1.at({1, 2}) == RatC(1));
    CHECK(H.h2.at({0, 1}) == RatC::unit_i());
    CHECK(H.degree() == 3);

    Complex z1(0.2, -0.3), z2(0.5, 0.1);
    CHECK(std::abs(eval_poly(H.h1, z1, z2) - z1 * z2 * z2) < 1e-16);

    // combined coefficients
    VectorField G = parse_field("z1 + (1/2)*z2 - z1 ; (2-3*i)*z1*z2");
    CHECK(G.h1.at({0, 1}) == RatC(Rat(1, 2)));
    CHECK(G.h1.count({1, 0}) == 0);
    CHECK(G.h2.at({1, 1}) == RatC(2, -3));

    CHECK_NOTHROW(parse_field("0 ; i*z2"));
    CHECK_THROWS_AS(parse_field("1 + z1 ; 0"), Error);   // constant term forbidden
    CHECK_THROWS_AS(parse_field("z1"), SyntaxError);     // missing component
    CHECK_THROWS_AS(parse_field("z ; z2"), UnknownIdentifier);
    CHECK_THROWS_AS(parse_field("z1/z2 ; 0"), SyntaxError);
}

TEST_CASE("residual_numeric") {
    SUBCASE("the tangent field of the tan-example germ") {
        Germ g = tan_example_germ();
        VectorField H = parse_field("z1*z2^2 ; i*z2");
        auto sample = g.sample_surface(linspace_radii(0.05, 0.5, 12), 16, {-0.1, -0.03, 0.0, 0.05, 0.1});
        TangencyReport rep = residual_numeric(g, H, sample.points);
        CHECK(rep.samples == sample.points.size());
        CHECK(rep.max_abs_residual <= 1e-12);
    }
    SUBCASE("rotation field on the radial flat germ") {
        Germ g = flat_radial_germ();
        auto sample = g.sample_surface({0.1, 0.25, 0.4, 0.5}, 16, {-0.1, 0.0, 0.1});
        TangencyReport rep = residual_numeric(g, VectorField::rotation(), sample.points);
        CHECK(rep.max_abs_residual <= 1e-15);
    }
    SUBCASE("non-tangent field has the closed-form residual") {
        Germ g = flat_radial_germ();
        // z2 d/dz2 at z2 = 0.5, v = 0: Re(z P'(z)) = exp(-4)/0.25
        std::vector<SurfacePoint> pts{{Complex(-std::exp(-4.0), 0.0), Complex(0.5, 0.0), 0.0}};
        TangencyReport rep = residual_numeric(g, parse_field("0 ; z2"), pts);
        CHECK(std::abs(rep.max_abs_residual - 0.073262555554936721) <= 1e-15);
    }
    SUBCASE("linearity in the field") {
        Germ g = tan_example_germ();
        VectorField A = parse_field("z1*z2 ; z2^2");
        VectorField B = parse_field("z2 ; i*z1");
        auto sample = g.sample_surface({0.2, 0.4}, 8, {0.0, 0.05});
        TangencyReport ra = residual_numeric(g, A, sample.points);
        TangencyReport rb = residual_numeric(g, B, sample.points);
        TangencyReport rab = residual_numeric(g, field_sum(A, B), sample.points);
        for (std::size_t i = 0; i < sample.points.size(); ++i) {
            const SurfacePoint& pt = sample.points[i];
            auto [g1, g2] = g.rho_gradients(pt.z1, pt.z2);
            double sa = (g1 * eval_poly(A.h1, pt.z1, pt.z2) + g2 * eval_poly(A.h2, pt.z1, pt.z2)).real();
            double sb = (g1 * eval_poly(B.h1, pt.z1, pt.z2) + g2 * eval_poly(B.h2, pt.z1, pt.z2)).real();
            double sab = (g1 * eval_poly(field_sum(A, B).h1, pt.z1, pt.z2) +
                          g2 * eval_poly(field_sum(A, B).h2, pt.z1, pt.z2)).real();
            CHECK(std::abs(sab - (sa + sb)) <= 1e-12);
        }
        CHECK(rab.max_abs_residual <= ra.max_abs_residual + rb.max_abs_residual + 1e-12);
    }
    SUBCASE("singular points are skipped and counted") {
        Germ g = Germ::make(parse("abs2(z)^2"), parse("v*im(z^2)/(1-abs2(z))"));
        std::vector<SurfacePoint> pts{{Complex(-1.0, 0.0), Complex(1.0, 0.0), 0.0},
                                      {Complex(-0.0625, 0.0), Complex(0.5, 0.0), 0.0}};
        TangencyReport rep = residual_numeric(g, VectorField::rotation(), pts);
        CHECK(rep.skipped == 1);
        CHECK(rep.samples == 1);
    }
    SUBCASE("the piecewise derivative handles the origin without a singularity") {
        Germ g = flat_radial_germ();
        std::vector<SurfacePoint> pts{{Complex(0.0, 0.0), Complex(0.0, 0.0), 0.0}};
        TangencyReport rep = residual_numeric(g, VectorField::rotation(), pts);
        CHECK(rep.skipped == 0);
        CHECK(rep.max_abs_residual == 0.0);
    }
}

TEST_CASE("residual_jet") {
    SUBCASE("rotation field on |z|^2 gives the zero jet") {
        Jet P = Jet::monomial({1, 1, 0, 0}, RatC(1), 9);
        CHECK(residual_jet(P, Jet(9), VectorField::rotation()).is_zero());
    }
    SUBCASE("the scaling field of |z|^4 is exactly tangent") {
        Jet P = Jet::monomial({2, 2, 0, 0}, RatC(1), 9);
        VectorField H = parse_field("z1 ; (1/4)*z2");
        CHECK(residual_jet(P, Jet(9), H).is_zero());
    }
    SUBCASE("z2 d/dz2 on |z|^4 leaves 2 z^2 zbar^2") {
        Jet P = Jet::monomial({2, 2, 0, 0}, RatC(1), 9);
        Jet r = residual_jet(P, Jet(9), parse_field("0 ; z2"));
        CHECK(r == Jet::monomial({2, 2, 0, 0}, RatC(2), 8));
    }
    SUBCASE("exact linearity") {
        Germ g = Germ::make(parse("abs2(z)^2"), parse("tan(im(z)^2)"));
        VectorField A = parse_field("z1*z2 ; z2^2");
        VectorField B = parse_field("i*z1 ; z2");
        Jet ra = residual_jet(g, A, 8);
        Jet rb = residual_jet(g, B, 8);
        Jet rab = residual_jet(g, field_sum(A, B), 8);
        CHECK(rab == ra + rb);
    }
    SUBCASE("jet residual matches the numeric residual near the origin") {
        Germ g = Germ::make(parse("abs2(z)^2"), parse("tan(im(z)^2)"));
        Sampler rng(6021);
        for (const char* field : {"z1*z2 ; z2^2", "z2 ; i*z2", "z1 ; (1/4)*z2 + z1*z2"}) {
            VectorField H = parse_field(field);
            Jet rj = residual_jet(g, H, 10);
            for (int k = 0; k < 40; ++k) {
                Complex z2 = rng.annulus(0.01, 0.05);
                double v = rng.uniform(-0.02, 0.02);
                double p = eval(g.P().body, z2, v).real();
                double q = eval(g.Q(), z2, v).real();
                SurfacePoint pt{Complex(-(p + v * q), v), z2, v};
                auto [g1, g2] = g.rho_gradients(pt.z1, pt.z2);
                double numeric = (g1 * eval_poly(H.h1, pt.z1, pt.z2) +
                                  g2 * eval_poly(H.h2, pt.z1, pt.z2)).real();
                double from_jet = eval_jet(rj, z2, v).real();
                CHECK(std::abs(numeric - from_jet) <= 1e-10);
            }
        }
    }
}

TEST_CASE("solve_tangent_fields") {
    SUBCASE("|z|^2 germ contains the rotation and scaling fields") {
        Germ g = Germ::make(parse("abs2(z)"), parse("0"));
        FieldSolution sol = solve_tangent_fields(g, 6, 2);
        CHECK(sol.exact);
        CHECK(sol.basis.size() >= 2);
        auto coords = solution_coordinates(sol);
        CHECK(in_span(coords, field_coordinates(VectorField::rotation(), 2)));
        CHECK(in_span(coords, field_coordinates(parse_field("z1 ; (1/2)*z2"), 2)));
        // d/dz1 is not representable: not in the span of any solution
        RatVec ddz1 = field_coordinates(VectorField::rotation(), 2);
        for (auto& x : ddz1) x = 0;
        // (a constant field cannot even be encoded; the unknown layout starts at degree 1)
        for (const auto& [j, k] : detail::field_unknowns(2).monomials) CHECK(j + k >= 1);
    }
    SUBCASE("|z|^4 germ at K = 8") {
        Germ g = Germ::make(parse("abs2(z)^2"), parse("0"));
        FieldSolution sol = solve_tangent_fields(g, 8, 2);
        auto coords = solution_coordinates(sol);
        CHECK(in_span(coords, field_coordinates(VectorField::rotation(), 2)));
        CHECK(in_span(coords, field_coordinates(parse_field("z1 ; (1/4)*z2"), 2)));
        for (const VectorField& H : sol.basis)
            CHECK(residual_jet(g, H, 8).truncated(8).is_zero());
    }
    SUBCASE("the K+2 space is contained in the K space") {
        for (const char* src : {"abs2(z)", "abs2(z)^2", "re(z^2)+abs2(z)^4"}) {
            Germ g = Germ::make(parse(src), parse("0"));
            FieldSolution lo = solve_tangent_fields(g, 6, 2);
            FieldSolution hi = solve_tangent_fields(g, 8, 2);
            auto lo_coords = solution_coordinates(lo);
            CHECK(hi.basis.size() <= lo.basis.size());
            for (const VectorField& H : hi.basis)
                CHECK(in_span(lo_coords, field_coordinates(H, 2)));
        }
    }
    SUBCASE("solver soundness: basis fields are numerically tangent") {
        Sampler rng(31415);
        for (const char* src : {"abs2(z)", "abs2(z)^2"}) {
            Germ g = Germ::make(parse(src), parse("0"));
            FieldSolution sol = solve_tangent_fields(g, 8, 2);
            auto sample = g.sample_surface(linspace_radii(0.02, 0.4, 21), 16, {-0.1, 0.0, 0.1});
            REQUIRE(sample.points.size() >= 1000);
            for (const VectorField& H : sol.basis) {
                TangencyReport rep = residual_numeric(g, H, sample.points);
                CHECK(rep.max_abs_residual <= 1e-10);
            }
        }
    }
    SUBCASE("zero P jet is refused") {
        Germ g = Germ::make(parse("0"), parse("0"));
        CHECK_THROWS_AS(solve_tangent_fields(g, 6, 2), SolverRefusal);
    }
    SUBCASE("germs without jets cannot reach the solver") {
        CHECK_THROWS_AS(solve_tangent_fields(flat_radial_germ(), 6, 2), NotJetExpandable);
    }
    SUBCASE("parameter validation") {
        Germ g = Germ::make(parse("abs2(z)"), parse("0"));
        CHECK_THROWS_AS(solve_tangent_fields(g, 1, 2), Error);
    }
}

TEST_CASE("rotational symmetry") {
    std::vector<double> radii{0.5, 0.3, 0.1};
    SUBCASE("|z|^2 is symmetric with both criteria at zero") {
        SymmetryResult res = rotational_symmetry_check(parse("abs2(z)"), radii, 16, 1e-10);
        CHECK(res.symmetric);
        CHECK(res.max_radial_deviation <= 1e-15);
        CHECK(res.max_rotational_derivative <= 1e-15);
    }
    SUBCASE("the radial flat function is symmetric") {
        SymmetryResult res = rotational_symmetry_check(parse("exp(-1/abs2(z))"), radii, 16, 1e-10);
        CHECK(res.symmetric);
    }
    SUBCASE("im(z^2) is asymmetric with a first-quadrant witness") {
        SymmetryResult res = rotational_symmetry_check(parse("im(z^2)"), radii, 16, 1e-10);
        CHECK_FALSE(res.symmetric);
        CHECK(std::abs(res.witness) > 0.0);
        CHECK(res.max_rotational_derivative > 0.2);  // r^2 cos 2theta peaks at 0.25
    }
}

TEST_CASE("sign change scan") {
    SUBCASE("|z|^2 is identically zero") {
        CHECK(sign_change_scan(parse("abs2(z)"), 0.5, 32).kind == CircleSign::IdenticallyZero);
    }
    SUBCASE("im(z^2) changes sign between theta = 0 and theta = pi/2") {
        SignScanResult res = sign_change_scan(parse("im(z^2)"), 0.5, 32);
        CHECK(res.kind == CircleSign::SignChange);
        CHECK(res.theta_positive == doctest::Approx(0.0));
        CHECK(res.theta_negative == doctest::Approx(testutil::kPi / 2));
    }
    SUBCASE("a rotational part does not mask the sign change") {
        SignScanResult res = sign_change_scan(parse("abs2(z)+im(z^2)/10"), 0.5, 32);
        CHECK(res.kind == CircleSign::SignChange);
    }
    SUBCASE("the dichotomy violation is diagnosable on synthetic samples") {
        std::vector<double> values{0.5, 1.0, 0.75}, thetas{0.0, 1.0, 2.0};
        CHECK(classify_circle_samples(values, thetas, 1.0).kind == CircleSign::ConstantSign);
    }
}

TEST_CASE("classify_tangent_fields") {
    SUBCASE("radial flat germ admits the rotation family") {
        ClassifyResult res = classify_tangent_fields(flat_radial_germ());
        CHECK(res.verdict == Verdict::RotationFamily);
        CHECK(res.beta_family);
        CHECK(res.residual_confirmation <= 1e-14);
    }
    SUBCASE("asymmetric flat germ admits only the zero field") {
        GermOptions opts;
        opts.p_origin_value = Rat(0);
        Germ g = Germ::make(parse("exp(-1/abs2(z)+im(z^2)/2)"), parse("0"), opts);
        ClassifyResult res = classify_tangent_fields(g);
        CHECK(res.verdict == Verdict::OnlyZeroField);
        CHECK(res.asymmetric_function == "P");
        CHECK(std::abs(res.asymmetry_witness) > 0.0);
    }
    SUBCASE("finite type germs violate hypothesis (2)") {
        ClassifyResult res = classify_tangent_fields(Germ::make(parse("abs2(z)^2"), parse("0")));
        CHECK(res.verdict == Verdict::HypothesisViolation);
        REQUIRE(res.violations.size() >= 1);
        bool named = false;
        for (const auto& issue : res.violations)
            named |= issue.name.find("infinite order") != std::string::npos;
        CHECK(named);
    }
    SUBCASE("the tan-example germ violates the Q hypothesis") {
        ClassifyResult res = classify_tangent_fields(tan_example_germ());
        CHECK(res.verdict == Verdict::HypothesisViolation);
        bool named = false;
        for (const auto& issue : res.violations)
            named |= issue.name.find("Q(.,0)") != std::string::npos;
        CHECK(named);
    }
    SUBCASE("strict and lenient modes differ on higher-order harmonics in Q") {
        GermOptions opts;
        opts.p_origin_value = Rat(0);
        Germ g = Germ::make(parse("exp(-1/abs2(z))"), parse("abs2(z)+re(z^3)"), opts);
        ClassifyResult strict = classify_tangent_fields(g);
        CHECK(strict.verdict == Verdict::HypothesisViolation);
        ClassifyOptions lenient_opts;
        lenient_opts.strict = false;
        ClassifyResult lenient = classify_tangent_fields(g, lenient_opts);
        // lenient mode accepts the hypotheses, and the harmonic term breaks symmetry
        CHECK(lenient.verdict == Verdict::OnlyZeroField);
        CHECK(lenient.asymmetric_function == "Q");
    }
}

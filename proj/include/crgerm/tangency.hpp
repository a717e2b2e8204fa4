#pragma once

// Tangential holomorphic vector fields: Re[rho_z1 h1 + rho_z2 h2] as a
// numeric residual on surface points and as an exact jet after the on-surface
// substitution z1 = iv - P - vQ, the jet-order nullspace solver for the
// coefficients a_jk, b_jk, rotational-symmetry deciders, and the classifier
// for germs of infinite type.

#include "crgerm/germ.hpp"
#include "crgerm/linalg.hpp"
#include "crgerm/type_analysis.hpp"
#include "crgerm/vector_field.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace crgerm {

// ---------------------------------------------------------------------------
// Numeric residual
// ---------------------------------------------------------------------------

struct TangencyReport {
    double max_abs_residual = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;
    struct Offender {
        SurfacePoint point;
        double residual;
    };
    std::vector<Offender> worst;  // up to three, largest first
};

inline TangencyReport residual_numeric(const Germ& g, const VectorField& H,
                                       const std::vector<SurfacePoint>& points) {
    TangencyReport report;
    for (const SurfacePoint& pt : points) {
        Complex g1, g2;
        try {
            std::tie(g1, g2) = g.rho_gradients(pt.z1, pt.z2);
        } catch (const EvalSingularity&) {
            ++report.skipped;
            continue;
        }
        Complex h1 = eval_poly(H.h1, pt.z1, pt.z2);
        Complex h2 = eval_poly(H.h2, pt.z1, pt.z2);
        double residual = (g1 * h1 + g2 * h2).real();
        ++report.samples;
        double mag = std::abs(residual);
        report.max_abs_residual = std::max(report.max_abs_residual, mag);
        if (report.worst.size() < 3 || mag > std::abs(report.worst.back().residual)) {
            report.worst.push_back({pt, residual});
            std::sort(report.worst.begin(), report.worst.end(),
                      [](const auto& a, const auto& b) {
                          return std::abs(a.residual) > std::abs(b.residual);
                      });
            if (report.worst.size() > 3) report.worst.resize(3);
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Exact jet residual
// ---------------------------------------------------------------------------

/// Jet of Re[(1/2 + Q/(2i) + v Q_v/(2i)) h1(X, z) + (P' + v Q_z) h2(X, z)]
/// with X = iv - P - vQ, in the variables (z, zbar, v); v is the paper's
/// real surface parameter t. With defining jets at cutoff N the result is
/// exact through order N - 1.
inline Jet residual_jet(const Jet& p_jet, const Jet& q_jet, const VectorField& H) {
    int N = std::min(p_jet.cutoff(), q_jet.cutoff());
    Jet P = p_jet.truncated(N), Q = q_jet.truncated(N);
    Jet v = Jet::variable(JVar::V, N);
    Jet X = Jet::monomial({0, 0, 1, 0}, RatC::unit_i(), N) - P - v * Q;

    const RatC half(Rat(1, 2));
    const RatC half_over_i(Rat(0), Rat(-1, 2));  // 1/(2i)
    Jet G1 = Jet::constant(N, half) + Q * half_over_i +
             v * wirtinger_jet(Q, JVar::V) * half_over_i;
    Jet G2 = wirtinger_jet(P, JVar::Z) + v * wirtinger_jet(Q, JVar::Z);

    Jet h1 = poly_on_jets(H.h1, X, N);
    Jet h2 = poly_on_jets(H.h2, X, N);
    return real_part(G1 * h1 + G2 * h2);
}

inline Jet residual_jet(const Germ& g, const VectorField& H, int order) {
    return residual_jet(g.p_jet_at(order + 1), g.q_jet_at(order + 1), H);
}

// ---------------------------------------------------------------------------
// Nullspace solver
// ---------------------------------------------------------------------------

struct SolverRefusal : Error {
    explicit SolverRefusal(const std::string& why) : Error(why) {}
};

struct FieldSolution {
    std::vector<VectorField> basis;
    int jet_order = 0;    // K: residual vanishes through this order
    int degree_bound = 0; // D: total degree of the unknown fields
    bool exact = true;    // rational nullspace (always; jets are rational)
};

namespace detail {

struct UnknownLayout {
    std::vector<std::pair<int, int>> monomials;  // (j,k), 1 <= j+k <= D, lex order
    int count() const { return static_cast<int>(monomials.size()); }
};

inline UnknownLayout field_unknowns(int D) {
    UnknownLayout layout;
    for (int j = 0; j <= D; ++j)
        for (int k = 0; k <= D - j; ++k)
            if (j + k >= 1) layout.monomials.push_back({j, k});
    return layout;
}

}  // namespace detail

/// Exact nullspace of the order-K tangency constraints over fields of total
/// degree <= D. The result spans the K-jet-tangent fields: a superset of the
/// genuinely tangent ones that shrinks as K grows. Germs whose P jet is
/// identically zero are refused; they belong to the classifier.
inline FieldSolution solve_tangent_fields(const Jet& p_jet_in, const Jet& q_jet_in, int K, int D) {
    if (D < 1 || K < D) throw Error("solver requires K >= D >= 1");
    if (p_jet_in.cutoff() < K + 1 || q_jet_in.cutoff() < K + 1)
        throw CutoffMismatch(std::min(p_jet_in.cutoff(), q_jet_in.cutoff()), K + 1);
    if (!vanishing_order(p_jet_in).finite)
        throw SolverRefusal(
            "P jet is identically zero at this cutoff; the jet solver would report a spurious "
            "space — use the classifier for infinite-type germs");

    const int N = K + 1;
    Jet P = p_jet_in.truncated(N), Q = q_jet_in.truncated(N);
    Jet v = Jet::variable(JVar::V, N);
    Jet X = Jet::monomial({0, 0, 1, 0}, RatC::unit_i(), N) - P - v * Q;

    const RatC half(Rat(1, 2));
    const RatC half_over_i(Rat(0), Rat(-1, 2));
    Jet G1 = Jet::constant(N, half) + Q * half_over_i +
             v * wirtinger_jet(Q, JVar::V) * half_over_i;
    Jet G2 = wirtinger_jet(P, JVar::Z) + v * wirtinger_jet(Q, JVar::Z);

    detail::UnknownLayout layout = detail::field_unknowns(D);
    const int M = layout.count();

    // unknown order: Re a_jk, Im a_jk (lex (j,k)), then the b block
    std::vector<Jet> columns;
    columns.reserve(4 * M);
    std::vector<Jet> xpow{Jet::constant(N, RatC(1))};
    const auto x_to = [&](int j) -> const Jet& {
        while (static_cast<int>(xpow.size()) <= j) xpow.push_back(xpow.back() * X);
        return xpow[j];
    };
    for (const Jet* G : {&G1, &G2}) {
        for (const auto& [j, k] : layout.monomials) {
            Jet W = (*G) * x_to(j) * Jet::monomial({k, 0, 0, 0}, RatC(1), N);
            W = W.truncated(K);
            columns.push_back(real_part(W));
            columns.push_back(real_part(W * RatC::unit_i()));
        }
    }

    // one pair of real equations per monomial appearing in any column
    std::map<ExpKey, int> row_of_key;
    for (const Jet& col : columns)
        for (const auto& [key, c] : col.terms())
            row_of_key.emplace(key, 0);
    int next = 0;
    for (auto& [key, idx] : row_of_key) idx = next++;

    RatMatrix A(2 * row_of_key.size(), RatVec(columns.size(), Rat(0)));
    for (std::size_t u = 0; u < columns.size(); ++u) {
        for (const auto& [key, c] : columns[u].terms()) {
            int r = row_of_key.at(key);
            A[2 * r][u] = c.re;
            A[2 * r + 1][u] = c.im;
        }
    }

    FieldSolution sol;
    sol.jet_order = K;
    sol.degree_bound = D;
    for (const RatVec& x : nullspace(std::move(A))) {
        PolyMap h1, h2;
        for (int m = 0; m < M; ++m) {
            RatC a(x[2 * m], x[2 * m + 1]);
            RatC b(x[2 * M + 2 * m], x[2 * M + 2 * m + 1]);
            if (!a.is_zero()) h1[layout.monomials[m]] = a;
            if (!b.is_zero()) h2[layout.monomials[m]] = b;
        }
        VectorField H = VectorField::make(std::move(h1), std::move(h2));
        if (!residual_jet(p_jet_in, q_jet_in, H).truncated(K).is_zero())
            throw Error("solver internal error: basis element fails re-verification");
        sol.basis.push_back(std::move(H));
    }
    return sol;
}

inline FieldSolution solve_tangent_fields(const Germ& g, int K, int D) {
    return solve_tangent_fields(g.p_jet_at(K + 1), g.q_jet_at(K + 1), K, D);
}

/// Real coordinates of a field in the solver's unknown ordering, for span
/// membership and monotonicity checks.
inline RatVec field_coordinates(const VectorField& H, int D) {
    detail::UnknownLayout layout = detail::field_unknowns(D);
    const int M = layout.count();
    RatVec x(4 * M, Rat(0));
    for (int m = 0; m < M; ++m) {
        auto it1 = H.h1.find(layout.monomials[m]);
        if (it1 != H.h1.end()) {
            x[2 * m] = it1->second.re;
            x[2 * m + 1] = it1->second.im;
        }
        auto it2 = H.h2.find(layout.monomials[m]);
        if (it2 != H.h2.end()) {
            x[2 * M + 2 * m] = it2->second.re;
            x[2 * M + 2 * m + 1] = it2->second.im;
        }
    }
    return x;
}

inline std::vector<RatVec> solution_coordinates(const FieldSolution& sol) {
    std::vector<RatVec> rows;
    for (const VectorField& H : sol.basis) rows.push_back(field_coordinates(H, sol.degree_bound));
    return rows;
}

// ---------------------------------------------------------------------------
// Rotational symmetry and the sign dichotomy on circles
// ---------------------------------------------------------------------------

struct SymmetryResult {
    bool symmetric = false;
    double max_radial_deviation = 0.0;    // max |R(r e^{i theta}) - R(r)|
    double max_rotational_derivative = 0.0;  // max |Re(i z R_z)|
    Complex witness{0.0, 0.0};            // worst point when asymmetric
};

/// Both equivalent criteria are evaluated on the grid: R constant on circles
/// and Re(i z R_z) = 0. Symmetric iff both stay within tol.
inline SymmetryResult rotational_symmetry_check_fn(
    const std::function<double(Complex)>& R, const std::function<Complex(Complex)>& Rz,
    const std::vector<double>& radii, int angles, double tol) {
    SymmetryResult res;
    for (double r : radii) {
        double base = R(Complex(r, 0.0));
        for (int a = 0; a < angles; ++a) {
            double th = 2.0 * 3.14159265358979323846 * a / angles;
            Complex z = std::polar(r, th);
            double dev = std::abs(R(z) - base);
            Complex w = Complex(0, 1) * z * Rz(z);
            double rot = std::abs(w.real());
            if (dev > res.max_radial_deviation) {
                res.max_radial_deviation = dev;
                if (dev > tol) res.witness = z;
            }
            if (rot > res.max_rotational_derivative) {
                res.max_rotational_derivative = rot;
                if (rot > tol && dev <= tol) res.witness = z;
            }
        }
    }
    res.symmetric = res.max_radial_deviation <= tol && res.max_rotational_derivative <= tol;
    return res;
}

inline SymmetryResult rotational_symmetry_check(const Expr& R, const std::vector<double>& radii,
                                                int angles, double tol) {
    Expr Rz = wirtinger(R, Deriv::Dz);
    return rotational_symmetry_check_fn(
        [&](Complex z) { return eval(R, z, 0.0).real(); },
        [&](Complex z) { return eval(Rz, z, 0.0); }, radii, angles, tol);
}

enum class CircleSign { IdenticallyZero, SignChange, ConstantSign };

struct SignScanResult {
    CircleSign kind;
    double theta_positive = 0.0;  // angle of the largest positive sample
    double theta_negative = 0.0;  // angle of the most negative sample
    double max_value = 0.0;
    double min_value = 0.0;
};

/// Classify circle samples of Re(i z R_z) relative to the magnitude of
/// z R_z itself, so exact cancellation is distinguished from sign structure.
inline SignScanResult classify_circle_samples(const std::vector<double>& values,
                                              const std::vector<double>& thetas,
                                              double magnitude_scale) {
    SignScanResult res{CircleSign::IdenticallyZero};
    double tol = 1e-12 * (magnitude_scale + 1e-300);
    std::size_t imax = 0, imin = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > values[imax]) imax = i;
        if (values[i] < values[imin]) imin = i;
    }
    res.max_value = values.empty() ? 0.0 : values[imax];
    res.min_value = values.empty() ? 0.0 : values[imin];
    res.theta_positive = thetas.empty() ? 0.0 : thetas[imax];
    res.theta_negative = thetas.empty() ? 0.0 : thetas[imin];
    bool has_pos = res.max_value > tol;
    bool has_neg = res.min_value < -tol;
    if (!has_pos && !has_neg)
        res.kind = CircleSign::IdenticallyZero;
    else if (has_pos && has_neg)
        res.kind = CircleSign::SignChange;
    else
        res.kind = CircleSign::ConstantSign;  // violates the dichotomy: R was not real C^1
    return res;
}

inline SignScanResult sign_change_scan(const Expr& R, double r, int angles) {
    Expr Rz = wirtinger(R, Deriv::Dz);
    std::vector<double> values, thetas;
    double scale = 0.0;
    for (int a = 0; a < angles; ++a) {
        double th = 2.0 * 3.14159265358979323846 * a / angles;
        Complex z = std::polar(r, th);
        Complex w = Complex(0, 1) * z * eval(Rz, z, 0.0);
        values.push_back(w.real());
        thetas.push_back(th);
        scale = std::max(scale, std::abs(w));
    }
    return classify_circle_samples(values, thetas, scale);
}

// ---------------------------------------------------------------------------
// Classifier
// ---------------------------------------------------------------------------

enum class Verdict { OnlyZeroField, RotationFamily, HypothesisViolation };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::OnlyZeroField: return "OnlyZeroField";
        case Verdict::RotationFamily: return "RotationFamily";
        case Verdict::HypothesisViolation: return "HypothesisViolation";
    }
    return "?";
}

struct HypothesisIssue {
    std::string name;
    std::string evidence;
};

struct ClassifyOptions {
    bool strict = true;           // full harmonic-freeness of Q(.,0); lenient
                                  // only excludes z^k at k = nu(Q(.,0))
    std::vector<double> radii;    // symmetry/residual grid; default from the domain
    int angles = 16;
    std::vector<double> v_values{-0.05, 0.0, 0.05};
    double symmetry_tol = 1e-10;
};

struct ClassifyResult {
    Verdict verdict;
    std::vector<HypothesisIssue> violations;
    bool beta_family = false;              // a rotation family i beta z2 d/dz2 exists
    double residual_confirmation = 0.0;    // max residual of i z2 d/dz2 when it does
    std::string asymmetric_function;       // "P" or "Q" for the OnlyZeroField witness
    Complex asymmetry_witness{0.0, 0.0};
    TypeDecision type_decision;
    HypothesisRecord hypotheses;
};

/// Decide which tangential holomorphic fields vanishing at 0 a germ of
/// infinite type admits: none beyond zero, or exactly the rotation family
/// i beta z2 d/dz2 (when both P and Q are rotationally symmetric).
inline ClassifyResult classify_tangent_fields(const Germ& g, ClassifyOptions opts = {}) {
    ClassifyResult res{Verdict::HypothesisViolation};
    res.hypotheses = g.hypotheses();

    if (opts.radii.empty())
        for (double f : {0.5, 0.35, 0.2, 0.1, 0.05}) opts.radii.push_back(g.domain_radius() * f);

    // (1) P > 0 away from 0
    const PositivityEvidence& pos = g.hypotheses().positivity;
    if (!pos.positive)
        res.violations.push_back(
            {"P positive off the origin",
             "sampled minimum " + std::to_string(pos.min_value) + " at z=(" +
                 std::to_string(pos.witness.real()) + "," + std::to_string(pos.witness.imag()) +
                 ")"});

    // (2) P vanishes to infinite order
    res.type_decision = infinite_type_check(g);
    if (res.type_decision.kind != TypeDecisionKind::InfiniteAtJetScale) {
        std::string ev = std::string("decision ") + to_string(res.type_decision.kind);
        if (res.type_decision.kind == TypeDecisionKind::FiniteOfOrder)
            ev += " (order " + std::to_string(res.type_decision.order) + ")";
        res.violations.push_back({"P vanishes to infinite order", ev});
    }

    // (3) harmonic content of Q(., 0)
    const QHarmonicEvidence& qh = g.hypotheses().q_harmonic;
    if (qh.jet_checked) {
        if (opts.strict) {
            if (!qh.harmonic_free)
                res.violations.push_back(
                    {"Q(.,0) free of harmonic terms",
                     "pure z^" + std::to_string(qh.offending_degree) + " term present"});
        } else if (g.q_jet()) {
            // lenient: only the monomial z^k at k = nu(Q(.,0)) is forbidden
            int nu_q0 = g.q_jet()->cutoff() + 1;
            for (const auto& [key, c] : g.q_jet()->terms())
                if (key[2] == 0 && key[3] == 0) nu_q0 = std::min(nu_q0, key[0] + key[1]);
            if (nu_q0 <= g.q_jet()->cutoff() &&
                !g.q_jet()->coeff({nu_q0, 0, 0, 0}).is_zero())
                res.violations.push_back(
                    {"Q(.,0) lacks the z^k monomial at k = nu(Q(.,0))",
                     "pure z^" + std::to_string(nu_q0) + " term present at the leading order"});
        }
    } else if (!g.q_jet()) {
        res.violations.push_back({"Q(.,0) free of harmonic terms",
                                  "Q is not jet-expandable; condition unverifiable"});
    }

    if (!res.violations.empty()) return res;

    // hypotheses hold: the dichotomy is decided by rotational symmetry
    SymmetryResult symP = rotational_symmetry_check_fn(
        [&](Complex z) { return g.P().eval_at(z, 0.0).real(); },
        [&](Complex z) {
            return g.P_z().origin && z == Complex(0.0, 0.0)
                       ? Complex(to_double(*g.P_z().origin), 0.0)
                       : eval(g.P_z().body, z, 0.0);
        },
        opts.radii, opts.angles, opts.symmetry_tol);
    if (!symP.symmetric) {
        res.verdict = Verdict::OnlyZeroField;
        res.asymmetric_function = "P";
        res.asymmetry_witness = symP.witness;
        return res;
    }

    for (double v : opts.v_values) {
        SymmetryResult symQ = rotational_symmetry_check_fn(
            [&](Complex z) { return eval(g.Q(), z, v).real(); },
            [&](Complex z) { return eval(g.Q_z(), z, v); }, opts.radii, opts.angles,
            opts.symmetry_tol);
        if (!symQ.symmetric) {
            res.verdict = Verdict::OnlyZeroField;
            res.asymmetric_function = "Q";
            res.asymmetry_witness = symQ.witness;
            return res;
        }
    }

    res.verdict = Verdict::RotationFamily;
    res.beta_family = true;
    SurfaceSample sample = g.sample_surface(opts.radii, opts.angles, opts.v_values);
    res.residual_confirmation =
        residual_numeric(g, VectorField::rotation(), sample.points).max_abs_residual;
    return res;
}

}  // namespace crgerm

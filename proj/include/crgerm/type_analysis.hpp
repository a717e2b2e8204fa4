#pragma once

// Contact-order analysis: composing the defining function with holomorphic
// curve jets, lower-bound probing of the D'Angelo type, the finite/infinite
// type decision, and the shear normal form removing harmonic terms from P.

#include "crgerm/germ.hpp"
#include "crgerm/jet.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace crgerm {

/// A holomorphic curve germ (z1(t), z2(t)) with z1(0) = z2(0) = 0, stored as
/// univariate jets in t.
struct HoloCurve {
    Jet z1, z2;

    static HoloCurve make(Jet z1, Jet z2) {
        for (const Jet* j : {&z1, &z2}) {
            if (j->mask() & ~(1u << static_cast<int>(JVar::T)))
                throw Error("holomorphic curve components must be univariate in t");
            if (!j->constant_term().is_zero())
                throw Error("holomorphic curve must pass through the origin");
        }
        if (z1.is_zero() && z2.is_zero()) throw Error("holomorphic curve must be nonconstant");
        return HoloCurve{std::move(z1), std::move(z2)};
    }

    int cutoff() const { return std::min(z1.cutoff(), z2.cutoff()); }

    /// nu(curve) = min of the component vanishing orders; finite by the
    /// nonconstancy requirement.
    int order() const {
        VanishingOrder o1 = vanishing_order(z1), o2 = vanishing_order(z2);
        return std::min(o1.finite ? o1.value : z1.cutoff() + 1,
                        o2.finite ? o2.value : z2.cutoff() + 1);
    }
};

/// Exact jet of t -> rho(z1(t), z2(t)) in (t, tbar); the output reuses the
/// conjugate-pair slots, so exponent (a, b) reads t^a tbar^b.
inline Jet compose_curve(const Jet& p_jet, const Jet& q_jet, const HoloCurve& curve) {
    int N = curve.cutoff();
    if (p_jet.cutoff() < N) throw CutoffMismatch(p_jet.cutoff(), N);
    if (q_jet.cutoff() < N) throw CutoffMismatch(q_jet.cutoff(), N);

    Jet c1 = curve.z1.renamed(JVar::T, JVar::Z);
    Jet c2 = curve.z2.renamed(JVar::T, JVar::Z);
    Jet re_z1 = real_part(c1);
    Jet im_z1 = imag_part(c1);

    std::array<std::optional<Jet>, 4> subs;
    subs[static_cast<int>(JVar::Z)] = c2;
    subs[static_cast<int>(JVar::ZBar)] = c2.conj();
    subs[static_cast<int>(JVar::V)] = im_z1;

    Jet p_comp = substitute(p_jet.truncated(N), subs);
    Jet q_comp = substitute(q_jet.truncated(N), subs);
    return re_z1 + p_comp + im_z1 * q_comp;
}

inline Jet compose_curve(const Germ& g, const HoloCurve& curve) {
    if (!g.has_jets())
        throw NotJetExpandable(g.P().body, "germ lacks jet forms; curve composition needs jets");
    return compose_curve(*g.p_jet(), *g.q_jet(), curve);
}

// ---------------------------------------------------------------------------
// Shear normal form
// ---------------------------------------------------------------------------

struct NotNormalizable : Error {
    explicit NotNormalizable(const std::string& why) : Error("not normalizable: " + why) {}
};

struct NormalFormResult {
    int degree = 0;                 // harmonic terms removed through this degree
    std::vector<RatC> shear_coeffs; // a_j for j = 2..degree (index j-2)
    Jet transformed;                // P after all shears
    std::vector<Jet> steps;         // running jet after each degree
};

/// Remove the degree-j harmonic part Re(a_j z^j) of P for j = 2..N via the
/// shears z1 -> z1 + a_j z2^j; records the coefficient sequence.
inline NormalFormResult shear_normalize(const Jet& p_jet, int N) {
    if (!p_jet.is_real()) throw NotNormalizable("defining jet is not real");
    if (p_jet.cutoff() < N) throw CutoffMismatch(p_jet.cutoff(), N);
    VanishingOrder nu = vanishing_order(p_jet);
    if (nu.finite && nu.value < 2) throw NotNormalizable("vanishing order below 2");

    NormalFormResult out;
    out.degree = N;
    out.transformed = p_jet;
    for (int j = 2; j <= N; ++j) {
        RatC hz = out.transformed.coeff({j, 0, 0, 0});
        RatC hzb = out.transformed.coeff({0, j, 0, 0});
        if (hzb != hz.conj())
            throw NotNormalizable("degree-" + std::to_string(j) +
                                  " harmonic part is not of the form Re(a z^j)");
        RatC aj = RatC(2) * hz;
        out.shear_coeffs.push_back(aj);
        if (!aj.is_zero()) {
            Jet harmonic =
                Jet::monomial({j, 0, 0, 0}, aj * RatC(Rat(1, 2)), p_jet.cutoff()) +
                Jet::monomial({0, j, 0, 0}, aj.conj() * RatC(Rat(1, 2)), p_jet.cutoff());
            out.transformed = out.transformed - harmonic;
        }
        out.steps.push_back(out.transformed);
    }
    return out;
}

/// Undo the recorded shears; reproduces the shear_normalize input exactly.
inline Jet apply_inverse_shears(const NormalFormResult& nf) {
    Jet out = nf.transformed;
    for (int idx = static_cast<int>(nf.shear_coeffs.size()) - 1; idx >= 0; --idx) {
        const RatC& aj = nf.shear_coeffs[idx];
        if (aj.is_zero()) continue;
        int j = idx + 2;
        out = out + Jet::monomial({j, 0, 0, 0}, aj * RatC(Rat(1, 2)), out.cutoff()) +
              Jet::monomial({0, j, 0, 0}, aj.conj() * RatC(Rat(1, 2)), out.cutoff());
    }
    return out;
}

// ---------------------------------------------------------------------------
// D'Angelo type probing
// ---------------------------------------------------------------------------

struct TypeProbeReport {
    bool infinite = false;  // contact reached the jet cutoff ceiling
    Rat best_ratio{0};      // nu(rho o phi) / nu(phi) of the witness
    std::optional<HoloCurve> witness;
    int curves_tried = 0;
    int cutoff = 0;
};

/// Lower-bound probe of the D'Angelo type over the monomial curves (0, t^k),
/// the shear-derived curves (-sum a_j t^j, t), and derived monomial probes
/// (c t^{kn}, t^n) targeting the harmonic terms of P.
inline TypeProbeReport dangelo_probe(const Jet& p_jet, const Jet& q_jet, int degree_budget) {
    int cutoff = std::min(p_jet.cutoff(), q_jet.cutoff());
    TypeProbeReport report;
    report.cutoff = cutoff;

    const auto consider = [&](const HoloCurve& curve) -> bool {
        Jet contact = compose_curve(p_jet, q_jet, curve);
        VanishingOrder nu = vanishing_order(contact);
        ++report.curves_tried;
        if (!nu.finite) {
            // contact beyond the ceiling is only evidence when the curve has
            // order 1; for higher-order curves the cutoff just ran out
            if (curve.order() > 1) return false;
            report.infinite = true;
            report.witness = curve;
            report.best_ratio = Rat(nu.value, curve.order());
            return true;
        }
        Rat ratio(nu.value, curve.order());
        if (!report.witness || ratio > report.best_ratio) {
            report.best_ratio = ratio;
            report.witness = curve;
        }
        return false;
    };

    // monomial probes (0, t^k)
    for (int k = 1; k <= std::min(degree_budget, cutoff); ++k) {
        Jet zero(cutoff);
        if (consider(HoloCurve::make(zero, Jet::monomial({0, 0, 0, k}, RatC(1), cutoff))))
            return report;
    }

    // shear-family curves (-sum_{j<=n} a_j t^j, t)
    NormalFormResult nf = shear_normalize(p_jet, std::min(degree_budget, cutoff));
    Jet z1(cutoff);
    for (int n = 2; n - 2 < static_cast<int>(nf.shear_coeffs.size()); ++n) {
        const RatC& an = nf.shear_coeffs[n - 2];
        if (an.is_zero()) continue;
        z1 = z1 - Jet::monomial({0, 0, 0, n}, an, cutoff);
        if (consider(HoloCurve::make(z1, Jet::variable(JVar::T, cutoff)))) return report;
    }

    // monomial probes (c t^{kn}, t^n) aimed at each harmonic term of P
    for (const auto& [key, coeff] : p_jet.terms()) {
        if (!(key[0] >= 1 && key[1] == 0 && key[2] == 0 && key[3] == 0)) continue;
        int k = key[0];
        for (int n = 2; k * n <= std::min(degree_budget, cutoff); ++n) {
            Jet zc = Jet::monomial({0, 0, 0, k * n}, RatC(-2) * coeff, cutoff);
            if (consider(HoloCurve::make(zc, Jet::monomial({0, 0, 0, n}, RatC(1), cutoff))))
                return report;
        }
    }

    return report;
}

inline TypeProbeReport dangelo_probe(const Germ& g, int degree_budget) {
    if (!g.has_jets())
        throw NotJetExpandable(g.P().body, "germ lacks jet forms; the probe needs jets");
    return dangelo_probe(*g.p_jet(), *g.q_jet(), degree_budget);
}

// ---------------------------------------------------------------------------
// Finite/infinite type decision
// ---------------------------------------------------------------------------

enum class TypeDecisionKind { FiniteOfOrder, InfiniteAtJetScale, HarmonicObstruction };

struct TypeDecision {
    TypeDecisionKind kind;
    int order = 0;             // FiniteOfOrder
    int harmonic_degree = 0;   // HarmonicObstruction
    bool numeric_only = false; // decided from the slope estimate, no jet available
    OrderEstimate evidence;
};

inline const char* to_string(TypeDecisionKind k) {
    switch (k) {
        case TypeDecisionKind::FiniteOfOrder: return "FiniteOfOrder";
        case TypeDecisionKind::InfiniteAtJetScale: return "InfiniteAtJetScale";
        case TypeDecisionKind::HarmonicObstruction: return "HarmonicObstruction";
    }
    return "?";
}

/// Decision procedure: a pure harmonic monomial in P blocks the theorem's
/// normalization hypothesis; otherwise a nonzero P jet has finite order, and
/// a vanishing jet (or a flat numeric estimate when no jet exists) is
/// reported as infinite at jet scale, never as a proof.
inline TypeDecision infinite_type_check(const Germ& g) {
    TypeDecision d{TypeDecisionKind::InfiniteAtJetScale};
    d.evidence = g.hypotheses().p_order;
    if (g.p_jet()) {
        for (const auto& [key, c] : g.p_jet()->terms()) {
            bool pure_z = key[0] >= 1 && key[1] == 0 && key[2] == 0 && key[3] == 0;
            bool pure_zbar = key[1] >= 1 && key[0] == 0 && key[2] == 0 && key[3] == 0;
            if (pure_z || pure_zbar) {
                d.kind = TypeDecisionKind::HarmonicObstruction;
                d.harmonic_degree = std::max(key[0], key[1]);
                return d;
            }
        }
        VanishingOrder nu = vanishing_order(*g.p_jet());
        if (nu.finite) {
            d.kind = TypeDecisionKind::FiniteOfOrder;
            d.order = nu.value;
            return d;
        }
        d.kind = TypeDecisionKind::InfiniteAtJetScale;
        return d;
    }
    d.numeric_only = true;
    if (d.evidence.infinite_flag) {
        d.kind = TypeDecisionKind::InfiniteAtJetScale;
    } else {
        d.kind = TypeDecisionKind::FiniteOfOrder;
        d.order = static_cast<int>(d.evidence.slope + 0.5);
    }
    return d;
}

}  // namespace crgerm

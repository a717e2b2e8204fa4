#pragma once

// The hypersurface germ  Re z1 + P(z2) + (Im z1) Q(z2, Im z1) = 0.
//
// Construction validates the normal-shape conditions P(0)=0, dP(0)=0,
// Q(0,0)=0 and records hypothesis evidence (positivity samples, vanishing
// order estimate, harmonic content of Q) rather than bare booleans. Jets are
// derived from the expressions at a configurable cutoff when the defining
// functions are Taylor-expandable.

#include "crgerm/expr.hpp"
#include "crgerm/jet.hpp"
#include "crgerm/jet_expand.hpp"
#include "crgerm/order_estimate.hpp"
#include "crgerm/wirtinger.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace crgerm {

struct GermInvalid : Error {
    std::vector<std::string> failures;
    explicit GermInvalid(std::vector<std::string> fs)
        : Error("invalid germ: " + join(fs)), failures(std::move(fs)) {}

private:
    static std::string join(const std::vector<std::string>& fs) {
        std::string out;
        for (const auto& f : fs) {
            if (!out.empty()) out += "; ";
            out += f;
        }
        return out;
    }
};

/// A real-valued defining function, optionally split at z = 0 with a declared
/// origin value (for flat functions whose closed form is singular there).
struct RealFunc {
    Expr body;
    std::optional<Rat> origin;

    Complex eval_at(Complex z, double v) const {
        if (origin && z == Complex(0.0, 0.0)) return Complex(to_double(*origin), 0.0);
        return eval(body, z, v);
    }

    double logabs_at(Complex z, double v) const {
        if (origin && z == Complex(0.0, 0.0)) {
            double m = std::abs(to_double(*origin));
            return m == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(m);
        }
        return logabs_eval(body, z, v);
    }

    RealFunc deriv(Deriv which) const {
        // derivative of a flat piecewise function keeps origin value 0
        return RealFunc{wirtinger(body, which), origin ? std::optional<Rat>(Rat(0)) : std::nullopt};
    }
};

struct PositivityEvidence {
    bool positive = false;
    double min_value = 0.0;       // smallest sampled value (log scale when underflowed)
    Complex witness{0.0, 0.0};    // point of the worst sample
    int radii = 0, angles = 0;
};

struct QHarmonicEvidence {
    bool jet_checked = false;
    bool harmonic_free = false;
    int offending_degree = 0;  // smallest k with a pure z^k term in Q(.,0), if any
};

struct HypothesisRecord {
    PositivityEvidence positivity;
    OrderEstimate p_order;
    QHarmonicEvidence q_harmonic;
};

struct SurfacePoint {
    Complex z1, z2;
    double v;
};

struct SurfaceSample {
    std::vector<SurfacePoint> points;
    int skipped = 0;
};

struct GermOptions {
    std::optional<Rat> p_origin_value;
    int cutoff = 12;
    double domain_radius = 0.75;
    std::string name = "germ";
};

namespace detail {

// True when every factor of a product/quotient is exp-rooted, so the value is
// strictly positive wherever it evaluates.
inline bool exp_rooted_positive(const Expr& e) {
    switch (e->kind) {
        case ExprKind::Exp:
            return true;
        case ExprKind::Mul:
        case ExprKind::Div:
            return exp_rooted_positive(e->a) && exp_rooted_positive(e->b);
        case ExprKind::Pow:
            return e->exponent % 2 == 0 || exp_rooted_positive(e->a);
        default:
            return false;
    }
}

}  // namespace detail

class Germ {
public:
    static Germ make(Expr P, Expr Q, GermOptions opts = {});

    const RealFunc& P() const { return p_; }
    const Expr& Q() const { return q_; }
    const RealFunc& P_z() const { return p_z_; }
    const Expr& Q_z() const { return q_z_; }
    const Expr& Q_v() const { return q_v_; }
    const std::optional<Jet>& p_jet() const { return p_jet_; }
    const std::optional<Jet>& q_jet() const { return q_jet_; }
    const std::string& p_jet_failure() const { return p_jet_failure_; }
    int cutoff() const { return cutoff_; }
    double domain_radius() const { return domain_radius_; }
    const std::string& name() const { return name_; }
    const HypothesisRecord& hypotheses() const { return hyp_; }

    bool has_jets() const { return p_jet_.has_value() && q_jet_.has_value(); }

    /// Re-expand the defining jets at a (possibly larger) cutoff.
    Jet p_jet_at(int cutoff) const {
        if (p_jet_ && p_jet_->cutoff() >= cutoff) return p_jet_->truncated(cutoff);
        return jet_of_expr(p_.body, cutoff);
    }
    Jet q_jet_at(int cutoff) const {
        if (q_jet_ && q_jet_->cutoff() >= cutoff) return q_jet_->truncated(cutoff);
        return jet_of_expr(q_, cutoff);
    }

    double rho(Complex z1, Complex z2) const {
        double v = z1.imag();
        double p = p_.eval_at(z2, v).real();
        double q = eval(q_, z2, v).real();
        return z1.real() + p + v * q;
    }

    std::pair<Complex, Complex> rho_gradients(Complex z1, Complex z2) const {
        double v = z1.imag();
        Complex qval = eval(q_, z2, v);
        Complex qv = eval(q_v_, z2, v);
        Complex qz = eval(q_z_, z2, v);
        Complex pz = p_z_.origin && z2 == Complex(0.0, 0.0)
                         ? Complex(to_double(*p_z_.origin), 0.0)
                         : eval(p_z_.body, z2, v);
        const Complex half_over_i(0.0, -0.5);  // 1/(2i)
        Complex rho_z1 = Complex(0.5, 0.0) + qval * half_over_i + v * qv * half_over_i;
        Complex rho_z2 = pz + v * qz;
        return {rho_z1, rho_z2};
    }

    SurfaceSample sample_surface(const std::vector<double>& radii, int angles,
                                 const std::vector<double>& v_values) const {
        SurfaceSample out;
        for (double r : radii) {
            int count = (r == 0.0) ? 1 : angles;
            for (int a = 0; a < count; ++a) {
                double th = 2.0 * 3.14159265358979323846 * a / angles;
                Complex z2 = (r == 0.0) ? Complex(0.0, 0.0) : std::polar(r, th);
                for (double v : v_values) {
                    try {
                        double p = p_.eval_at(z2, v).real();
                        double q = eval(q_, z2, v).real();
                        out.points.push_back({Complex(-(p + v * q), v), z2, v});
                    } catch (const EvalSingularity&) {
                        ++out.skipped;
                    }
                }
            }
        }
        return out;
    }

private:
    RealFunc p_;
    Expr q_;
    RealFunc p_z_;
    Expr q_z_, q_v_;
    std::optional<Jet> p_jet_, q_jet_;
    std::string p_jet_failure_, q_jet_failure_;
    int cutoff_ = 12;
    double domain_radius_ = 0.75;
    std::string name_;
    HypothesisRecord hyp_;
};

inline Germ Germ::make(Expr P, Expr Q, GermOptions opts) {
    std::vector<std::string> failures;
    Germ g;
    g.p_ = RealFunc{P, opts.p_origin_value};
    g.q_ = Q;
    g.cutoff_ = opts.cutoff;
    g.domain_radius_ = opts.domain_radius;
    g.name_ = opts.name;

    // jets, when the defining functions are Taylor-expandable
    try {
        g.p_jet_ = jet_of_expr(P, opts.cutoff);
    } catch (const NotJetExpandable& err) {
        g.p_jet_failure_ = err.what();
    }
    try {
        g.q_jet_ = jet_of_expr(Q, opts.cutoff);
    } catch (const NotJetExpandable& err) {
        g.q_jet_failure_ = err.what();
    }

    // real-valuedness, sampled
    const double pi = 3.14159265358979323846;
    for (const auto& [label, fn, has_origin] :
         {std::tuple<const char*, Expr, bool>{"P", P, opts.p_origin_value.has_value()},
          std::tuple<const char*, Expr, bool>{"Q", Q, false}}) {
        double worst = 0.0;
        int evaluated = 0;
        for (double frac : {0.9, 0.5, 0.2, 0.05}) {
            double r = opts.domain_radius * frac;
            for (int a = 0; a < 8; ++a) {
                for (double v : {0.0, 0.05, -0.05}) {
                    try {
                        Complex val = eval(fn, std::polar(r, 2 * pi * a / 8), v);
                        worst = std::max(worst,
                                         std::abs(val.imag()) / (1.0 + std::abs(val.real())));
                        ++evaluated;
                    } catch (const EvalSingularity&) {
                    }
                }
            }
        }
        if (evaluated == 0)
            failures.push_back(std::string(label) + " is not evaluable on the sample grid");
        else if (worst > 1e-12)
            failures.push_back(std::string(label) + " is not real-valued (relative imaginary part " +
                               std::to_string(worst) + ")");
        (void)has_origin;
    }

    // P(0) = 0
    if (g.p_jet_) {
        if (!g.p_jet_->constant_term().is_zero()) failures.push_back("P(0) != 0");
        if (opts.p_origin_value && *opts.p_origin_value != 0)
            failures.push_back("declared P origin value is nonzero");
    } else if (opts.p_origin_value) {
        if (*opts.p_origin_value != 0) failures.push_back("declared P origin value is nonzero");
        PiecewiseAtZero pw{P, *opts.p_origin_value};
        if (!pw.consistent()) failures.push_back("P origin value inconsistent with body limit");
    } else {
        try {
            if (std::abs(eval(P, {0, 0}, 0.0)) > 1e-14) failures.push_back("P(0) != 0");
        } catch (const EvalSingularity&) {
            failures.push_back("P(0) not evaluable; declare an origin value");
        }
    }

    // dP(0) = 0
    g.p_z_ = g.p_.deriv(Deriv::Dz);
    if (g.p_jet_) {
        if (!g.p_jet_->coeff({1, 0, 0, 0}).is_zero() || !g.p_jet_->coeff({0, 1, 0, 0}).is_zero())
            failures.push_back("dP(0) != 0");
    } else {
        double worst = 0.0;
        int evaluated = 0;
        for (int k : {14, 16, 18, 20}) {
            double r = std::ldexp(1.0, -k);
            for (int a = 0; a < 8; ++a) {
                try {
                    worst = std::max(worst,
                                     std::abs(eval(g.p_z_.body, std::polar(r, 2 * pi * a / 8), 0.0)));
                    ++evaluated;
                } catch (const EvalSingularity&) {
                }
            }
        }
        if (evaluated > 0 && worst > 1e-12) failures.push_back("dP(0) != 0");
    }

    // Q(0,0) = 0
    if (g.q_jet_) {
        if (!g.q_jet_->constant_term().is_zero()) failures.push_back("Q(0,0) != 0");
    } else {
        try {
            if (std::abs(eval(Q, {0, 0}, 0.0)) > 1e-14) failures.push_back("Q(0,0) != 0");
        } catch (const EvalSingularity&) {
            failures.push_back("Q(0,0) not evaluable");
        }
    }

    if (!failures.empty()) throw GermInvalid(std::move(failures));

    g.q_z_ = wirtinger(Q, Deriv::Dz);
    g.q_v_ = wirtinger(Q, Deriv::Dv);

    // hypothesis evidence: positivity of P off 0 on a log-radial grid
    {
        PositivityEvidence& ev = g.hyp_.positivity;
        ev.angles = 16;
        ev.positive = true;
        ev.min_value = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 16; ++k) {
            double r = std::ldexp(1.0, -k);
            if (r >= opts.domain_radius) continue;
            ++ev.radii;
            for (int a = 0; a < ev.angles; ++a) {
                Complex z = std::polar(r, 2 * pi * a / ev.angles);
                double val;
                try {
                    val = g.p_.eval_at(z, 0.0).real();
                } catch (const EvalSingularity&) {
                    continue;
                }
                bool pos = val > 0.0;
                if (!pos && val == 0.0 && detail::exp_rooted_positive(P)) {
                    try {
                        pos = std::isfinite(g.p_.logabs_at(z, 0.0));
                    } catch (const EvalSingularity&) {
                        pos = false;
                    }
                }
                if (val < ev.min_value) {
                    ev.min_value = val;
                    if (!pos) ev.witness = z;
                }
                if (!pos) ev.positive = false;
            }
        }
    }

    // hypothesis evidence: numeric vanishing order of P
    g.hyp_.p_order = estimate_order_from([&](Complex z) { return g.p_.logabs_at(z, 0.0); });

    // hypothesis evidence: harmonic content of Q(., 0)
    {
        QHarmonicEvidence& ev = g.hyp_.q_harmonic;
        if (g.q_jet_) {
            ev.jet_checked = true;
            ev.harmonic_free = true;
            for (const auto& [key, c] : g.q_jet_->terms()) {
                if (key[0] >= 1 && key[1] == 0 && key[2] == 0) {
                    ev.harmonic_free = false;
                    ev.offending_degree = key[0];
                    break;
                }
            }
        }
    }

    return g;
}

inline double rho_eval(const Germ& g, Complex z1, Complex z2) { return g.rho(z1, z2); }

inline std::pair<Complex, Complex> rho_gradients(const Germ& g, Complex z1, Complex z2) {
    return g.rho_gradients(z1, z2);
}

inline SurfaceSample sample_surface(const Germ& g, const std::vector<double>& radii, int angles,
                                    const std::vector<double>& v_values) {
    return g.sample_surface(radii, angles, v_values);
}

}  // namespace crgerm

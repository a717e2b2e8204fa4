#pragma once

// Truncated formal power series ("jets") over exact complex rationals in up
// to four variables z, zbar, v, t with a shared total-degree cutoff.
//
// Slots 0 and 1 (z, zbar) form the conjugate pair: conjugation swaps their
// exponents and conjugates coefficients. Slots 2 and 3 (v, t) are real.
// Curve composition re-roots univariate series between slots as needed; the
// slot layout, not the display name, carries the semantics.

#include "crgerm/rational.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crgerm {

enum class JVar : int { Z = 0, ZBar = 1, V = 2, T = 3 };

using ExpKey = std::array<int, 4>;

inline int total_degree(const ExpKey& k) { return k[0] + k[1] + k[2] + k[3]; }

inline const char* jvar_name(int slot) {
    static const char* names[4] = {"z", "zbar", "v", "t"};
    return names[slot];
}

struct NotInvertible : std::domain_error {
    NotInvertible() : std::domain_error("jet has zero constant term; not invertible") {}
};

struct NonzeroConstantTerm : std::domain_error {
    NonzeroConstantTerm()
        : std::domain_error("substitution series must have zero constant term") {}
};

struct CutoffMismatch : std::domain_error {
    CutoffMismatch(int a, int b)
        : std::domain_error("jet cutoffs differ: " + std::to_string(a) + " vs " +
                            std::to_string(b)) {}
};

/// Order of vanishing at 0; `finite == false` means every coefficient up to
/// the cutoff vanishes, and `value` holds cutoff + 1.
struct VanishingOrder {
    bool finite;
    int value;

    friend bool operator==(const VanishingOrder& a, const VanishingOrder& b) {
        return a.finite == b.finite && a.value == b.value;
    }
};

class Jet {
public:
    Jet() = default;
    explicit Jet(int cutoff, unsigned mask = 0) : cutoff_(cutoff), mask_(mask) {}

    static Jet constant(int cutoff, RatC c) {
        Jet j(cutoff);
        j.set({0, 0, 0, 0}, std::move(c));
        return j;
    }

    static Jet variable(JVar var, int cutoff) {
        Jet j(cutoff, 1u << static_cast<int>(var));
        ExpKey k{0, 0, 0, 0};
        k[static_cast<int>(var)] = 1;
        j.set(k, RatC(1));
        return j;
    }

    static Jet monomial(const ExpKey& key, RatC coeff, int cutoff) {
        unsigned mask = 0;
        for (int i = 0; i < 4; ++i)
            if (key[i] > 0) mask |= 1u << i;
        Jet j(cutoff, mask);
        j.set(key, std::move(coeff));
        return j;
    }

    int cutoff() const { return cutoff_; }
    unsigned mask() const { return mask_; }
    const std::map<ExpKey, RatC>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    RatC coeff(const ExpKey& key) const {
        auto it = terms_.find(key);
        return it == terms_.end() ? RatC(0) : it->second;
    }

    RatC constant_term() const { return coeff({0, 0, 0, 0}); }

    void set(const ExpKey& key, RatC c) {
        if (total_degree(key) > cutoff_) return;
        for (int i = 0; i < 4; ++i)
            if (key[i] > 0) mask_ |= 1u << i;
        if (c.is_zero())
            terms_.erase(key);
        else
            terms_[key] = std::move(c);
    }

    void accumulate(const ExpKey& key, const RatC& c) {
        if (total_degree(key) > cutoff_ || c.is_zero()) return;
        for (int i = 0; i < 4; ++i)
            if (key[i] > 0) mask_ |= 1u << i;
        auto [it, inserted] = terms_.emplace(key, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Jet truncated(int new_cutoff) const {
        Jet out(new_cutoff, mask_);
        for (const auto& [k, c] : terms_)
            if (total_degree(k) <= new_cutoff) out.terms_[k] = c;
        return out;
    }

    /// Move all exponents of one slot onto another (which must be unused).
    Jet renamed(JVar from, JVar to) const {
        int f = static_cast<int>(from), t = static_cast<int>(to);
        if (f == t) return *this;
        if (mask_ & (1u << t)) throw std::logic_error("jet rename: target slot in use");
        Jet out(cutoff_, (mask_ & ~(1u << f)));
        for (const auto& [k, c] : terms_) {
            ExpKey nk = k;
            nk[t] = nk[f];
            nk[f] = 0;
            out.set(nk, c);
        }
        return out;
    }

    Jet conj() const {
        unsigned m = mask_ & ~3u;
        if (mask_ & 1u) m |= 2u;
        if (mask_ & 2u) m |= 1u;
        Jet out(cutoff_, m);
        for (const auto& [k, c] : terms_) out.terms_[{k[1], k[0], k[2], k[3]}] = c.conj();
        return out;
    }

    /// coeff(a,b,c,d) == conj(coeff(b,a,c,d)) for every stored exponent.
    bool is_real() const {
        for (const auto& [k, c] : terms_)
            if (coeff({k[1], k[0], k[2], k[3]}) != c.conj()) return false;
        return true;
    }

    friend Jet operator+(const Jet& x, const Jet& y) {
        Jet out(std::min(x.cutoff_, y.cutoff_), x.mask_ | y.mask_);
        for (const auto& [k, c] : x.terms_) out.accumulate(k, c);
        for (const auto& [k, c] : y.terms_) out.accumulate(k, c);
        return out;
    }

    friend Jet operator-(const Jet& x, const Jet& y) {
        Jet out(std::min(x.cutoff_, y.cutoff_), x.mask_ | y.mask_);
        for (const auto& [k, c] : x.terms_) out.accumulate(k, c);
        for (const auto& [k, c] : y.terms_) out.accumulate(k, -c);
        return out;
    }

    friend Jet operator-(const Jet& x) {
        Jet out(x.cutoff_, x.mask_);
        for (const auto& [k, c] : x.terms_) out.terms_[k] = -c;
        return out;
    }

    friend Jet operator*(const Jet& x, const Jet& y) {
        Jet out(std::min(x.cutoff_, y.cutoff_), x.mask_ | y.mask_);
        for (const auto& [kx, cx] : x.terms_) {
            if (total_degree(kx) > out.cutoff_) continue;
            for (const auto& [ky, cy] : y.terms_) {
                ExpKey k{kx[0] + ky[0], kx[1] + ky[1], kx[2] + ky[2], kx[3] + ky[3]};
                if (total_degree(k) > out.cutoff_) continue;
                out.accumulate(k, cx * cy);
            }
        }
        return out;
    }

    friend Jet operator*(const Jet& x, const RatC& s) {
        if (s.is_zero()) return Jet(x.cutoff_, x.mask_);
        Jet out(x.cutoff_, x.mask_);
        for (const auto& [k, c] : x.terms_) out.terms_[k] = c * s;
        return out;
    }

    friend Jet operator*(const RatC& s, const Jet& x) { return x * s; }

    friend bool operator==(const Jet& x, const Jet& y) {
        return x.cutoff_ == y.cutoff_ && x.terms_ == y.terms_;
    }
    friend bool operator!=(const Jet& x, const Jet& y) { return !(x == y); }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [k, c] : terms_) {
            if (!first) out += " + ";
            first = false;
            out += "(" + ratc_string(c) + ")";
            for (int i = 0; i < 4; ++i) {
                if (k[i] == 0) continue;
                out += "*";
                out += jvar_name(i);
                if (k[i] > 1) out += "^" + std::to_string(k[i]);
            }
        }
        return out;
    }

private:
    int cutoff_ = 0;
    unsigned mask_ = 0;
    std::map<ExpKey, RatC> terms_;
};

inline void require_same_cutoff(const Jet& x, const Jet& y) {
    if (x.cutoff() != y.cutoff()) throw CutoffMismatch(x.cutoff(), y.cutoff());
}

inline VanishingOrder vanishing_order(const Jet& x) {
    if (x.is_zero()) return {false, x.cutoff() + 1};
    int best = x.cutoff() + 1;
    for (const auto& [k, c] : x.terms()) best = std::min(best, total_degree(k));
    return {true, best};
}

inline Jet real_part(const Jet& x) { return (x + x.conj()) * RatC(Rat(1, 2)); }

inline Jet imag_part(const Jet& x) { return (x - x.conj()) * RatC(Rat(0), Rat(-1, 2)); }

inline Jet jet_pow(const Jet& x, int n) {
    if (n < 0) throw std::domain_error("jet_pow: negative exponent");
    Jet acc = Jet::constant(x.cutoff(), RatC(1));
    for (int k = 0; k < n; ++k) acc = acc * x;
    return acc;
}

/// Multiplicative inverse up to the cutoff; requires a nonzero constant term.
inline Jet invert(const Jet& x) {
    RatC c0 = x.constant_term();
    if (c0.is_zero()) throw NotInvertible();
    RatC inv_c0 = RatC(1) / c0;
    Jet u = x * inv_c0 - Jet::constant(x.cutoff(), RatC(1));  // vanishing order >= 1
    Jet acc = Jet::constant(x.cutoff(), RatC(1));
    Jet pw = Jet::constant(x.cutoff(), RatC(1));
    for (int k = 1; k <= x.cutoff(); ++k) {
        pw = pw * u;
        if (pw.is_zero()) break;
        acc = (k % 2 == 1) ? acc - pw : acc + pw;
    }
    return acc * inv_c0;
}

/// Substitute series (each with zero constant term) for selected variables.
/// Unsubstituted variables pass through unchanged. The result cutoff is the
/// minimum of the input cutoff and all substituted-series cutoffs.
inline Jet substitute(const Jet& x, const std::array<std::optional<Jet>, 4>& subs) {
    int cutoff = x.cutoff();
    for (int i = 0; i < 4; ++i) {
        if (!subs[i]) continue;
        if (!subs[i]->constant_term().is_zero()) throw NonzeroConstantTerm();
        cutoff = std::min(cutoff, subs[i]->cutoff());
    }

    std::array<std::vector<Jet>, 4> powers;
    const auto power = [&](int var, int e) -> const Jet& {
        auto& table = powers[var];
        if (table.empty()) {
            table.push_back(Jet::constant(cutoff, RatC(1)));
            Jet base = subs[var] ? subs[var]->truncated(cutoff)
                                 : Jet::variable(static_cast<JVar>(var), cutoff);
            table.push_back(std::move(base));
        }
        while (static_cast<int>(table.size()) <= e) table.push_back(table.back() * table[1]);
        return table[e];
    };

    Jet out(cutoff);
    for (const auto& [k, c] : x.terms()) {
        // substituted series have order >= 1, so a term of total degree d
        // only contributes at orders >= d.
        if (total_degree(k) > cutoff) continue;
        Jet term = Jet::constant(cutoff, c);
        for (int i = 0; i < 4; ++i) {
            if (k[i] == 0) continue;
            term = term * power(i, k[i]);
            if (term.is_zero()) break;
        }
        out = out + term;
    }
    return out;
}

/// Compose a univariate series in t with an arbitrary inner series.
/// The outer cutoff must dominate the inner cutoff; the result carries the
/// inner cutoff.
inline Jet compose(const Jet& outer, const Jet& inner) {
    if (outer.mask() & ~(1u << static_cast<int>(JVar::T)))
        throw std::domain_error("compose: outer jet must be univariate in t");
    if (!inner.constant_term().is_zero()) throw NonzeroConstantTerm();
    if (outer.cutoff() < inner.cutoff()) throw CutoffMismatch(outer.cutoff(), inner.cutoff());
    std::array<std::optional<Jet>, 4> subs;
    subs[static_cast<int>(JVar::T)] = inner;
    return substitute(outer, subs);
}

/// Formal partial derivative with respect to one slot; cutoff drops by one.
inline Jet wirtinger_jet(const Jet& x, JVar which) {
    int slot = static_cast<int>(which);
    Jet out(std::max(0, x.cutoff() - 1));
    for (const auto& [k, c] : x.terms()) {
        if (k[slot] == 0) continue;
        ExpKey nk = k;
        nk[slot] -= 1;
        out.accumulate(nk, c * RatC(k[slot]));
    }
    return out;
}

}  // namespace crgerm

#pragma once

// Holomorphic polynomial vector fields H = h1 d/dz1 + h2 d/dz2 vanishing at
// the origin. Components are stored as coefficient maps (j,k) -> c for the
// monomial z1^j z2^k; a small parser accepts closed forms like "z1*z2^2".

#include "crgerm/expr.hpp"
#include "crgerm/jet.hpp"

#include <map>
#include <string>
#include <utility>

namespace crgerm {

using PolyMap = std::map<std::pair<int, int>, RatC>;

struct VectorField {
    PolyMap h1, h2;

    static VectorField make(PolyMap h1, PolyMap h2) {
        for (const PolyMap* h : {&h1, &h2})
            if (h->count({0, 0}))
                throw Error("vector field must vanish at the origin (constant term forbidden)");
        return VectorField{std::move(h1), std::move(h2)};
    }

    /// i beta z2 d/dz2 — the rotation family of the classification theorem.
    static VectorField rotation(Rat beta = Rat(1)) {
        PolyMap h2;
        h2[{0, 1}] = RatC(Rat(0), beta);
        return VectorField{{}, std::move(h2)};
    }

    int degree() const {
        int d = 0;
        for (const PolyMap* h : {&h1, &h2})
            for (const auto& [jk, c] : *h) d = std::max(d, jk.first + jk.second);
        return d;
    }

    bool is_zero() const { return h1.empty() && h2.empty(); }
};

inline Complex eval_poly(const PolyMap& h, Complex z1, Complex z2) {
    Complex acc(0.0, 0.0);
    for (const auto& [jk, c] : h)
        acc += c.to_complex() * pow_complex(z1, jk.first) * pow_complex(z2, jk.second);
    return acc;
}

/// Exact jet of h(X, z) with a jet X (vanishing at 0) substituted for z1 and
/// the jet variable z standing in for z2.
inline Jet poly_on_jets(const PolyMap& h, const Jet& X, int cutoff) {
    Jet x = X.truncated(cutoff);
    std::vector<Jet> xpow{Jet::constant(cutoff, RatC(1))};
    Jet out(cutoff);
    for (const auto& [jk, c] : h) {
        while (static_cast<int>(xpow.size()) <= jk.first) xpow.push_back(xpow.back() * x);
        out = out + xpow[jk.first] * Jet::monomial({jk.second, 0, 0, 0}, c, cutoff);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser for polynomial components in z1, z2 (grammar mirrors the scalar DSL
// minus functions; division only by constants).
// ---------------------------------------------------------------------------

namespace detail {

class FieldParser {
public:
    explicit FieldParser(std::string src) : src_(std::move(src)) {}

    PolyMap run() {
        PolyMap p = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected trailing input");
        for (auto it = p.begin(); it != p.end();)
            it = it->second.is_zero() ? p.erase(it) : std::next(it);
        return p;
    }

private:
    std::string src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(msg, pos_ + 1); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
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

    static PolyMap add(const PolyMap& a, const PolyMap& b, int sign) {
        PolyMap out = a;
        for (const auto& [jk, c] : b) {
            RatC v = out.count(jk) ? out[jk] : RatC(0);
            v += sign > 0 ? c : -c;
            if (v.is_zero())
                out.erase(jk);
            else
                out[jk] = v;
        }
        return out;
    }

    static PolyMap mul(const PolyMap& a, const PolyMap& b) {
        PolyMap out;
        for (const auto& [jka, ca] : a)
            for (const auto& [jkb, cb] : b) {
                std::pair<int, int> jk{jka.first + jkb.first, jka.second + jkb.second};
                RatC v = (out.count(jk) ? out[jk] : RatC(0)) + ca * cb;
                if (v.is_zero())
                    out.erase(jk);
                else
                    out[jk] = v;
            }
        return out;
    }

    PolyMap parse_expr() {
        PolyMap left = parse_term();
        for (;;) {
            char c = peek();
            if (c == '+') {
                ++pos_;
                left = add(left, parse_term(), +1);
            } else if (c == '-') {
                ++pos_;
                left = add(left, parse_term(), -1);
            } else {
                return left;
            }
        }
    }

    PolyMap parse_term() {
        PolyMap left = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                left = mul(left, parse_factor());
            } else if (c == '/') {
                ++pos_;
                PolyMap rhs = parse_factor();
                if (rhs.size() != 1 || rhs.begin()->first != std::pair<int, int>{0, 0} ||
                    rhs.begin()->second.is_zero())
                    fail("division only by nonzero constants");
                RatC inv = RatC(1) / rhs.begin()->second;
                PolyMap scaled;
                for (const auto& [jk, c2] : left) scaled[jk] = c2 * inv;
                left = scaled;
            } else {
                return left;
            }
        }
    }

    PolyMap parse_factor() {
        PolyMap base = parse_atom();
        if (peek() == '^') {
            ++pos_;
            skip_ws();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                fail("expected nonnegative integer exponent");
            int e = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                e = e * 10 + (src_[pos_] - '0');
                if (e > 64) fail("exponent too large");
                ++pos_;
            }
            PolyMap acc;
            acc[{0, 0}] = RatC(1);
            for (int k = 0; k < e; ++k) acc = mul(acc, base);
            return acc;
        }
        return base;
    }

    PolyMap parse_atom() {
        char c = peek();
        PolyMap out;
        if (c == '(') {
            ++pos_;
            out = parse_expr();
            if (!match(')')) fail("expected ')'");
            return out;
        }
        if (c == '-') {
            ++pos_;
            PolyMap inner = parse_factor();
            PolyMap negated;
            for (const auto& [jk, cc] : inner) negated[jk] = -cc;
            return negated;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
                ++pos_;
            out[{0, 0}] = RatC(rat_parse(src_.substr(start, pos_ - start)));
            return out;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
            std::string name = src_.substr(start, pos_ - start);
            if (name == "i") {
                out[{0, 0}] = RatC::unit_i();
            } else if (name == "z1") {
                out[{1, 0}] = RatC(1);
            } else if (name == "z2") {
                out[{0, 1}] = RatC(1);
            } else {
                throw UnknownIdentifier(name, start + 1);
            }
            return out;
        }
        fail("expected number, z1, z2, i, or '('");
    }
};

}  // namespace detail

inline PolyMap parse_field_component(const std::string& source) {
    return detail::FieldParser(source).run();
}

/// "h1 ; h2" with each side in the polynomial grammar over z1, z2.
inline VectorField parse_field(const std::string& source) {
    auto semi = source.find(';');
    if (semi == std::string::npos)
        throw SyntaxError("expected 'h1 ; h2' with a semicolon separator", 1);
    return VectorField::make(parse_field_component(source.substr(0, semi)),
                             parse_field_component(source.substr(semi + 1)));
}

inline std::string field_component_string(const PolyMap& h) {
    if (h.empty()) return "0";
    std::string out;
    for (const auto& [jk, c] : h) {
        if (!out.empty()) out += " + ";
        out += "(" + ratc_string(c) + ")";
        if (jk.first > 0) out += "*z1" + (jk.first > 1 ? "^" + std::to_string(jk.first) : "");
        if (jk.second > 0) out += "*z2" + (jk.second > 1 ? "^" + std::to_string(jk.second) : "");
    }
    return out;
}

}  // namespace crgerm

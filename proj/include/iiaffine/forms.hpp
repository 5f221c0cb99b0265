#pragma once

#include <bit>
#include <cctype>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iiaffine/errors.hpp"
#include "iiaffine/linalg.hpp"
#include "iiaffine/rational.hpp"

namespace iiaffine::forms {

/// Gaussian rational a + b i.
struct GaussRat {
    Rational re, im;

    GaussRat() = default;
    GaussRat(Rational r) : re(std::move(r)) {}
    GaussRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    static GaussRat i() { return GaussRat(Rational(0), Rational(1)); }

    bool is_zero() const { return re.is_zero() && im.is_zero(); }
    GaussRat conj() const { return GaussRat(re, -im); }

    GaussRat operator-() const { return GaussRat(-re, -im); }
    friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
        return GaussRat(a.re + b.re, a.im + b.im);
    }
    friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
        return GaussRat(a.re - b.re, a.im - b.im);
    }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        return GaussRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }

    std::string str() const {
        if (im.is_zero()) return re.str();
        std::string s = "(" + re.str();
        s += im.sign() < 0 ? "-" : "+";
        s += abs(im).str() + "i)";
        return s;
    }
};

/// Exact number of the algebra: a finite Laurent sum over powers of the
/// formal unit (2 pi i) with Gaussian rational amplitudes.
class ExactScalar {
  public:
    ExactScalar() = default;
    ExactScalar(Rational r) { add(0, GaussRat(std::move(r))); }
    ExactScalar(GaussRat g) { add(0, std::move(g)); }
    static ExactScalar unit(int tau_power, GaussRat amp = GaussRat(Rational(1))) {
        ExactScalar s;
        s.add(tau_power, std::move(amp));
        return s;
    }

    void add(int tau, GaussRat amp) {
        if (amp.is_zero()) return;
        auto [it, fresh] = terms_.try_emplace(tau, amp);
        if (!fresh) {
            it->second = it->second + amp;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool is_zero() const { return terms_.empty(); }
    const std::map<int, GaussRat>& terms() const { return terms_; }

    friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
        ExactScalar r = a;
        for (const auto& [tau, amp] : b.terms_) r.add(tau, amp);
        return r;
    }
    friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
        ExactScalar r = a;
        for (const auto& [tau, amp] : b.terms_) r.add(tau, -amp);
        return r;
    }
    friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
        ExactScalar r;
        for (const auto& [ta, va] : a.terms_)
            for (const auto& [tb, vb] : b.terms_) r.add(ta + tb, va * vb);
        return r;
    }
    friend bool operator==(const ExactScalar& a, const ExactScalar& b) {
        return a.terms_ == b.terms_;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        bool first = true;
        for (const auto& [tau, amp] : terms_) {
            if (!first) s += " + ";
            first = false;
            s += amp.str();
            if (tau != 0) {
                s += "*(2pi*i)";
                if (tau != 1) s += "^" + std::to_string(tau);
            }
        }
        return s;
    }

  private:
    std::map<int, GaussRat> terms_;
};

enum class BaseKind { OpenDomain, Torus };

/**
 * Coordinate layout for forms: n base coordinates then n fibre coordinates.
 * Base coordinates carry polynomials when the base is an open domain and
 * Fourier modes when it is a torus; fibre coordinates always carry Fourier
 * modes.
 */
struct Ambient {
    std::size_t n = 0;
    BaseKind base = BaseKind::OpenDomain;

    std::size_t coords() const { return 2 * n; }
    bool base_periodic() const { return base == BaseKind::Torus; }
    std::uint32_t base_mask() const { return (std::uint32_t{1} << n) - 1; }
    std::uint32_t fibre_mask() const { return base_mask() << n; }
    std::uint32_t full_mask() const { return base_mask() | fibre_mask(); }

    friend bool operator==(const Ambient&, const Ambient&) = default;
};

/// Monomial-Fourier key of one coefficient term:
/// (2 pi i)^tau * x^xexp * e^{2 pi i <freq, coords>}.
struct TermKey {
    int tau = 0;
    std::vector<unsigned> xexp; // size n, base coordinates only
    std::vector<long> freq;     // size 2n

    friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

/// Parity of moving the legs of `b` into the legs of `a` (disjoint masks).
inline int merge_sign(std::uint32_t a, std::uint32_t b) {
    int inversions = 0;
    for (std::uint32_t m = b; m; m &= m - 1) {
        const int bit = std::countr_zero(m);
        inversions += std::popcount(a >> (bit + 1));
    }
    return inversions % 2 == 0 ? 1 : -1;
}

namespace detail {

inline long to_long(const Rational& r) {
    if (!r.is_integer() || !r.num().fits_slong_p())
        throw PreconditionError("value is not a small integer: " + r.str());
    return r.num().get_si();
}

/// Exact value of e^{2 pi i p} for quarter-integer p; anything else leaves
/// the Gaussian rationals.
inline GaussRat quarter_phase(const Rational& p) {
    const Rational r4 = Rational(4) * p;
    if (!r4.is_integer())
        throw PreconditionError("cycle phase " + p.str() + " is not a quarter integer");
    long m = mpz_class(r4.num() % 4).get_si();
    if (m < 0) m += 4;
    switch (m) {
        case 0: return GaussRat(Rational(1));
        case 1: return GaussRat::i();
        case 2: return GaussRat(Rational(-1));
        default: return GaussRat(Rational(0), Rational(-1));
    }
}

} // namespace detail

/// Product subtorus cycle: integrate over the coordinates in `coords`,
/// freeze the rest at `basepoint` (angles for periodic coordinates).
struct Cycle {
    std::uint32_t coords = 0;
    std::vector<Rational> basepoint; // size 2n; empty means the origin
};

/**
 * Differential form on (base x T^n) with coefficients that are exact
 * polynomial-Fourier sums. Components are indexed by leg bitmasks over the
 * 2n coordinates (ascending coordinate order).
 */
class Form {
  public:
    /// Degrees above 2n are allowed; such forms are identically zero.
    Form(Ambient amb, unsigned degree) : amb_(amb), deg_(degree) {
        if (amb.n == 0) throw ShapeError("form: ambient dimension must be positive");
    }

    static Form zero(Ambient amb, unsigned degree) { return Form(amb, degree); }

    static Form constant(Ambient amb, GaussRat value) {
        Form f(amb, 0);
        f.add_term(0, TermKey{0, std::vector<unsigned>(amb.n, 0),
                              std::vector<long>(amb.coords(), 0)},
                   std::move(value));
        return f;
    }

    /// du_c for global coordinate index c (base: 0..n-1, fibre: n..2n-1).
    static Form coordinate_diff(Ambient amb, std::size_t c) {
        Form f(amb, 1);
        if (c >= amb.coords()) throw ShapeError("coordinate index out of range");
        f.add_term(std::uint32_t{1} << c,
                   TermKey{0, std::vector<unsigned>(amb.n, 0),
                           std::vector<long>(amb.coords(), 0)},
                   GaussRat(Rational(1)));
        return f;
    }
    static Form dx(Ambient amb, std::size_t j) { return coordinate_diff(amb, j); }
    static Form dy(Ambient amb, std::size_t j) { return coordinate_diff(amb, amb.n + j); }

    /// Single checked term: amp * (2 pi i)^key.tau * x^key.xexp * e(key.freq) du_mask.
    static Form term(Ambient amb, std::uint32_t mask, TermKey key, GaussRat amp) {
        Form f(amb, static_cast<unsigned>(std::popcount(mask)));
        f.add_term(mask, std::move(key), std::move(amp));
        return f;
    }

    /// The top fibre form dy_1 ^ ... ^ dy_n on the torus ambient.
    static Form dy_top(std::size_t n) {
        const Ambient amb{n, BaseKind::Torus};
        Form f(amb, static_cast<unsigned>(n));
        f.add_term(amb.fibre_mask(),
                   TermKey{0, std::vector<unsigned>(n, 0), std::vector<long>(2 * n, 0)},
                   GaussRat(Rational(1)));
        return f;
    }

    /// The standard symplectic form sum dx_j ^ dt_j on the open-domain model.
    static Form standard_symplectic(std::size_t n) {
        const Ambient amb{n, BaseKind::OpenDomain};
        Form f(amb, 2);
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint32_t mask = (std::uint32_t{1} << j) | (std::uint32_t{1} << (n + j));
            f.add_term(mask, TermKey{0, std::vector<unsigned>(n, 0), std::vector<long>(2 * n, 0)},
                       GaussRat(Rational(1)));
        }
        return f;
    }

    const Ambient& ambient() const { return amb_; }
    unsigned degree() const { return deg_; }
    bool is_zero() const { return comps_.empty(); }
    const std::map<std::uint32_t, std::map<TermKey, GaussRat>>& components() const {
        return comps_;
    }

    void add_term(std::uint32_t mask, TermKey key, GaussRat amp) {
        validate_key(key);
        if (static_cast<unsigned>(std::popcount(mask)) != deg_)
            throw ShapeError("form term: leg count does not match degree");
        if (mask & ~amb_.full_mask()) throw ShapeError("form term: leg outside ambient");
        if (amp.is_zero()) return;
        auto& terms = comps_[mask];
        auto [it, fresh] = terms.try_emplace(key, amp);
        if (!fresh) {
            it->second = it->second + amp;
            if (it->second.is_zero()) {
                terms.erase(it);
                if (terms.empty()) comps_.erase(mask);
            }
        }
    }

    Form operator-() const {
        Form r(amb_, deg_);
        for (const auto& [mask, terms] : comps_)
            for (const auto& [key, amp] : terms) r.add_term(mask, key, -amp);
        return r;
    }

    friend Form operator+(const Form& a, const Form& b) {
        if (a.amb_ != b.amb_ || a.deg_ != b.deg_)
            throw ShapeError("form addition: mismatched ambient or degree");
        Form r = a;
        for (const auto& [mask, terms] : b.comps_)
            for (const auto& [key, amp] : terms) r.add_term(mask, key, amp);
        return r;
    }
    friend Form operator-(const Form& a, const Form& b) { return a + (-b); }

    friend Form operator*(const GaussRat& c, const Form& f) {
        Form r(f.amb_, f.deg_);
        for (const auto& [mask, terms] : f.comps_)
            for (const auto& [key, amp] : terms) r.add_term(mask, key, c * amp);
        return r;
    }
    friend Form operator*(const Rational& c, const Form& f) { return GaussRat(c) * f; }

    friend bool operator==(const Form& a, const Form& b) {
        return a.amb_ == b.amb_ && a.deg_ == b.deg_ && a.comps_ == b.comps_;
    }

    /// Exterior derivative.
    Form d() const {
        Form r(amb_, deg_ + 1);
        for (const auto& [mask, terms] : comps_) {
            for (const auto& [key, amp] : terms) {
                for (std::size_t c = 0; c < amb_.coords(); ++c) {
                    const std::uint32_t leg = std::uint32_t{1} << c;
                    if (mask & leg) continue;
                    const int sign = std::popcount(mask & (leg - 1)) % 2 == 0 ? 1 : -1;
                    const GaussRat signed_amp =
                        sign > 0 ? amp : -amp;
                    // polynomial part (open-domain base coordinates)
                    if (c < amb_.n && !amb_.base_periodic()) {
                        if (key.xexp[c] > 0) {
                            TermKey k2 = key;
                            k2.xexp[c] -= 1;
                            r.add_term(mask | leg, std::move(k2),
                                       GaussRat(Rational(static_cast<long>(key.xexp[c]))) *
                                           signed_amp);
                        }
                    }
                    // Fourier part: d e^{2 pi i k u} = (2 pi i) k e^{...} du
                    if (key.freq[c] != 0) {
                        TermKey k2 = key;
                        k2.tau += 1;
                        r.add_term(mask | leg, std::move(k2),
                                   GaussRat(Rational(key.freq[c])) * signed_amp);
                    }
                }
            }
        }
        return r;
    }

    /// Projection onto the fibre-invariant part: kills every term with a
    /// nonzero fibre frequency.
    Form average() const {
        Form r(amb_, deg_);
        for (const auto& [mask, terms] : comps_)
            for (const auto& [key, amp] : terms) {
                bool moving = false;
                for (std::size_t j = amb_.n; j < amb_.coords(); ++j)
                    if (key.freq[j] != 0) {
                        moving = true;
                        break;
                    }
                if (!moving) r.add_term(mask, key, amp);
            }
        return r;
    }

    bool is_invariant() const { return *this == average(); }
    bool is_closed() const { return d().is_zero(); }

    /// Fibre integration: keeps the full-dy components with zero fibre
    /// frequency and strips the fibre legs.
    Form integrate_fibre() const {
        if (deg_ < amb_.n) return Form(amb_, 0); // no full fibre components possible
        Form r(amb_, deg_ - static_cast<unsigned>(amb_.n));
        const std::uint32_t fm = amb_.fibre_mask();
        for (const auto& [mask, terms] : comps_) {
            if ((mask & fm) != fm) continue;
            for (const auto& [key, amp] : terms) {
                bool moving = false;
                for (std::size_t j = amb_.n; j < amb_.coords(); ++j)
                    if (key.freq[j] != 0) {
                        moving = true;
                        break;
                    }
                if (!moving) r.add_term(mask & ~fm, key, amp);
            }
        }
        return r;
    }

    /**
     * Pullback along the section x -> (x, [Sx]): substitutes dy -> S dx and
     * y -> Sx in the coefficients. S must be integral whenever a nonzero
     * fibre frequency has to be pushed into the base.
     */
    Form pullback_section(const RMatrix& s) const {
        if (!s.is_square() || s.rows() != amb_.n)
            throw ShapeError("pullback_section: S must be n x n");
        Form r(amb_, deg_);
        for (const auto& [mask, terms] : comps_) {
            // legs factor: base legs stay, each dy_j becomes sum_k S_jk dx_k
            Form legs = Form::constant(amb_, GaussRat(Rational(1)));
            for (std::uint32_t m = mask; m; m &= m - 1) {
                const std::size_t c = static_cast<std::size_t>(std::countr_zero(m));
                if (c < amb_.n) {
                    legs = wedge(legs, coordinate_diff(amb_, c));
                } else {
                    const std::size_t j = c - amb_.n;
                    Form w(amb_, 1);
                    for (std::size_t k = 0; k < amb_.n; ++k) {
                        if (s(j, k).is_zero()) continue;
                        w = w + GaussRat(s(j, k)) * coordinate_diff(amb_, k);
                    }
                    legs = wedge(legs, w);
                }
            }
            for (const auto& [key, amp] : terms) {
                TermKey k2 = key;
                for (std::size_t j = 0; j < amb_.n; ++j) {
                    const long kj = key.freq[amb_.n + j];
                    k2.freq[amb_.n + j] = 0;
                    if (kj == 0) continue;
                    for (std::size_t i = 0; i < amb_.n; ++i) {
                        const long sji = detail::to_long(s(j, i));
                        k2.freq[i] += sji * kj;
                    }
                }
                if (!amb_.base_periodic())
                    for (std::size_t i = 0; i < amb_.n; ++i)
                        if (k2.freq[i] != 0)
                            throw PreconditionError(
                                "pullback_section: base frequencies need a torus base");
                Form piece = Form(amb_, 0);
                piece.add_term(0, std::move(k2), amp);
                r = r + wedge(piece, legs);
            }
        }
        return r;
    }

    /**
     * Period over a product subtorus: integrates the coordinates in
     * cycle.coords over one full turn each and freezes the remaining
     * coordinates at the cycle basepoint. The frozen phases must be quarter
     * integers so the value stays Gaussian rational.
     */
    ExactScalar period(const Cycle& cycle) const {
        if (static_cast<unsigned>(std::popcount(cycle.coords)) != deg_)
            throw ShapeError("period: cycle dimension must equal the form degree");
        if (cycle.coords & ~amb_.full_mask()) throw ShapeError("period: cycle leg out of range");
        std::vector<Rational> base = cycle.basepoint;
        if (base.empty()) base.assign(amb_.coords(), Rational(0));
        if (base.size() != amb_.coords())
            throw ShapeError("period: basepoint dimension mismatch");
        if (!amb_.base_periodic())
            for (std::size_t c = 0; c < amb_.n; ++c)
                if (cycle.coords & (std::uint32_t{1} << c))
                    throw PreconditionError("period: open-domain base coordinates do not close");

        ExactScalar total;
        const auto it = comps_.find(cycle.coords);
        if (it == comps_.end()) return total;
        for (const auto& [key, amp] : it->second) {
            bool vanishes = false;
            GaussRat factor = amp;
            Rational frozen_phase(0);
            for (std::size_t c = 0; c < amb_.coords(); ++c) {
                const bool integrated = cycle.coords & (std::uint32_t{1} << c);
                if (integrated) {
                    if (key.freq[c] != 0) { // one full turn of a nonzero mode
                        vanishes = true;
                        break;
                    }
                } else {
                    if (key.freq[c] != 0) frozen_phase += Rational(key.freq[c]) * base[c];
                }
                if (c < amb_.n && !amb_.base_periodic() && key.xexp[c] > 0)
                    factor = factor * GaussRat(pow(base[c], key.xexp[c]));
            }
            if (vanishes) continue;
            factor = factor * detail::quarter_phase(frozen_phase.mod_one());
            ExactScalar contrib = ExactScalar::unit(key.tau, factor);
            total = total + contrib;
        }
        return total;
    }

    /// Total integral over the closed ambient (torus base required).
    ExactScalar total_integral() const {
        if (!amb_.base_periodic())
            throw PreconditionError("total_integral: torus base required");
        if (deg_ != amb_.coords())
            throw ShapeError("total_integral: form is not top degree");
        return period(Cycle{amb_.full_mask(), {}});
    }

    std::string str() const;

    static Form parse(Ambient amb, const std::string& text);

  private:
    void validate_key(const TermKey& key) const {
        if (key.xexp.size() != amb_.n || key.freq.size() != amb_.coords())
            throw ShapeError("form term: key sized for a different ambient");
        if (amb_.base_periodic()) {
            for (unsigned e : key.xexp)
                if (e != 0)
                    throw PreconditionError("form term: polynomials need an open-domain base");
        } else {
            for (std::size_t c = 0; c < amb_.n; ++c)
                if (key.freq[c] != 0)
                    throw PreconditionError(
                        "form term: base Fourier modes need a torus base");
        }
    }

    friend Form wedge(const Form& a, const Form& b);

    Ambient amb_;
    unsigned deg_;
    std::map<std::uint32_t, std::map<TermKey, GaussRat>> comps_;
};

namespace detail {

inline std::string legs_str(std::uint32_t mask, std::size_t n) {
    std::string s;
    for (std::uint32_t m = mask; m; m &= m - 1) {
        const std::size_t c = static_cast<std::size_t>(std::countr_zero(m));
        if (!s.empty()) s += "^";
        s += c < n ? "dx" + std::to_string(c + 1) : "dy" + std::to_string(c - n + 1);
    }
    return s;
}

} // namespace detail

inline std::string Form::str() const {
    if (comps_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mask, terms] : comps_) {
        for (const auto& [key, amp] : terms) {
            if (!first) out += " + ";
            first = false;
            std::vector<std::string> factors;
            bool any_freq = false;
            for (long f : key.freq) any_freq |= f != 0;
            bool any_exp = false;
            for (unsigned e : key.xexp) any_exp |= e != 0;
            const bool others = key.tau != 0 || any_freq || any_exp;
            if (!(others && amp == GaussRat(Rational(1)))) factors.push_back(amp.str());
            if (key.tau != 0) {
                std::string u = "(2pi*i)";
                if (key.tau != 1) u += "^" + std::to_string(key.tau);
                factors.push_back(std::move(u));
            }
            for (std::size_t i = 0; i < amb_.n; ++i) {
                if (key.xexp[i] == 0) continue;
                std::string x = "x" + std::to_string(i + 1);
                if (key.xexp[i] != 1) x += "^" + std::to_string(key.xexp[i]);
                factors.push_back(std::move(x));
            }
            if (any_freq) {
                std::string e = "e(";
                for (std::size_t i = 0; i < amb_.n; ++i) {
                    if (i) e += ",";
                    e += std::to_string(key.freq[i]);
                }
                e += "|";
                for (std::size_t i = 0; i < amb_.n; ++i) {
                    if (i) e += ",";
                    e += std::to_string(key.freq[amb_.n + i]);
                }
                e += ")";
                factors.push_back(std::move(e));
            }
            std::string term;
            for (std::size_t i = 0; i < factors.size(); ++i) {
                if (i) term += "*";
                term += factors[i];
            }
            if (mask) term += " " + detail::legs_str(mask, amb_.n);
            out += term;
        }
    }
    return out;
}

namespace detail {

inline std::vector<std::string> split_factors(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == '*' && depth == 0) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline GaussRat parse_amplitude(const std::string& s) {
    if (s.empty()) throw ParseError("empty amplitude");
    if (s.front() != '(') return GaussRat(Rational::parse(s));
    if (s.back() != ')' || s.size() < 4 || s[s.size() - 2] != 'i')
        throw ParseError("malformed complex amplitude '" + s + "'");
    const std::string body = s.substr(1, s.size() - 3); // strip parens and i
    std::size_t sep = std::string::npos;
    for (std::size_t i = 1; i < body.size(); ++i)
        if (body[i] == '+' || body[i] == '-') {
            sep = i;
            break;
        }
    if (sep == std::string::npos) throw ParseError("complex amplitude without separator");
    const Rational re = Rational::parse(body.substr(0, sep));
    Rational im = Rational::parse(body.substr(sep + 1));
    if (body[sep] == '-') im = -im;
    return GaussRat(re, im);
}

inline std::vector<long> parse_freq(const std::string& s, std::size_t n) {
    // body like "k1,..,kn|l1,..,ln"
    std::vector<long> freq;
    std::string cur;
    for (char ch : s) {
        if (ch == ',' || ch == '|') {
            freq.push_back(std::stol(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    freq.push_back(std::stol(cur));
    if (freq.size() != 2 * n) throw ParseError("frequency vector of wrong length");
    return freq;
}

} // namespace detail

inline Form Form::parse(Ambient amb, const std::string& text) {
    try {
        if (text == "0") return Form(amb, 0);
        std::vector<std::string> term_strs;
        std::size_t pos = 0;
        while (true) {
            const std::size_t next = text.find(" + ", pos);
            if (next == std::string::npos) {
                term_strs.push_back(text.substr(pos));
                break;
            }
            term_strs.push_back(text.substr(pos, next - pos));
            pos = next + 3;
        }

        Form result(amb, 0);
        bool degree_known = false;
        for (const auto& term_str : term_strs) {
            const std::size_t space = term_str.find(' ');
            const std::string coeff_str = term_str.substr(0, space);
            std::uint32_t mask = 0;
            if (space != std::string::npos) {
                const std::string legs = term_str.substr(space + 1);
                std::string cur;
                for (std::size_t i = 0; i <= legs.size(); ++i) {
                    if (i == legs.size() || legs[i] == '^') {
                        if (cur.size() < 3) throw ParseError("bad leg '" + cur + "'");
                        const std::size_t idx = std::stoul(cur.substr(2)) - 1;
                        std::size_t c = idx;
                        if (cur[1] == 'y' || cur[1] == 't') c += amb.n;
                        else if (cur[1] != 'x') throw ParseError("bad leg '" + cur + "'");
                        mask |= std::uint32_t{1} << c;
                        cur.clear();
                    } else {
                        cur += legs[i];
                    }
                }
            }
            if (!degree_known) {
                result = Form(amb, static_cast<unsigned>(std::popcount(mask)));
                degree_known = true;
            }

            TermKey key{0, std::vector<unsigned>(amb.n, 0), std::vector<long>(amb.coords(), 0)};
            GaussRat amp(Rational(1));
            for (const auto& factor : detail::split_factors(coeff_str)) {
                if (factor.empty()) throw ParseError("empty factor");
                if (factor.rfind("(2pi*i)", 0) == 0) {
                    key.tau += factor.size() == 7 ? 1 : std::stoi(factor.substr(8));
                } else if (factor[0] == 'x' && factor.size() > 1 && std::isdigit(factor[1])) {
                    const std::size_t caret = factor.find('^');
                    const std::size_t i = std::stoul(factor.substr(1, caret - 1)) - 1;
                    if (i >= amb.n) throw ParseError("coordinate out of range in '" + factor + "'");
                    key.xexp[i] += caret == std::string::npos
                                       ? 1u
                                       : static_cast<unsigned>(std::stoul(factor.substr(caret + 1)));
                } else if (factor[0] == 'e' && factor.size() > 2 && factor[1] == '(') {
                    const auto freq = detail::parse_freq(factor.substr(2, factor.size() - 3), amb.n);
                    for (std::size_t i = 0; i < freq.size(); ++i) key.freq[i] += freq[i];
                } else {
                    amp = amp * detail::parse_amplitude(factor);
                }
            }
            result.add_term(mask, std::move(key), std::move(amp));
        }
        return result;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception& e) {
        throw ParseError(std::string("form parse failed: ") + e.what());
    }
}

/// Graded-commutative product with exact sign bookkeeping.
inline Form wedge(const Form& a, const Form& b) {
    if (a.amb_ != b.amb_) throw ShapeError("wedge: mismatched ambients");
    Form r(a.amb_, a.deg_ + b.deg_);
    for (const auto& [ma, ta] : a.comps_) {
        for (const auto& [mb, tb] : b.comps_) {
            if (ma & mb) continue;
            const int sign = merge_sign(ma, mb);
            for (const auto& [ka, va] : ta) {
                for (const auto& [kb, vb] : tb) {
                    TermKey k;
                    k.tau = ka.tau + kb.tau;
                    k.xexp.resize(a.amb_.n);
                    for (std::size_t i = 0; i < a.amb_.n; ++i)
                        k.xexp[i] = ka.xexp[i] + kb.xexp[i];
                    k.freq.resize(a.amb_.coords());
                    for (std::size_t i = 0; i < a.amb_.coords(); ++i)
                        k.freq[i] = ka.freq[i] + kb.freq[i];
                    GaussRat amp = va * vb;
                    if (sign < 0) amp = -amp;
                    r.add_term(ma | mb, std::move(k), std::move(amp));
                }
            }
        }
    }
    return r;
}

inline Form d(const Form& f) { return f.d(); }
inline Form average(const Form& f) { return f.average(); }
inline Form integrate_fibre(const Form& f) { return f.integrate_fibre(); }
inline Form dy_n(std::size_t n) { return Form::dy_top(n); }
inline Form pullback_section(const Form& alpha, const RMatrix& s) {
    return alpha.pullback_section(s);
}

/**
 * Symbolic pullback of sum dx'_j ^ dt'_j under the affine transition
 * x' = Ax + b, t' = A^{-T} t + Gx + c. Equals the standard symplectic form
 * exactly when A^T G is symmetric, which makes this the independent oracle
 * for the transition classification.
 */
inline Form transition_pullback_symplectic(const RMatrix& a, const RMatrix& g) {
    if (!a.is_square() || a.rows() != g.rows() || g.cols() != a.cols())
        throw ShapeError("transition pullback: inconsistent matrices");
    const std::size_t n = a.rows();
    const Ambient amb{n, BaseKind::OpenDomain};
    const RMatrix ait = inverse(a).transpose();
    Form omega(amb, 2);
    for (std::size_t j = 0; j < n; ++j) {
        Form dxp(amb, 1);
        Form dtp(amb, 1);
        for (std::size_t k = 0; k < n; ++k) {
            if (!a(j, k).is_zero()) dxp = dxp + GaussRat(a(j, k)) * Form::dx(amb, k);
            if (!ait(j, k).is_zero()) dtp = dtp + GaussRat(ait(j, k)) * Form::dy(amb, k);
            if (!g(j, k).is_zero()) dtp = dtp + GaussRat(g(j, k)) * Form::dx(amb, k);
        }
        omega = omega + wedge(dxp, dtp);
    }
    return omega;
}

} // namespace iiaffine::forms

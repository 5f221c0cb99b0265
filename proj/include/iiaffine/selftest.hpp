#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "iiaffine/forms.hpp"

namespace iiaffine::selftest {

using forms::Ambient;
using forms::BaseKind;
using forms::Cycle;
using forms::Form;
using forms::GaussRat;
using forms::TermKey;

struct FormGenOptions {
    unsigned max_terms = 6;
    unsigned max_xdeg = 2;
    long max_freq = 2;
};

inline Form random_form(std::mt19937_64& rng, Ambient amb, unsigned degree,
                        FormGenOptions opts = {}, bool fibre_invariant = false) {
    Form f(amb, degree);
    if (degree > amb.coords()) return f;
    std::uniform_int_distribution<long> freq(-opts.max_freq, opts.max_freq);
    std::uniform_int_distribution<unsigned> xdeg(0, opts.max_xdeg);
    std::uniform_int_distribution<long> num(-4, 4);
    std::uniform_int_distribution<long> den(1, 3);
    std::uniform_int_distribution<unsigned> nterms(1, opts.max_terms);
    const unsigned count = nterms(rng);
    for (unsigned t = 0; t < count; ++t) {
        // random leg mask of the requested degree
        std::uint32_t mask = 0;
        while (std::popcount(mask) < static_cast<int>(degree))
            mask |= std::uint32_t{1} << (rng() % amb.coords());
        TermKey key{0, std::vector<unsigned>(amb.n, 0), std::vector<long>(amb.coords(), 0)};
        for (std::size_t i = 0; i < amb.n; ++i) {
            if (amb.base_periodic())
                key.freq[i] = freq(rng);
            else
                key.xexp[i] = xdeg(rng);
        }
        if (!fibre_invariant)
            for (std::size_t i = amb.n; i < amb.coords(); ++i) key.freq[i] = freq(rng);
        GaussRat amp(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
        if (amp.is_zero()) amp = GaussRat(Rational(1));
        f.add_term(mask, std::move(key), std::move(amp));
    }
    return f;
}

/// Closed k-form: an exact part d(random (k-1)-form) plus a random
/// constant-coefficient harmonic part.
inline Form random_closed_form(std::mt19937_64& rng, Ambient amb, unsigned degree,
                               FormGenOptions opts = {}, bool fibre_invariant = false) {
    Form f(amb, degree);
    if (degree > 0) {
        f = f + random_form(rng, amb, degree - 1, opts, fibre_invariant).d();
    }
    Form harmonic = random_form(rng, amb, degree, opts, true);
    // strip every Fourier mode and monomial: keep the constant-coefficient part
    Form constants(amb, degree);
    const TermKey flat{0, std::vector<unsigned>(amb.n, 0), std::vector<long>(amb.coords(), 0)};
    for (const auto& [mask, terms] : harmonic.components())
        for (const auto& [key, amp] : terms) constants.add_term(mask, flat, amp);
    return f + constants;
}

inline std::vector<Rational> random_quarter_basepoint(std::mt19937_64& rng, std::size_t coords) {
    std::vector<Rational> base(coords);
    for (auto& b : base) b = Rational(static_cast<long>(rng() % 4), 4);
    return base;
}

enum class FaultInjection { None, SignBug };

/// Deliberately broken exterior derivative (drops the leg-ordering sign);
/// only reachable through an explicit fault-injection request, as a negative
/// control proving the identity suites can fail.
inline Form buggy_d(const Form& f) {
    const Ambient amb = f.ambient();
    Form r(amb, f.degree() + 1);
    for (const auto& [mask, terms] : f.components()) {
        for (const auto& [key, amp] : terms) {
            for (std::size_t c = 0; c < amb.coords(); ++c) {
                const std::uint32_t leg = std::uint32_t{1} << c;
                if (mask & leg) continue;
                if (c < amb.n && !amb.base_periodic() && key.xexp[c] > 0) {
                    TermKey k2 = key;
                    k2.xexp[c] -= 1;
                    r.add_term(mask | leg, std::move(k2),
                               GaussRat(Rational(static_cast<long>(key.xexp[c]))) * amp);
                }
                if (key.freq[c] != 0) {
                    TermKey k2 = key;
                    k2.tau += 1;
                    r.add_term(mask | leg, std::move(k2), GaussRat(Rational(key.freq[c])) * amp);
                }
            }
        }
    }
    return r;
}

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string counterexample;

    bool ok() const { return failures == 0; }
};

struct SelftestConfig {
    std::uint64_t seed = 0;
    bool quick = false; // n = 1 only, reduced counts
    FaultInjection fault = FaultInjection::None;
};

namespace detail {

inline Ambient pick_ambient(std::mt19937_64& rng, bool quick) {
    const std::size_t n = quick ? 1 : 1 + rng() % 3;
    const BaseKind kind = rng() % 2 ? BaseKind::Torus : BaseKind::OpenDomain;
    return Ambient{n, kind};
}

inline void record_failure(SuiteResult& res, const Form& witness) {
    ++res.failures;
    if (res.counterexample.empty()) res.counterexample = witness.str();
}

} // namespace detail

inline SuiteResult run_dd_suite(const SelftestConfig& cfg) {
    SuiteResult res{"d∘d = 0", cfg.quick ? 100u : 500u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0xD0D0ULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const Ambient amb = detail::pick_ambient(rng, cfg.quick);
        const unsigned degree = rng() % (amb.coords() + 1);
        const Form f = random_form(rng, amb, degree);
        const Form dd = cfg.fault == FaultInjection::SignBug ? buggy_d(buggy_d(f)) : f.d().d();
        if (!dd.is_zero()) detail::record_failure(res, f);
    }
    return res;
}

inline SuiteResult run_average_commutes_suite(const SelftestConfig& cfg) {
    SuiteResult res{"average(d f) = d(average f)", cfg.quick ? 100u : 500u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0xA7A7ULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const Ambient amb = detail::pick_ambient(rng, cfg.quick);
        const unsigned degree = rng() % amb.coords();
        const Form f = random_form(rng, amb, degree);
        const Form lhs = (cfg.fault == FaultInjection::SignBug ? buggy_d(f) : f.d()).average();
        const Form rhs = cfg.fault == FaultInjection::SignBug ? buggy_d(f.average())
                                                              : f.average().d();
        if (!(lhs == rhs)) detail::record_failure(res, f);
        // idempotence and fixed points while we are here
        if (!(f.average().average() == f.average())) detail::record_failure(res, f);
    }
    return res;
}

inline SuiteResult run_leibniz_suite(const SelftestConfig& cfg) {
    SuiteResult res{"d(f^g) Leibniz", cfg.quick ? 60u : 200u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0x1E1BULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const Ambient amb = detail::pick_ambient(rng, cfg.quick);
        const unsigned p = rng() % (amb.coords() + 1);
        const unsigned q = rng() % (amb.coords() - p + 1);
        const Form f = random_form(rng, amb, p, {3, 2, 2});
        const Form g = random_form(rng, amb, q, {3, 2, 2});
        const Form fg = wedge(f, g);
        const Form lhs = cfg.fault == FaultInjection::SignBug ? buggy_d(fg) : fg.d();
        Form rhs = wedge(f.d(), g);
        const Form fdg = wedge(f, g.d());
        rhs = p % 2 == 0 ? rhs + fdg : rhs - fdg;
        if (!(lhs == rhs)) detail::record_failure(res, f);
    }
    return res;
}

/// Period preservation under averaging for closed forms on the torus
/// ambient: the certificate that averaging preserves the de Rham class.
inline SuiteResult run_period_preservation_suite(const SelftestConfig& cfg) {
    SuiteResult res{"averaging preserves periods of closed forms", cfg.quick ? 30u : 100u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0x9E09ULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const std::size_t n = cfg.quick ? 1 : 1 + rng() % 3;
        const Ambient amb{n, BaseKind::Torus};
        const unsigned k = 1 + rng() % n; // k <= n
        Form alpha = random_closed_form(rng, amb, k);
        const Form averaged =
            cfg.fault == FaultInjection::SignBug && !alpha.is_zero() ? -alpha.average()
                                                                     : alpha.average();
        const auto base0 = std::vector<Rational>(amb.coords(), Rational(0));
        const auto baseq = random_quarter_basepoint(rng, amb.coords());
        bool bad = false;
        for (std::uint32_t mask = 0; mask <= amb.full_mask() && !bad; ++mask) {
            if (std::popcount(mask) != static_cast<int>(k)) continue;
            for (const auto& base : {base0, baseq}) {
                const Cycle cycle{mask, base};
                if (!(alpha.period(cycle) == averaged.period(cycle))) {
                    bad = true;
                    break;
                }
            }
        }
        if (bad) detail::record_failure(res, alpha);
    }
    return res;
}

struct PairingCheck {
    forms::ExactScalar lhs;
    forms::ExactScalar rhs;
    bool equal = false;
};

/// Zero-section pairing: integral of alpha over the zero section against the
/// total integral of alpha ^ dy_top. Requires alpha closed and invariant.
inline PairingCheck poincare_pairing_check(const Form& alpha) {
    const Ambient amb = alpha.ambient();
    if (!amb.base_periodic())
        throw PreconditionError("poincare_pairing_check: torus base required");
    if (alpha.degree() != amb.n)
        throw ShapeError("poincare_pairing_check: form degree must equal n");
    if (!alpha.is_closed()) throw PreconditionError("poincare_pairing_check: form is not closed");
    if (!alpha.is_invariant())
        throw PreconditionError("poincare_pairing_check: form is not invariant; average it first");
    PairingCheck out;
    const Form restricted = alpha.pullback_section(RMatrix::zero(amb.n, amb.n));
    out.lhs = restricted.period(Cycle{amb.base_mask(), {}});
    out.rhs = wedge(alpha, Form::dy_top(amb.n)).total_integral();
    out.equal = out.lhs == out.rhs;
    return out;
}

inline SuiteResult run_poincare_suite(const SelftestConfig& cfg) {
    SuiteResult res{"zero-section Poincare pairing", cfg.quick ? 30u : 100u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0x90CAULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const std::size_t n = cfg.quick ? 1 : 1 + rng() % 3;
        const Ambient amb{n, BaseKind::Torus};
        Form alpha = random_closed_form(rng, amb, static_cast<unsigned>(n), {}, true);
        // seed a harmonic base part so the pairing value is generically nonzero
        alpha = alpha + Form::term(amb, amb.base_mask(),
                                   TermKey{0, std::vector<unsigned>(amb.n, 0),
                                           std::vector<long>(amb.coords(), 0)},
                                   GaussRat(Rational(2, 3)));
        bool equal;
        if (cfg.fault == FaultInjection::SignBug) {
            const auto lhs =
                alpha.pullback_section(RMatrix::zero(amb.n, amb.n)).period(Cycle{amb.base_mask(), {}});
            const auto rhs = wedge(alpha, -Form::dy_top(amb.n)).total_integral();
            equal = lhs == rhs;
        } else {
            equal = poincare_pairing_check(alpha).equal;
        }
        if (!equal) detail::record_failure(res, alpha);
    }
    return res;
}

inline SuiteResult run_serialization_suite(const SelftestConfig& cfg) {
    SuiteResult res{"textual serialization round-trip", cfg.quick ? 50u : 200u, 0, ""};
    std::mt19937_64 rng(cfg.seed ^ 0x5E51ULL);
    for (std::size_t i = 0; i < res.cases; ++i) {
        const Ambient amb = detail::pick_ambient(rng, cfg.quick);
        const unsigned degree = rng() % (amb.coords() + 1);
        Form f = random_form(rng, amb, degree);
        if (cfg.fault == FaultInjection::SignBug) f = f.d(); // still must round-trip
        const Form back = Form::parse(amb, f.str());
        if (!(back == f) && !f.is_zero()) detail::record_failure(res, f);
    }
    return res;
}

inline std::vector<SuiteResult> run_all(const SelftestConfig& cfg) {
    return {
        run_dd_suite(cfg),           run_average_commutes_suite(cfg),
        run_leibniz_suite(cfg),      run_period_preservation_suite(cfg),
        run_poincare_suite(cfg),     run_serialization_suite(cfg),
    };
}

} // namespace iiaffine::selftest

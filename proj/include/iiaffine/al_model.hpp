#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include "iiaffine/affine_map.hpp"
#include "iiaffine/errors.hpp"
#include "iiaffine/polytope.hpp"
#include "iiaffine/quotient.hpp"

namespace iiaffine {

/**
 * Chart transition of Arnol'd-Liouville models restricted to the affine
 * family:
 *     x' = Ax + b,   t' = A^{-T} t + Gx + c   (t mod Z^n).
 * A is expected in GL_n(Z) (required for the torus factor to be well
 * defined); the predicates below treat a violation as a rejection rather
 * than an error.
 */
struct ALTransition {
    RMatrix A;
    RVector b;
    RMatrix G;
    RVector c;

    std::size_t dim() const { return b.dim(); }

    /// The induced map on the base, x -> Ax + b.
    AffineMap base_map() const { return AffineMap(A, b); }

    /// Image of a point (x, t), fibre part reduced mod 1.
    std::pair<RVector, RVector> apply(const RVector& x, const RVector& t) const {
        RVector x2 = A * x + b;
        RVector t2 = inverse(A).transpose() * t + G * x + c;
        for (std::size_t i = 0; i < t2.dim(); ++i) t2[i] = t2[i].mod_one();
        return {std::move(x2), std::move(t2)};
    }
};

/// Composition acting as second after first on (x, t).
inline ALTransition compose(const ALTransition& second, const ALTransition& first) {
    if (second.dim() != first.dim()) throw ShapeError("transition compose: dimension mismatch");
    const RMatrix a2it = inverse(second.A).transpose();
    return ALTransition{
        second.A * first.A,
        second.A * first.b + second.b,
        a2it * first.G + second.G * first.A,
        a2it * first.c + second.G * first.b + second.c,
    };
}

/// True iff the transition preserves the standard symplectic form
/// sum dx_j ^ dt_j: within the affine family this is exactly A in GL_n(Z)
/// together with symmetry of A^T G.
inline bool is_symplectomorphism(const ALTransition& tr) {
    if (!tr.A.is_square() || tr.A.rows() != tr.b.dim() || tr.G.rows() != tr.A.rows() ||
        tr.G.cols() != tr.A.cols() || tr.c.dim() != tr.b.dim())
        throw ShapeError("transition: inconsistent dimensions");
    if (!is_gl_n_z(tr.A)) return false;
    const RMatrix atg = tr.A.transpose() * tr.G;
    return atg == atg.transpose();
}

/// True iff the transition also preserves the prequantization data, which
/// additionally forces the base translation into Z^n.
inline bool is_enhanced_isomorphism(const ALTransition& tr) {
    return is_symplectomorphism(tr) && tr.b.is_integer();
}

/**
 * Enhanced Arnol'd-Liouville model over a base domain Omega: the chart
 * Omega x T^n carrying sum dx_j ^ dt_j and the line bundle with covariant
 * derivative d - 2 pi i sum x_j dt_j (both implicit in the operations).
 */
struct EnhancedALModel {
    Polytope omega_domain;

    std::size_t dim() const { return omega_domain.dim(); }
};

/// Straight loop in the fibre over `basepoint` with homology class
/// sum winding[k] * [gamma_k].
struct FibreLoop {
    RVector basepoint;
    std::vector<long> winding;
};

/// Exact holonomy exponent: <m, x> mod 1, so the holonomy is
/// exp(2 pi i * phase).
inline Rational holonomy_phase(const EnhancedALModel& model, const FibreLoop& loop) {
    if (loop.basepoint.dim() != model.dim() || loop.winding.size() != model.dim())
        throw ShapeError("holonomy: dimension mismatch");
    if (!model.omega_domain.contains(loop.basepoint))
        throw PreconditionError("holonomy: basepoint outside the chart domain");
    Rational phase;
    for (std::size_t k = 0; k < model.dim(); ++k)
        phase += Rational(loop.winding[k]) * loop.basepoint[k];
    return phase.mod_one();
}

inline std::complex<double> holonomy(const EnhancedALModel& model, const FibreLoop& loop) {
    const double arg = 2.0 * std::numbers::pi * holonomy_phase(model, loop).to_double();
    return std::polar(1.0, arg);
}

/**
 * Independent numeric oracle: RK4 integration of the horizontal-lift
 * equation z' = 2 pi i x_k z over one cycle in each t_k direction, then the
 * product over the coordinate cycles of the winding.
 */
inline std::complex<double> holonomy_numeric(const EnhancedALModel& model, const FibreLoop& loop,
                                             std::size_t steps = 10000) {
    if (steps < 2) throw PreconditionError("holonomy_numeric: steps must be >= 2");
    if (loop.basepoint.dim() != model.dim() || loop.winding.size() != model.dim())
        throw ShapeError("holonomy: dimension mismatch");
    const double h = 1.0 / static_cast<double>(steps);
    std::complex<double> total(1.0, 0.0);
    for (std::size_t k = 0; k < model.dim(); ++k) {
        const long m = loop.winding[k];
        if (m == 0) continue;
        const double dir = m > 0 ? 1.0 : -1.0;
        const std::complex<double> lambda(0.0,
                                          2.0 * std::numbers::pi * dir *
                                              loop.basepoint[k].to_double());
        std::complex<double> z(1.0, 0.0);
        for (std::size_t s = 0; s < steps; ++s) {
            const auto k1 = lambda * z;
            const auto k2 = lambda * (z + 0.5 * h * k1);
            const auto k3 = lambda * (z + 0.5 * h * k2);
            const auto k4 = lambda * (z + h * k3);
            z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        for (long rep = 0; rep < std::labs(m); ++rep) total *= z;
    }
    return total;
}

/// A fibre is Bohr-Sommerfeld iff the holonomy is trivial around each of the
/// n generating cycles, i.e. every exponent <e_k, x> vanishes mod 1.
inline bool is_bohr_sommerfeld(const EnhancedALModel& model, const RVector& x) {
    if (x.dim() != model.dim()) throw ShapeError("is_bohr_sommerfeld: dimension mismatch");
    if (!model.omega_domain.contains(x))
        throw PreconditionError("is_bohr_sommerfeld: point outside the chart domain");
    for (std::size_t k = 0; k < model.dim(); ++k) {
        std::vector<long> winding(model.dim(), 0);
        winding[k] = 1;
        if (!holonomy_phase(model, FibreLoop{x, winding}).is_zero()) return false;
    }
    return true;
}

/**
 * Bohr-Sommerfeld points of the prequantized fibration glued over the
 * presentation: chartwise holonomy test over the fundamental domain,
 * deduplicated per Gamma-orbit. Equals integral_points(q) by the holonomy
 * formula.
 */
inline LatticePointSet bohr_sommerfeld_set(const QuotientPresentation& q,
                                           unsigned word_bound = kDefaultWordBound) {
    if (!q.is_integral_integral())
        throw TierError("bohr_sommerfeld_set: presentation is not integral-integral");
    const EnhancedALModel model{q.domain};
    LatticePointSet out;
    const auto [lo, hi] = q.domain.bounding_box();
    detail::for_each_lattice_point(lo, hi, [&](const RVector& p) {
        if (!q.domain.contains(p)) return;
        if (!is_bohr_sommerfeld(model, p)) return;
        out.points.insert(detail::canonical_orbit_rep(q.generators, p, q.domain, word_bound));
    });
    return out;
}

/**
 * For a transition whose base translation is not integral, produces a fibre
 * that is Bohr-Sommerfeld in the source chart but not in the target chart:
 * (x, x') with x integral in Omega and x' = Ax + b. Empty when the
 * translation is integral or the domain contains no integer point.
 */
inline std::optional<std::pair<RVector, RVector>> bs_mismatch_witness(const ALTransition& tr,
                                                                      const EnhancedALModel& model) {
    if (tr.b.is_integer()) return std::nullopt;
    std::optional<std::pair<RVector, RVector>> witness;
    const auto [lo, hi] = model.omega_domain.bounding_box();
    detail::for_each_lattice_point(lo, hi, [&](const RVector& p) {
        if (witness || !model.omega_domain.contains(p)) return;
        witness = std::pair(p, tr.base_map().apply(p));
    });
    return witness;
}

} // namespace iiaffine

#pragma once

#include <cstddef>
#include <deque>
#include <set>
#include <string>
#include <vector>

#include "iiaffine/errors.hpp"
#include "iiaffine/linalg.hpp"

namespace iiaffine {

/**
 * Classification of an affine map x -> Ax + b:
 *   Affine                  A invertible
 *   IntegralAffine          A in GL_n(Z)
 *   IntegralIntegralAffine  A in GL_n(Z) and b in Z^n
 * Each tier contains the next.
 */
enum class AffineTier { Affine, IntegralAffine, IntegralIntegralAffine };

inline std::string to_string(AffineTier t) {
    switch (t) {
        case AffineTier::Affine: return "Affine";
        case AffineTier::IntegralAffine: return "IntegralAffine";
        case AffineTier::IntegralIntegralAffine: return "IntegralIntegralAffine";
    }
    return "?";
}

/** Affine transformation x -> Ax + b of R^n with nonsingular A. */
class AffineMap {
  public:
    AffineMap(RMatrix linear, RVector translation)
        : a_(std::move(linear)), b_(std::move(translation)) {
        if (!a_.is_square() || a_.rows() != b_.dim())
            throw ShapeError("affine map: linear part and translation dimensions disagree");
        if (det(a_).is_zero()) throw SingularMatrixError("affine map: singular linear part");
    }

    static AffineMap identity(std::size_t n) {
        return AffineMap(RMatrix::identity(n), RVector::zero(n));
    }
    static AffineMap translation(RVector b) {
        const std::size_t n = b.dim();
        return AffineMap(RMatrix::identity(n), std::move(b));
    }

    std::size_t dim() const { return b_.dim(); }
    const RMatrix& linear() const { return a_; }
    const RVector& translation() const { return b_; }

    RVector apply(const RVector& x) const {
        if (x.dim() != dim()) throw ShapeError("affine apply: dimension mismatch");
        return a_ * x + b_;
    }

    friend bool operator==(const AffineMap& f, const AffineMap& g) {
        return f.a_ == g.a_ && f.b_ == g.b_;
    }

    std::string str() const { return "x -> " + a_.str() + " x + " + b_.str(); }

  private:
    RMatrix a_;
    RVector b_;
};

/// compose(f, g).apply(x) == f.apply(g.apply(x)).
inline AffineMap compose(const AffineMap& f, const AffineMap& g) {
    if (f.dim() != g.dim()) throw ShapeError("compose: dimension mismatch");
    return AffineMap(f.linear() * g.linear(), f.linear() * g.translation() + f.translation());
}

inline AffineMap invert(const AffineMap& m) {
    const RMatrix ai = inverse(m.linear());
    return AffineMap(ai, -(ai * m.translation()));
}

inline AffineTier classify(const AffineMap& m) {
    if (!is_gl_n_z(m.linear())) return AffineTier::Affine;
    if (!m.translation().is_integer()) return AffineTier::IntegralAffine;
    return AffineTier::IntegralIntegralAffine;
}

/**
 * All images of `seed` under group words of length <= word_bound in the
 * generators and their inverses. Breadth-first with exact deduplication.
 */
inline std::set<RVector> orbit_reps(const std::vector<AffineMap>& gens, const RVector& seed,
                                    unsigned word_bound) {
    std::vector<AffineMap> moves;
    moves.reserve(2 * gens.size());
    for (const auto& g : gens) {
        if (g.dim() != seed.dim()) throw ShapeError("orbit_reps: generator dimension mismatch");
        if (classify(g) == AffineTier::Affine)
            throw TierError("orbit_reps: generator below IntegralAffine tier");
        moves.push_back(g);
        moves.push_back(invert(g));
    }

    std::set<RVector> seen{seed};
    std::deque<RVector> frontier{seed};
    for (unsigned depth = 0; depth < word_bound && !frontier.empty(); ++depth) {
        std::deque<RVector> next;
        for (const auto& p : frontier) {
            for (const auto& mv : moves) {
                RVector q = mv.apply(p);
                if (seen.insert(q).second) next.push_back(std::move(q));
            }
        }
        frontier = std::move(next);
    }
    return seen;
}

} // namespace iiaffine

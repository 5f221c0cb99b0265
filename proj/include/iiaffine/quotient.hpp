#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iiaffine/affine_map.hpp"
#include "iiaffine/errors.hpp"
#include "iiaffine/polytope.hpp"

namespace iiaffine {

/**
 * Presentation of B = R^n / Gamma by generators of Gamma and a half-open
 * polytopal fundamental domain.
 */
struct QuotientPresentation {
    std::size_t dim;
    std::vector<AffineMap> generators;
    Polytope domain;
    std::string label;

    QuotientPresentation(std::size_t n, std::vector<AffineMap> gens, Polytope dom,
                         std::string name)
        : dim(n), generators(std::move(gens)), domain(std::move(dom)), label(std::move(name)) {
        if (domain.dim() != dim)
            throw ShapeError("presentation: domain dimension disagrees with dim");
        for (const auto& g : generators) {
            if (g.dim() != dim) throw ShapeError("presentation: generator dimension mismatch");
            if (classify(g) == AffineTier::Affine)
                throw TierError("presentation: generator '" + g.str() + "' is not integral affine");
        }
    }

    bool is_integral_integral() const {
        for (const auto& g : generators)
            if (classify(g) != AffineTier::IntegralIntegralAffine) return false;
        return true;
    }

    /// Orientable iff every generator preserves orientation (det = +1).
    bool orientable() const {
        for (const auto& g : generators)
            if (det(g.linear()) != Rational(1)) return false;
        return true;
    }
};

/// Canonical integer representatives of the integer points of B, one per
/// Gamma-orbit (up to the word bound used in deduplication).
struct LatticePointSet {
    std::set<RVector> points;

    std::size_t size() const { return points.size(); }
    bool contains(const RVector& p) const { return points.count(p) > 0; }

    friend bool operator==(const LatticePointSet& a, const LatticePointSet& b) {
        return a.points == b.points;
    }
};

inline constexpr unsigned kDefaultWordBound = 8;

namespace detail {

/// Lexicographically smallest member of the bounded orbit of p that lies in
/// the half-open domain. p itself must lie in the domain.
inline RVector canonical_orbit_rep(const std::vector<AffineMap>& gens, const RVector& p,
                                   const Polytope& domain, unsigned word_bound) {
    RVector best = p;
    for (const auto& q : orbit_reps(gens, p, word_bound))
        if (q < best && domain.contains(q)) best = q;
    return best;
}

/// Enumerates Z^n intersected with [lo, hi] (closure bounds), calling fn on
/// each point.
template <typename Fn>
void for_each_lattice_point(const RVector& lo, const RVector& hi, Fn&& fn) {
    const std::size_t n = lo.dim();
    std::vector<Integer> floor_hi(n), cur(n);
    std::vector<Integer> ceil_lo(n);
    for (std::size_t i = 0; i < n; ++i) {
        ceil_lo[i] = lo[i].ceil();
        floor_hi[i] = hi[i].floor();
        if (ceil_lo[i] > floor_hi[i]) return; // empty slab
        cur[i] = ceil_lo[i];
    }
    while (true) {
        RVector p(n);
        for (std::size_t i = 0; i < n; ++i) p[i] = Rational(cur[i]);
        fn(p);
        std::size_t i = 0;
        while (i < n) {
            ++cur[i];
            if (cur[i] <= floor_hi[i]) break;
            cur[i] = ceil_lo[i];
            ++i;
        }
        if (i == n) return;
    }
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// The paper-style examples, compiled in. Recognized names: "torus-N" for
/// N >= 1, "klein", "kodaira-thurston". The designated translation generator
/// steps by `scale`; the domain is the matching half-open box.
inline QuotientPresentation builtin_presentation(const std::string& name, long scale) {
    if (scale < 1) throw ParseError("builtin presentation: scale must be >= 1");
    const Rational s(scale);

    if (name.rfind("torus-", 0) == 0) {
        const std::string tail = name.substr(6);
        long n = 0;
        try {
            std::size_t pos = 0;
            n = std::stol(tail, &pos);
            if (pos != tail.size()) n = 0;
        } catch (...) {
            n = 0;
        }
        if (n < 1) throw ParseError("builtin presentation: bad torus dimension in '" + name + "'");
        const auto dim = static_cast<std::size_t>(n);
        std::vector<AffineMap> gens;
        RVector lo(dim), hi(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            gens.push_back(AffineMap::translation(s * RVector::unit(dim, j)));
            hi[j] = s;
        }
        return QuotientPresentation(dim, std::move(gens), Polytope::box(lo, hi), name);
    }

    if (name == "klein") {
        // x1 -> x1 + scale  and  (x1, x2) -> (-x1, x2 + 1).
        std::vector<AffineMap> gens;
        gens.push_back(AffineMap::translation(s * RVector::unit(2, 0)));
        gens.emplace_back(RMatrix{{Rational(-1), Rational(0)}, {Rational(0), Rational(1)}},
                          RVector{Rational(0), Rational(1)});
        return QuotientPresentation(
            2, std::move(gens), Polytope::box(RVector::zero(2), RVector{s, Rational(1)}), name);
    }

    if (name == "kodaira-thurston") {
        // (x1, x2, x3) -> (x1 + x2, x2, x3 + 1), plus unit x1 translation and
        // x2 translation stepped by scale. Scaling x1 instead would not give a
        // fundamental domain: the commutator of the shear with the x2
        // translation already generates the unit x1 step.
        std::vector<AffineMap> gens;
        gens.emplace_back(RMatrix{{Rational(1), Rational(1), Rational(0)},
                                  {Rational(0), Rational(1), Rational(0)},
                                  {Rational(0), Rational(0), Rational(1)}},
                          RVector{Rational(0), Rational(0), Rational(1)});
        gens.push_back(AffineMap::translation(RVector::unit(3, 0)));
        gens.push_back(AffineMap::translation(s * RVector::unit(3, 1)));
        return QuotientPresentation(
            3, std::move(gens),
            Polytope::box(RVector::zero(3), RVector{Rational(1), s, Rational(1)}), name);
    }

    throw ParseError("unknown builtin presentation '" + name + "'");
}

/**
 * Integer points of B: Z^n points in the half-open fundamental domain,
 * deduplicated per Gamma-orbit, reported as canonical (lexicographically
 * smallest in-domain) representatives.
 */
inline LatticePointSet integral_points(const QuotientPresentation& q,
                                       unsigned word_bound = kDefaultWordBound) {
    if (!q.is_integral_integral())
        throw TierError("integral_points: presentation is not integral-integral");
    LatticePointSet out;
    const auto [lo, hi] = q.domain.bounding_box();
    detail::for_each_lattice_point(lo, hi, [&](const RVector& p) {
        if (!q.domain.contains(p)) return;
        out.points.insert(detail::canonical_orbit_rep(q.generators, p, q.domain, word_bound));
    });
    return out;
}

/// One sampled point whose bounded orbit misses or multiply covers the domain.
struct TilingFailure {
    RVector point;
    std::size_t hits;
};

struct TilingReport {
    std::size_t samples = 0;
    std::size_t failure_count = 0;
    std::vector<TilingFailure> failures; // capped sample of the failures
    bool ok() const { return failure_count == 0; }
};

/**
 * Statistical check that the domain tiles: for sampled rational points in a
 * 2x-inflated box around the domain, the bounded orbit must meet the
 * half-open domain exactly once.
 */
inline TilingReport validate_tiling(const QuotientPresentation& q, std::size_t samples,
                                    unsigned word_bound = kDefaultWordBound,
                                    std::uint64_t seed = 0) {
    TilingReport report;
    report.samples = samples;
    const auto [lo, hi] = q.domain.bounding_box();
    const std::size_t n = q.dim;

    std::mt19937_64 rng(detail::splitmix64(seed));
    constexpr long kGrid = 1L << 20;
    std::uniform_int_distribution<long> pick(0, kGrid - 1);

    for (std::size_t s = 0; s < samples; ++s) {
        RVector x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Rational w = (hi[i] - lo[i]) / Rational(2);
            const Rational infl_lo = lo[i] - w;
            // sample in [lo - w, hi + w], a box with doubled sides
            x[i] = infl_lo + Rational(pick(rng), kGrid) * (Rational(4) * w);
        }
        std::size_t hit = 0;
        for (const auto& p : orbit_reps(q.generators, x, word_bound))
            if (q.domain.contains(p)) ++hit;
        if (hit != 1) {
            ++report.failure_count;
            if (report.failures.size() < 16) report.failures.push_back({x, hit});
        }
    }
    return report;
}

struct MonteCarloVolume {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t samples = 0;

    bool contains(double v) const { return ci_low <= v && v <= ci_high; }
};

/**
 * Hit-or-miss volume estimate over the bounding box with a 99% binomial
 * confidence interval. Floating point by design; the exact volume() is the
 * authoritative value. Deterministic for fixed (seed, samples) via per-chunk
 * seeding, independent of any parallel split.
 */
inline MonteCarloVolume monte_carlo_volume(const Polytope& p, std::size_t samples,
                                           std::uint64_t seed = 0) {
    if (samples == 0) throw PreconditionError("monte_carlo_volume: samples must be >= 1");
    const auto [lo, hi] = p.bounding_box();
    const std::size_t n = p.dim();

    std::vector<double> lod(n), wd(n);
    double box_vol = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        lod[i] = lo[i].to_double();
        wd[i] = hi[i].to_double() - lod[i];
        box_vol *= wd[i];
    }
    std::vector<std::vector<double>> normals;
    std::vector<double> offsets;
    for (const auto& h : p.halfspaces()) {
        std::vector<double> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = h.normal[i].to_double();
        normals.push_back(std::move(a));
        offsets.push_back(h.offset.to_double());
    }

    constexpr std::size_t kChunk = 1 << 16;
    std::size_t hits = 0;
    std::vector<double> x(n);
    for (std::size_t start = 0, chunk = 0; start < samples; start += kChunk, ++chunk) {
        std::mt19937_64 rng(detail::splitmix64(seed ^ detail::splitmix64(chunk)));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const std::size_t count = std::min(kChunk, samples - start);
        for (std::size_t s = 0; s < count; ++s) {
            for (std::size_t i = 0; i < n; ++i) x[i] = lod[i] + wd[i] * u(rng);
            bool inside = true;
            for (std::size_t f = 0; f < normals.size() && inside; ++f) {
                double v = 0.0;
                for (std::size_t i = 0; i < n; ++i) v += normals[f][i] * x[i];
                inside = v <= offsets[f];
            }
            if (inside) ++hits;
        }
    }

    const double phat = static_cast<double>(hits) / static_cast<double>(samples);
    const double z = 2.5758293035489004; // 99% two-sided normal quantile
    const double half = z * std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples));
    MonteCarloVolume mc;
    mc.samples = samples;
    mc.estimate = phat * box_vol;
    mc.ci_low = std::max(0.0, (phat - half)) * box_vol;
    mc.ci_high = std::min(1.0, (phat + half)) * box_vol;
    return mc;
}

} // namespace iiaffine

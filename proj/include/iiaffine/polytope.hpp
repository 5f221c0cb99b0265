#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "iiaffine/affine_map.hpp"
#include "iiaffine/errors.hpp"
#include "iiaffine/linalg.hpp"

namespace iiaffine {

/// Supporting halfspace normal.x <= offset (strict when closed == false).
/// Normals are normalized to primitive integer vectors, so the canonical
/// facet ordering is stable across construction paths.
struct Halfspace {
    RVector normal;
    Rational offset;
    bool closed = true;

    friend bool operator==(const Halfspace& a, const Halfspace& b) {
        return a.normal == b.normal && a.offset == b.offset && a.closed == b.closed;
    }
};

namespace detail {

inline Rational det_of(const std::vector<RVector>& rows) {
    const std::size_t n = rows.size();
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
    return det(m);
}

/// Rank of the span of the given vectors (exact Gaussian elimination).
inline std::size_t rank_of(std::vector<RVector> rows) {
    if (rows.empty()) return 0;
    const std::size_t cols = rows[0].dim();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
        std::size_t p = rank;
        while (p < rows.size() && rows[p][c].is_zero()) ++p;
        if (p == rows.size()) continue;
        std::swap(rows[rank], rows[p]);
        for (std::size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][c].is_zero()) continue;
            const Rational f = rows[i][c] / rows[rank][c];
            for (std::size_t j = c; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

/// Normal of the hyperplane spanned by k-1 difference vectors in R^k,
/// computed from signed maximal minors. Zero vector if degenerate.
inline RVector hyperplane_normal(const std::vector<RVector>& diffs, std::size_t k) {
    RVector normal(k);
    std::vector<RVector> minor_rows(diffs.size(), RVector(k - 1));
    for (std::size_t drop = 0; drop < k; ++drop) {
        for (std::size_t i = 0; i < diffs.size(); ++i) {
            std::size_t w = 0;
            for (std::size_t j = 0; j < k; ++j) {
                if (j == drop) continue;
                minor_rows[i][w++] = diffs[i][j];
            }
        }
        Rational d = diffs.empty() ? Rational(1) : det_of(minor_rows);
        normal[drop] = (drop % 2 == 0) ? d : -d;
    }
    return normal;
}

/// Scale (normal, offset) by a positive rational so the normal becomes a
/// primitive integer vector.
inline void make_primitive(RVector& normal, Rational& offset) {
    Integer l(1);
    for (std::size_t j = 0; j < normal.dim(); ++j) l = lcm(l, normal[j].den());
    Integer g(0);
    for (std::size_t j = 0; j < normal.dim(); ++j) g = gcd(g, (Rational(l) * normal[j]).num());
    if (g == 0) return;
    const Rational s = Rational(l, g);
    for (std::size_t j = 0; j < normal.dim(); ++j) normal[j] *= s;
    offset *= s;
}

inline void next_combination(std::vector<std::size_t>& idx, std::size_t m, bool& done) {
    const std::size_t k = idx.size();
    std::size_t i = k;
    while (i-- > 0) {
        if (idx[i] + (k - i) < m) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
            return;
        }
    }
    done = true;
}

/// Supporting facet hyperplanes of conv(pts) (full-dimensional in R^k),
/// by brute force over k-point subsets. Desk-scale only.
inline std::vector<std::pair<RVector, Rational>> facet_hyperplanes(const std::vector<RVector>& pts,
                                                                   std::size_t k) {
    std::set<std::pair<RVector, Rational>> found;
    const std::size_t m = pts.size();
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    bool done = (m < k);
    while (!done) {
        std::vector<RVector> diffs;
        diffs.reserve(k - 1);
        for (std::size_t i = 1; i < k; ++i) diffs.push_back(pts[idx[i]] - pts[idx[0]]);
        RVector normal = hyperplane_normal(diffs, k);
        if (!normal.is_zero()) {
            Rational offset = dot(normal, pts[idx[0]]);
            bool above = false, below = false;
            for (const auto& p : pts) {
                const Rational v = dot(normal, p);
                if (v > offset) above = true;
                else if (v < offset) below = true;
                if (above && below) break;
            }
            if (!(above && below)) {
                if (above) {
                    normal = -normal;
                    offset = -offset;
                }
                make_primitive(normal, offset);
                found.emplace(normal, offset);
            }
        }
        next_combination(idx, m, done);
    }
    return {found.begin(), found.end()};
}

/// Triangulates conv(pts), assumed full-dimensional in R^k, into k-simplices
/// returned as index lists into pts (pulling triangulation from pts[0]).
inline std::vector<std::vector<std::size_t>> triangulate_full(const std::vector<RVector>& pts,
                                                              std::size_t k) {
    std::vector<std::vector<std::size_t>> simplices;
    if (k == 1) {
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (pts[i][0] < pts[lo][0]) lo = i;
            if (pts[i][0] > pts[hi][0]) hi = i;
        }
        simplices.push_back({lo, hi});
        return simplices;
    }
    const auto facets = facet_hyperplanes(pts, k);
    const std::size_t apex = 0;
    for (const auto& [normal, offset] : facets) {
        if (dot(normal, pts[apex]) == offset) continue; // apex on facet: zero-volume cone
        // Collect facet points and project out a coordinate with nonzero normal.
        std::size_t drop = 0;
        while (normal[drop].is_zero()) ++drop;
        std::vector<std::size_t> facet_idx;
        std::vector<RVector> proj;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (dot(normal, pts[i]) != offset) continue;
            facet_idx.push_back(i);
            RVector q(k - 1);
            std::size_t w = 0;
            for (std::size_t j = 0; j < k; ++j)
                if (j != drop) q[w++] = pts[i][j];
            proj.push_back(std::move(q));
        }
        for (const auto& sub : triangulate_full(proj, k - 1)) {
            std::vector<std::size_t> simplex{apex};
            for (std::size_t local : sub) simplex.push_back(facet_idx[local]);
            simplices.push_back(std::move(simplex));
        }
    }
    return simplices;
}

} // namespace detail

/**
 * Convex polytope in V-representation with a derived, canonically ordered
 * H-representation. Each facet carries a closed/open flag so the polytope can
 * stand for a half-open fundamental domain.
 */
class Polytope {
  public:
    /// Convex hull of the given points; requires full dimension. All facets
    /// start closed; use set_open_facets to open some of them.
    static Polytope from_vertices(std::vector<RVector> vertices) {
        if (vertices.empty()) throw DegeneratePolytopeError("polytope: no vertices");
        const std::size_t n = vertices[0].dim();
        if (n == 0) throw DegeneratePolytopeError("polytope: zero-dimensional ambient");
        for (const auto& v : vertices)
            if (v.dim() != n) throw ShapeError("polytope: mixed vertex dimensions");

        std::vector<RVector> diffs;
        for (std::size_t i = 1; i < vertices.size(); ++i) diffs.push_back(vertices[i] - vertices[0]);
        if (detail::rank_of(diffs) != n)
            throw DegeneratePolytopeError("polytope: vertices not full-dimensional");

        Polytope p;
        p.dim_ = n;
        p.vertices_ = std::move(vertices);
        for (const auto& [normal, offset] : detail::facet_hyperplanes(p.vertices_, n))
            p.halfspaces_.push_back(Halfspace{normal, offset, true});
        return p;
    }

    /// Axis-aligned half-open box [lo, hi): closed on lower facets, open on
    /// upper ones. Vertices are the 2^n corners in binary-counting order.
    static Polytope box(const RVector& lo, const RVector& hi) {
        const std::size_t n = lo.dim();
        if (hi.dim() != n) throw ShapeError("box: corner dimensions disagree");
        for (std::size_t i = 0; i < n; ++i)
            if (!(lo[i] < hi[i])) throw DegeneratePolytopeError("box: empty side");

        Polytope p;
        p.dim_ = n;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            RVector v(n);
            for (std::size_t i = 0; i < n; ++i) v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
            p.vertices_.push_back(std::move(v));
        }
        std::vector<Halfspace> hs;
        for (std::size_t i = 0; i < n; ++i) {
            hs.push_back(Halfspace{RVector::unit(n, i), hi[i], false});
            hs.push_back(Halfspace{-RVector::unit(n, i), -lo[i], true});
        }
        std::sort(hs.begin(), hs.end(), [](const Halfspace& a, const Halfspace& b) {
            return std::pair(a.normal, a.offset) < std::pair(b.normal, b.offset);
        });
        p.halfspaces_ = std::move(hs);
        p.box_sides_ = std::pair(lo, hi);
        return p;
    }

    std::size_t dim() const { return dim_; }
    const std::vector<RVector>& vertices() const { return vertices_; }
    const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }
    bool is_box() const { return box_sides_.has_value(); }

    /// Marks the facets at the given canonical indices as open.
    void set_open_facets(const std::vector<std::size_t>& indices) {
        for (auto& h : halfspaces_) h.closed = true;
        for (std::size_t i : indices) {
            if (i >= halfspaces_.size()) throw ParseError("open facet index out of range");
            halfspaces_[i].closed = false;
        }
    }

    std::vector<std::size_t> open_facets() const {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < halfspaces_.size(); ++i)
            if (!halfspaces_[i].closed) idx.push_back(i);
        return idx;
    }

    /// Membership honoring the per-facet closed/open flags.
    bool contains(const RVector& x) const {
        for (const auto& h : halfspaces_) {
            const Rational v = dot(h.normal, x);
            if (h.closed ? v > h.offset : v >= h.offset) return false;
        }
        return true;
    }

    /// Membership in the closure (all facets treated as closed).
    bool closure_contains(const RVector& x) const {
        for (const auto& h : halfspaces_)
            if (dot(h.normal, x) > h.offset) return false;
        return true;
    }

    std::pair<RVector, RVector> bounding_box() const {
        RVector lo = vertices_[0], hi = vertices_[0];
        for (const auto& v : vertices_)
            for (std::size_t i = 0; i < dim_; ++i) {
                if (v[i] < lo[i]) lo[i] = v[i];
                if (v[i] > hi[i]) hi[i] = v[i];
            }
        return {lo, hi};
    }

    /// Image under an invertible affine map. Facet flags are carried along
    /// with their transformed halfspaces.
    Polytope affine_image(const AffineMap& m) const {
        if (m.dim() != dim_) throw ShapeError("affine_image: dimension mismatch");
        Polytope p;
        p.dim_ = dim_;
        p.vertices_.reserve(vertices_.size());
        for (const auto& v : vertices_) p.vertices_.push_back(m.apply(v));
        const RMatrix ait = inverse(m.linear()).transpose();
        std::vector<Halfspace> hs;
        hs.reserve(halfspaces_.size());
        for (const auto& h : halfspaces_) {
            RVector normal = ait * h.normal;
            Rational offset = h.offset + dot(normal, m.translation());
            detail::make_primitive(normal, offset);
            hs.push_back(Halfspace{std::move(normal), std::move(offset), h.closed});
        }
        std::sort(hs.begin(), hs.end(), [](const Halfspace& a, const Halfspace& b) {
            return std::pair(a.normal, a.offset) < std::pair(b.normal, b.offset);
        });
        p.halfspaces_ = std::move(hs);
        return p;
    }

    /// Exact Lebesgue volume: fan triangulation from vertices_[0], summing
    /// |det| / n! over the simplices. Boxes short-circuit to side products.
    Rational volume() const {
        if (box_sides_) {
            Rational v(1);
            for (std::size_t i = 0; i < dim_; ++i)
                v *= box_sides_->second[i] - box_sides_->first[i];
            return v;
        }
        Rational nfact(1);
        for (std::size_t i = 2; i <= dim_; ++i) nfact *= Rational(static_cast<long>(i));
        Rational total(0);
        for (const auto& simplex : detail::triangulate_full(vertices_, dim_)) {
            std::vector<RVector> rows;
            rows.reserve(dim_);
            for (std::size_t i = 1; i < simplex.size(); ++i)
                rows.push_back(vertices_[simplex[i]] - vertices_[simplex[0]]);
            total += abs(detail::det_of(rows));
        }
        return total / nfact;
    }

    friend bool operator==(const Polytope& a, const Polytope& b) {
        return a.dim_ == b.dim_ && a.vertices_ == b.vertices_ && a.halfspaces_ == b.halfspaces_;
    }

  private:
    Polytope() = default;
    std::size_t dim_ = 0;
    std::vector<RVector> vertices_;
    std::vector<Halfspace> halfspaces_;
    std::optional<std::pair<RVector, RVector>> box_sides_;
};

} // namespace iiaffine

#pragma once

// Shared helpers for the test suites: seeded random generators for exact
// values and independent brute-force oracles.

#include <cstdint>
#include <random>
#include <vector>

#include "iiaffine/affine_map.hpp"
#include "iiaffine/linalg.hpp"
#include "iiaffine/rational.hpp"

namespace testsupport {

using Rng = std::mt19937_64;
using iiaffine::AffineMap;
using iiaffine::Rational;
using iiaffine::RMatrix;
using iiaffine::RVector;

inline Rational random_rational(Rng& rng, long max_num = 9, long max_den = 9) {
    std::uniform_int_distribution<long> num(-max_num, max_num);
    std::uniform_int_distribution<long> den(1, max_den);
    return Rational(num(rng), den(rng));
}

inline RVector random_rvector(Rng& rng, std::size_t n, long max_num = 9, long max_den = 9) {
    RVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = random_rational(rng, max_num, max_den);
    return v;
}

inline RVector random_integer_vector(Rng& rng, std::size_t n, long max_abs = 5) {
    std::uniform_int_distribution<long> pick(-max_abs, max_abs);
    RVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = Rational(pick(rng));
    return v;
}

inline RMatrix random_rmatrix(Rng& rng, std::size_t r, std::size_t c, long max_num = 9,
                              long max_den = 9) {
    RMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = random_rational(rng, max_num, max_den);
    return m;
}

inline RMatrix random_invertible(Rng& rng, std::size_t n) {
    for (;;) {
        RMatrix m = random_rmatrix(rng, n, n, 5, 3);
        if (!det(m).is_zero()) return m;
    }
}

/// Random element of GL_n(Z) as a short word in elementary matrices
/// (shears, swaps, sign flips), so entries stay small.
inline RMatrix random_gl_n_z(Rng& rng, std::size_t n, unsigned words = 6) {
    RMatrix m = RMatrix::identity(n);
    std::uniform_int_distribution<int> op(0, 2);
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::uniform_int_distribution<int> pm(0, 1);
    for (unsigned w = 0; w < words; ++w) {
        switch (n == 1 ? 2 : op(rng)) {
            case 0: { // row_i += +-1 * row_j
                std::size_t i = idx(rng), j = idx(rng);
                if (i == j) break;
                const Rational s(pm(rng) ? 1 : -1);
                for (std::size_t c = 0; c < n; ++c) m(i, c) += s * m(j, c);
                break;
            }
            case 1: { // swap two rows
                std::size_t i = idx(rng), j = idx(rng);
                if (i == j) break;
                for (std::size_t c = 0; c < n; ++c) std::swap(m(i, c), m(j, c));
                break;
            }
            default: { // negate a row
                std::size_t i = idx(rng);
                for (std::size_t c = 0; c < n; ++c) m(i, c) = -m(i, c);
                break;
            }
        }
    }
    return m;
}

inline AffineMap random_iia_map(Rng& rng, std::size_t n) {
    return AffineMap(random_gl_n_z(rng, n), random_integer_vector(rng, n));
}

/// Independent determinant oracle: recursive cofactor expansion.
inline Rational cofactor_det(const RMatrix& m) {
    const std::size_t n = m.rows();
    if (n == 1) return m(0, 0);
    Rational acc;
    for (std::size_t j = 0; j < n; ++j) {
        if (m(0, j).is_zero()) continue;
        RMatrix minor(n - 1, n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::size_t w = 0;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == j) continue;
                minor(r - 1, w++) = m(r, c);
            }
        }
        const Rational term = m(0, j) * cofactor_det(minor);
        acc += (j % 2 == 0) ? term : -term;
    }
    return acc;
}

} // namespace testsupport

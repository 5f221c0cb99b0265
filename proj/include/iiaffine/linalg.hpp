#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "iiaffine/errors.hpp"
#include "iiaffine/rational.hpp"

namespace iiaffine {

/** Exact rational column vector. */
class RVector {
  public:
    RVector() = default;
    explicit RVector(std::size_t dim) : e_(dim) {}
    RVector(std::initializer_list<Rational> init) : e_(init) {}
    explicit RVector(std::vector<Rational> entries) : e_(std::move(entries)) {}

    static RVector zero(std::size_t dim) { return RVector(dim); }
    static RVector unit(std::size_t dim, std::size_t axis) {
        RVector v(dim);
        v[axis] = Rational(1);
        return v;
    }

    std::size_t dim() const { return e_.size(); }
    Rational& operator[](std::size_t i) { return e_[i]; }
    const Rational& operator[](std::size_t i) const { return e_[i]; }
    const std::vector<Rational>& entries() const { return e_; }

    bool is_integer() const {
        for (const auto& x : e_)
            if (!x.is_integer()) return false;
        return true;
    }

    bool is_zero() const {
        for (const auto& x : e_)
            if (!x.is_zero()) return false;
        return true;
    }

    RVector operator-() const {
        RVector r(dim());
        for (std::size_t i = 0; i < dim(); ++i) r[i] = -e_[i];
        return r;
    }

    friend RVector operator+(const RVector& a, const RVector& b) {
        check_same_dim(a, b);
        RVector r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] + b[i];
        return r;
    }
    friend RVector operator-(const RVector& a, const RVector& b) {
        check_same_dim(a, b);
        RVector r(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) r[i] = a[i] - b[i];
        return r;
    }
    friend RVector operator*(const Rational& c, const RVector& v) {
        RVector r(v.dim());
        for (std::size_t i = 0; i < v.dim(); ++i) r[i] = c * v[i];
        return r;
    }

    friend Rational dot(const RVector& a, const RVector& b) {
        check_same_dim(a, b);
        Rational s;
        for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * b[i];
        return s;
    }

    friend bool operator==(const RVector& a, const RVector& b) { return a.e_ == b.e_; }
    /// Lexicographic order; total over equal dimensions (shorter vectors first).
    friend bool operator<(const RVector& a, const RVector& b) {
        if (a.dim() != b.dim()) return a.dim() < b.dim();
        for (std::size_t i = 0; i < a.dim(); ++i) {
            if (a[i] != b[i]) return a[i] < b[i];
        }
        return false;
    }

    std::string str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < dim(); ++i) {
            if (i) s += ", ";
            s += e_[i].str();
        }
        return s + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const RVector& v) { return os << v.str(); }

  private:
    static void check_same_dim(const RVector& a, const RVector& b) {
        if (a.dim() != b.dim()) throw ShapeError("vector dimension mismatch");
    }
    std::vector<Rational> e_;
};

/** Exact rational dense matrix, row-major. */
class RMatrix {
  public:
    RMatrix() : rows_(0), cols_(0) {}
    RMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), e_(rows * cols) {}
    RMatrix(std::size_t rows, std::size_t cols, std::vector<Rational> entries)
        : rows_(rows), cols_(cols), e_(std::move(entries)) {
        if (e_.size() != rows * cols) throw ShapeError("entry count does not match shape");
    }
    /// Row-by-row brace construction: RMatrix{{a,b},{c,d}}.
    RMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        e_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_) throw ShapeError("ragged matrix rows");
            e_.insert(e_.end(), r.begin(), r.end());
        }
    }

    static RMatrix identity(std::size_t n) {
        RMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = Rational(1);
        return m;
    }
    static RMatrix zero(std::size_t r, std::size_t c) { return RMatrix(r, c); }
    static RMatrix scalar(std::size_t n, const Rational& c) {
        RMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool is_square() const { return rows_ == cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return e_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return e_[i * cols_ + j]; }

    RMatrix transpose() const {
        RMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_integer() const {
        for (const auto& x : e_)
            if (!x.is_integer()) return false;
        return true;
    }

    friend bool operator==(const RMatrix& a, const RMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.e_ == b.e_;
    }

    friend RMatrix operator+(const RMatrix& a, const RMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ShapeError("matrix shape mismatch");
        RMatrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] + b.e_[i];
        return r;
    }
    friend RMatrix operator-(const RMatrix& a, const RMatrix& b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ShapeError("matrix shape mismatch");
        RMatrix r(a.rows_, a.cols_);
        for (std::size_t i = 0; i < a.e_.size(); ++i) r.e_[i] = a.e_[i] - b.e_[i];
        return r;
    }
    friend RMatrix operator*(const Rational& c, const RMatrix& m) {
        RMatrix r(m.rows_, m.cols_);
        for (std::size_t i = 0; i < m.e_.size(); ++i) r.e_[i] = c * m.e_[i];
        return r;
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i) s += "; ";
            for (std::size_t j = 0; j < cols_; ++j) {
                if (j) s += ", ";
                s += (*this)(i, j).str();
            }
        }
        return s + "]";
    }
    friend std::ostream& operator<<(std::ostream& os, const RMatrix& m) { return os << m.str(); }

  private:
    std::size_t rows_, cols_;
    std::vector<Rational> e_;
};

inline RMatrix matmul(const RMatrix& a, const RMatrix& b) {
    if (a.cols() != b.rows()) throw ShapeError("matmul: inner dimensions differ");
    RMatrix r(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k).is_zero()) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += a(i, k) * b(k, j);
        }
    return r;
}

inline RMatrix operator*(const RMatrix& a, const RMatrix& b) { return matmul(a, b); }

inline RVector operator*(const RMatrix& m, const RVector& v) {
    if (m.cols() != v.dim()) throw ShapeError("matrix-vector dimension mismatch");
    RVector r(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Rational s;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

/**
 * Exact determinant. Rows are cleared of denominators and the integer matrix
 * is reduced by Bareiss' fraction-free elimination, so intermediate entries
 * stay at single-minor size.
 */
inline Rational det(const RMatrix& a) {
    if (!a.is_square()) throw ShapeError("det: matrix not square");
    const std::size_t n = a.rows();
    if (n == 0) return Rational(1);

    // Clear denominators row by row; track the accumulated scale.
    std::vector<std::vector<Integer>> m(n, std::vector<Integer>(n));
    Integer scale(1);
    for (std::size_t i = 0; i < n; ++i) {
        Integer l(1);
        for (std::size_t j = 0; j < n; ++j) l = lcm(l, a(i, j).den());
        for (std::size_t j = 0; j < n; ++j) {
            const Rational x = Rational(l) * a(i, j);
            m[i][j] = x.num();
        }
        scale *= l;
    }

    Integer prev(1);
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return Rational(0);
            std::swap(m[k], m[p]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                m[i][j] = t;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Integer d = m[n - 1][n - 1];
    if (sign < 0) d = -d;
    return Rational(d, scale);
}

/** Exact inverse via Gauss-Jordan elimination. */
inline RMatrix inverse(const RMatrix& a) {
    if (!a.is_square()) throw ShapeError("inverse: matrix not square");
    const std::size_t n = a.rows();
    RMatrix w = a;
    RMatrix inv = RMatrix::identity(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && w(p, k).is_zero()) ++p;
        if (p == n) throw SingularMatrixError("inverse: singular matrix");
        if (p != k) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(w(k, j), w(p, j));
                std::swap(inv(k, j), inv(p, j));
            }
        }
        const Rational piv = w(k, k);
        for (std::size_t j = 0; j < n; ++j) {
            w(k, j) /= piv;
            inv(k, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || w(i, k).is_zero()) continue;
            const Rational f = w(i, k);
            for (std::size_t j = 0; j < n; ++j) {
                w(i, j) -= f * w(k, j);
                inv(i, j) -= f * inv(k, j);
            }
        }
    }
    return inv;
}

/// True iff a is an integer matrix whose determinant is +1 or -1,
/// i.e. the linear map takes the lattice Z^n onto itself.
inline bool is_gl_n_z(const RMatrix& a) {
    if (!a.is_square()) throw ShapeError("is_gl_n_z: matrix not square");
    if (!a.is_integer()) return false;
    const Rational d = det(a);
    return d == Rational(1) || d == Rational(-1);
}

} // namespace iiaffine

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "iiaffine/linalg.hpp"
#include "iiaffine/rational.hpp"
#include "support.hpp"

using namespace iiaffine;
using testsupport::Rng;

TEST_CASE("rational canonical form and parsing") {
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -2) == Rational(-1, 2));
    CHECK(Rational(-3, -6).str() == "1/2");
    CHECK(Rational(4, 2).str() == "2");
    CHECK(Rational(0, 7).str() == "0");
    CHECK(Rational::parse("-7/3") == Rational(-7, 3));
    CHECK(Rational::parse("5") == Rational(5));
    CHECK(Rational::parse("6/4") == Rational(3, 2));
    CHECK_THROWS_AS(Rational::parse("1/0"), ParseError);
    CHECK_THROWS_AS(Rational::parse("a/b"), ParseError);
    CHECK_THROWS_AS(Rational::parse(""), ParseError);
}

TEST_CASE("rational arithmetic and order") {
    const Rational a(1, 3), b(1, 6);
    CHECK(a + b == Rational(1, 2));
    CHECK(a - b == Rational(1, 6));
    CHECK(a * b == Rational(1, 18));
    CHECK(a / b == Rational(2));
    CHECK(a > b);
    CHECK(Rational(-1, 2) < Rational(0));
    CHECK(Rational(7, 2).floor() == 3);
    CHECK(Rational(7, 2).ceil() == 4);
    CHECK(Rational(-7, 2).floor() == -4);
    CHECK(Rational(-7, 2).ceil() == -3);
    CHECK(Rational(-1, 4).mod_one() == Rational(3, 4));
    CHECK(Rational(9, 4).mod_one() == Rational(1, 4));
}

TEST_CASE("matmul examples") {
    const RMatrix m{{Rational(1), Rational(2)}, {Rational(3), Rational(4)}};
    CHECK(matmul(RMatrix::identity(2), m) == m);

    const RMatrix shear{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}};
    const RMatrix shear2{{Rational(1), Rational(2)}, {Rational(0), Rational(1)}};
    CHECK(matmul(shear, shear) == shear2);

    const RMatrix swap{{Rational(0), Rational(1)}, {Rational(1), Rational(0)}};
    CHECK(matmul(swap, swap) == RMatrix::identity(2));

    CHECK_THROWS_AS(matmul(RMatrix(2, 3), RMatrix(2, 3)), ShapeError);
}

TEST_CASE("det examples against cofactor oracle") {
    CHECK(det(RMatrix::identity(3)) == Rational(1));

    const RMatrix shear{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}};
    CHECK(det(shear) == testsupport::cofactor_det(shear));
    CHECK(det(shear) == Rational(1));

    const RMatrix flip{{Rational(-1), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK(det(flip) == testsupport::cofactor_det(flip));
    CHECK(det(flip) == Rational(-1));

    CHECK_THROWS_AS(det(RMatrix(2, 3)), ShapeError);
}

TEST_CASE("det matches cofactor oracle on random rational matrices") {
    Rng rng(12345);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const RMatrix m = testsupport::random_rmatrix(rng, n, n);
        CHECK(det(m) == testsupport::cofactor_det(m));
    }
}

TEST_CASE("det is multiplicative") {
    Rng rng(777);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const RMatrix a = testsupport::random_rmatrix(rng, n, n);
        const RMatrix b = testsupport::random_rmatrix(rng, n, n);
        CHECK(det(matmul(a, b)) == det(a) * det(b));
    }
}

TEST_CASE("inverse examples") {
    CHECK(inverse(RMatrix::identity(4)) == RMatrix::identity(4));

    const RMatrix shear{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}};
    const RMatrix unshear{{Rational(1), Rational(-1)}, {Rational(0), Rational(1)}};
    CHECK(inverse(shear) == unshear);
    CHECK(matmul(shear, inverse(shear)) == RMatrix::identity(2));

    const RMatrix stretch{{Rational(2), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK(inverse(stretch)(0, 0) == Rational(1, 2));
    CHECK(matmul(stretch, inverse(stretch)) == RMatrix::identity(2));

    CHECK_THROWS_AS(inverse(RMatrix::zero(2, 2)), SingularMatrixError);
}

TEST_CASE("inverse of inverse and integrality over GL_n(Z)") {
    Rng rng(42);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 4;
        const RMatrix m = testsupport::random_gl_n_z(rng, n);
        const RMatrix mi = inverse(m);
        CHECK(mi.is_integer());
        CHECK(matmul(m, mi) == RMatrix::identity(n));
        CHECK(inverse(mi) == m);
    }
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const RMatrix m = testsupport::random_invertible(rng, n);
        CHECK(inverse(inverse(m)) == m);
    }
}

TEST_CASE("is_gl_n_z") {
    const RMatrix shear{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}};
    CHECK(is_gl_n_z(shear));

    const RMatrix stretch{{Rational(2), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK_FALSE(is_gl_n_z(stretch));

    const RMatrix flip{{Rational(-1), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK(is_gl_n_z(flip));

    const RMatrix halves{{Rational(1, 2), Rational(0)}, {Rational(0), Rational(2)}};
    CHECK_FALSE(is_gl_n_z(halves)); // det 1 but not integer

    Rng rng(99);
    for (int trial = 0; trial < 30; ++trial)
        CHECK(is_gl_n_z(testsupport::random_gl_n_z(rng, 1 + trial % 5)));
}

TEST_CASE("vector ops and ordering") {
    const RVector a{Rational(1), Rational(2)};
    const RVector b{Rational(1), Rational(3)};
    CHECK(a < b);
    CHECK(dot(a, b) == Rational(7));
    CHECK((a + b) == RVector{Rational(2), Rational(5)});
    CHECK((Rational(2) * a) == RVector{Rational(2), Rational(4)});
    CHECK_THROWS_AS(dot(a, RVector(3)), ShapeError);
    CHECK(RVector{Rational(1), Rational(-2)}.is_integer());
    CHECK_FALSE(RVector{Rational(1, 2)}.is_integer());
}

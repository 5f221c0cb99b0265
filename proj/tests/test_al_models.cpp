#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "iiaffine/al_model.hpp"
#include "support.hpp"

using namespace iiaffine;
using testsupport::Rng;

namespace {

EnhancedALModel wide_model(std::size_t n, long radius = 8) {
    RVector lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        lo[i] = Rational(-radius);
        hi[i] = Rational(radius);
    }
    return EnhancedALModel{Polytope::box(lo, hi)};
}

ALTransition identity_transition(std::size_t n) {
    return ALTransition{RMatrix::identity(n), RVector::zero(n), RMatrix::zero(n, n),
                        RVector::zero(n)};
}

/// Random transition with A in GL_n(Z); G symmetric-after-A^T iff `clean`.
ALTransition random_transition(Rng& rng, std::size_t n, bool clean, bool integral_b) {
    const RMatrix a = testsupport::random_gl_n_z(rng, n);
    RMatrix atg(n, n);
    if (clean) {
        // symmetric S, then G = A^{-T} S
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                atg(i, j) = testsupport::random_rational(rng, 3, 2);
                atg(j, i) = atg(i, j);
            }
    } else {
        do {
            atg = testsupport::random_rmatrix(rng, n, n, 3, 2);
        } while (atg == atg.transpose());
    }
    const RMatrix g = inverse(a).transpose() * atg;
    RVector b = integral_b ? testsupport::random_integer_vector(rng, n)
                           : testsupport::random_rvector(rng, n);
    if (!integral_b && b.is_integer()) b[0] += Rational(1, 2);
    return ALTransition{a, b, g, testsupport::random_rvector(rng, n)};
}

} // namespace

TEST_CASE("is_symplectomorphism") {
    CHECK(is_symplectomorphism(identity_transition(2)));

    ALTransition skew = identity_transition(2);
    skew.G = RMatrix{{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
    CHECK_FALSE(is_symplectomorphism(skew)); // A^T G asymmetric

    ALTransition shear = identity_transition(2);
    shear.A = RMatrix{{Rational(1), Rational(1)}, {Rational(0), Rational(1)}};
    shear.b = RVector{Rational(5, 7), Rational(-2)};
    shear.c = RVector{Rational(1, 3), Rational(0)};
    CHECK(is_symplectomorphism(shear));

    ALTransition stretched = identity_transition(2);
    stretched.A = RMatrix{{Rational(2), Rational(0)}, {Rational(0), Rational(1)}};
    CHECK_FALSE(is_symplectomorphism(stretched)); // not GL_n(Z)
}

TEST_CASE("is_enhanced_isomorphism") {
    CHECK(is_enhanced_isomorphism(identity_transition(3)));

    ALTransition half = identity_transition(2);
    half.b = RVector{Rational(1, 2), Rational(0)};
    CHECK(is_symplectomorphism(half));
    CHECK_FALSE(is_enhanced_isomorphism(half));

    ALTransition klein_like = identity_transition(2);
    klein_like.A = RMatrix{{Rational(-1), Rational(0)}, {Rational(0), Rational(1)}};
    klein_like.b = RVector{Rational(0), Rational(1)};
    CHECK(is_enhanced_isomorphism(klein_like));
}

TEST_CASE("enhanced isomorphisms are closed under composition") {
    Rng rng(61);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 1 + trial % 3;
        const auto f = random_transition(rng, n, true, true);
        const auto g = random_transition(rng, n, true, true);
        const auto fg = compose(f, g);
        CHECK(is_enhanced_isomorphism(f));
        CHECK(is_enhanced_isomorphism(g));
        CHECK(is_enhanced_isomorphism(fg));

        // composition law agrees with pointwise application
        const RVector x = testsupport::random_rvector(rng, n);
        const RVector t = testsupport::random_rvector(rng, n);
        const auto via_g = g.apply(x, t);
        const auto expect = f.apply(via_g.first, via_g.second);
        const auto direct = fg.apply(x, t);
        CHECK(direct.first == expect.first);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(direct.second[i].mod_one() == expect.second[i].mod_one());
    }
}

TEST_CASE("holonomy phases") {
    const auto model = wide_model(2);

    CHECK(holonomy_phase(model, {RVector{Rational(1, 3), Rational(7)}, {0, 0}}).is_zero());
    CHECK(holonomy(model, {RVector{Rational(1, 3), Rational(7)}, {0, 0}}) ==
          std::complex<double>(1.0, 0.0));

    const auto model1 = wide_model(1);
    const auto minus_one = holonomy(model1, {RVector{Rational(1, 2)}, {1}});
    CHECK(minus_one.real() == doctest::Approx(-1.0));
    CHECK(minus_one.imag() == doctest::Approx(0.0));

    // x = (1/3, 1/4), m = (1, 2): exponent 1/3 + 1/2 = 5/6
    CHECK(holonomy_phase(model, {RVector{Rational(1, 3), Rational(1, 4)}, {1, 2}}) ==
          Rational(5, 6));

    CHECK_THROWS_AS(holonomy_phase(model, {RVector{Rational(100), Rational(0)}, {1, 0}}),
                    PreconditionError);
    CHECK_THROWS_AS(holonomy_phase(model, {RVector{Rational(0)}, {1}}), ShapeError);
}

TEST_CASE("holonomy is a homomorphism in the winding") {
    Rng rng(71);
    const auto model = wide_model(3, 20);
    for (int trial = 0; trial < 50; ++trial) {
        const RVector x = testsupport::random_rvector(rng, 3, 6, 6);
        std::vector<long> m1(3), m2(3), sum(3);
        for (std::size_t k = 0; k < 3; ++k) {
            m1[k] = static_cast<long>(rng() % 9) - 4;
            m2[k] = static_cast<long>(rng() % 9) - 4;
            sum[k] = m1[k] + m2[k];
        }
        const Rational lhs = holonomy_phase(model, {x, sum});
        const Rational rhs =
            (holonomy_phase(model, {x, m1}) + holonomy_phase(model, {x, m2})).mod_one();
        CHECK(lhs == rhs);
    }
}

TEST_CASE("holonomy matches the RK4 parallel-transport oracle") {
    const auto model1 = wide_model(1);
    const auto z = holonomy_numeric(model1, {RVector{Rational(1, 2)}, {1}}, 10000);
    CHECK(std::abs(z - std::complex<double>(-1.0, 0.0)) < 1e-8);

    CHECK(holonomy_numeric(model1, {RVector{Rational(1, 3)}, {0}}, 100) ==
          std::complex<double>(1.0, 0.0));

    Rng rng(2718);
    const auto model = wide_model(2);
    for (int trial = 0; trial < 100; ++trial) {
        const RVector x = testsupport::random_rvector(rng, 2, 7, 5);
        std::vector<long> m{static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 7) - 3};
        const FibreLoop loop{x, m};
        CHECK(std::abs(holonomy(model, loop) - holonomy_numeric(model, loop, 10000)) < 1e-8);
    }

    CHECK_THROWS_AS(holonomy_numeric(model1, {RVector{Rational(0)}, {1}}, 1), PreconditionError);
}

TEST_CASE("is_bohr_sommerfeld") {
    const auto model = wide_model(2);
    CHECK(is_bohr_sommerfeld(model, RVector::zero(2)));
    CHECK_FALSE(is_bohr_sommerfeld(model, RVector{Rational(1, 2), Rational(0)}));
    CHECK(is_bohr_sommerfeld(model, RVector{Rational(2), Rational(-3)}));
    CHECK_THROWS_AS(is_bohr_sommerfeld(model, RVector{Rational(100), Rational(0)}),
                    PreconditionError);
}

TEST_CASE("bohr_sommerfeld_set equals integral_points") {
    for (const char* name : {"torus-1", "torus-2", "klein", "kodaira-thurston"}) {
        for (long scale = 1; scale <= 3; ++scale) {
            const auto q = builtin_presentation(name, scale);
            CHECK(bohr_sommerfeld_set(q) == integral_points(q));
        }
    }
    const auto t1 = builtin_presentation("torus-1", 5);
    CHECK(bohr_sommerfeld_set(t1).size() == 5);
}

TEST_CASE("BS status is natural under enhanced isomorphisms") {
    Rng rng(313);
    const auto model = wide_model(2, 30);
    for (int trial = 0; trial < 40; ++trial) {
        const auto tr = random_transition(rng, 2, true, true);
        const EnhancedALModel image{model.omega_domain.affine_image(tr.base_map())};
        for (int k = 0; k < 8; ++k) {
            RVector x = k % 2 ? testsupport::random_rvector(rng, 2, 5, 4)
                              : testsupport::random_integer_vector(rng, 2, 5);
            CHECK(is_bohr_sommerfeld(model, x) ==
                  is_bohr_sommerfeld(image, tr.base_map().apply(x)));
        }
    }
}

TEST_CASE("non-integral translations admit a BS mismatch witness") {
    Rng rng(424);
    const auto model = wide_model(2, 6);
    for (int trial = 0; trial < 30; ++trial) {
        const auto tr = random_transition(rng, 2, true, false);
        CHECK_FALSE(is_enhanced_isomorphism(tr));
        const auto witness = bs_mismatch_witness(tr, model);
        REQUIRE(witness.has_value());
        const EnhancedALModel image{model.omega_domain.affine_image(tr.base_map())};
        CHECK(is_bohr_sommerfeld(model, witness->first));
        CHECK_FALSE(is_bohr_sommerfeld(image, witness->second));
    }

    const auto enhanced = random_transition(rng, 2, true, true);
    CHECK_FALSE(bs_mismatch_witness(enhanced, model).has_value());
}

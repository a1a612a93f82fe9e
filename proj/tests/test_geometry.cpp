#include <doctest.h>

#include "obstlab/error.hpp"
#include "obstlab/geometry.hpp"
#include "oracles.hpp"

using namespace obstlab;

TEST_CASE("ellipsoidal coordinate solves the confocal equation")
{
    std::mt19937_64 g(11);
    for (int N = 3; N <= 8; ++N) {
        const Ellipsoid E(oracle::random_semiaxes(g, N));
        for (int k = 0; k < 20; ++k) {
            const Vec x = oracle::random_in_ball(g, N, 8.0);
            const double lam = ellipsoidal_coordinate(E, x);
            if (E.contains(x)) {
                CHECK(lam == 0.0);
                continue;
            }
            double s = 0;
            for (int j = 0; j < N; ++j) s += x(j) * x(j) / (E.semiaxes()(j) * E.semiaxes()(j) + lam);
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("ellipsoid membership and transforms")
{
    const Ellipsoid E(Vec::Constant(3, 2.0), Vec::Ones(3));
    CHECK(E.contains(Vec::Ones(3)));
    CHECK_FALSE(E.contains(Vec::Constant(3, 3.5)));
    CHECK(E.scaled(0.5).semiaxes()(0) == 1.0);
    CHECK(E.translated(Vec::Ones(3)).center()(2) == 2.0);
    CHECK_THROWS_AS(Ellipsoid(Vec::Constant(3, -1.0)), Error);
}

TEST_CASE("paraboloid boundary and sections")
{
    Vec A(2);
    A << 1.0, 2.0;
    const Paraboloid P(A, 0.5); // x_N >= -0.5
    Vec x(3);
    x << 0.0, 0.0, -0.4;
    CHECK(P.contains(x));
    x(2) = -0.6;
    CHECK_FALSE(P.contains(x));
    Vec xp(2);
    xp << 1.0, 2.0;
    // x1^2/1 + x2^2/4 = 2 = x_N + 0.5
    CHECK(P.boundary_height(xp) == doctest::Approx(1.5));
    const Ellipsoid S = paraboloid_section(P, 3.5);
    CHECK(S.semiaxes()(0) == doctest::Approx(2.0));
    CHECK(S.semiaxes()(1) == doctest::Approx(4.0));
    CHECK(P.enclosing_gamma() == 2.0);
    CHECK_FALSE(P.isotropic());
}

TEST_CASE("envelope sets")
{
    const EnvelopeSet G = EnvelopeSet::growth(3, 0.5);
    Vec x(3);
    x << 1.0, 0.0, 4.0; // 1 < 4^{1.5}
    CHECK(G.contains(x));
    x << 9.0, 0.0, 4.0;
    CHECK_FALSE(G.contains(x));
    CHECK_THROWS_AS(EnvelopeSet::widened(3, 1.0, 0.3), Error);
    const EnvelopeSet W = EnvelopeSet::widened(3, 1.0, 0.35);
    x << 4.0, 0.0, 16.0; // 4 < 16^{0.85}
    CHECK(W.contains(x));
}

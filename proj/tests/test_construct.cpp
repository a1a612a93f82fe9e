#include <doctest.h>

#include "obstlab/construct.hpp"
#include "obstlab/error.hpp"
#include "obstlab/potential.hpp"
#include "obstlab/presets.hpp"
#include "oracles.hpp"

using namespace obstlab;

TEST_CASE("fit_ellipsoid recovers a ball")
{
    for (int N = 3; N <= 8; ++N) {
        const double R = 1.3;
        const Vec q = Vec::Constant(N, 1.0 / (2 * N));
        const Ellipsoid E = fit_ellipsoid(q, R * R / (2.0 * (N - 2)));
        for (int j = 0; j < N; ++j) CHECK(E.semiaxes()(j) == doctest::Approx(R).epsilon(1e-10));
    }
}

TEST_CASE("fit_ellipsoid inverts the interior coefficients")
{
    std::mt19937_64 g(8);
    for (int N = 3; N <= 7; ++N) {
        const Ellipsoid E(oracle::random_semiaxes(g, N, 0.5, 2.0));
        const InteriorQuadratic q = ellipsoid_interior_coefficients(E);
        const Ellipsoid F = fit_ellipsoid(q.q, q.c);
        CHECK((F.semiaxes() - E.semiaxes()).norm() < 1e-9 * E.semiaxes().norm());
    }
}

TEST_CASE("fit_ellipsoid preconditions")
{
    CHECK_THROWS_AS(fit_ellipsoid(Vec::Constant(3, 0.2), 1.0), Error); // sum != 1/2
    Vec q(3);
    q << 0.25, 0.25, 0.0;
    CHECK_THROWS_AS(fit_ellipsoid(q, 1.0), Error);
}

TEST_CASE("sequence terms satisfy the potential identity")
{
    for (const char* name : {"isotropic", "anisotropic"}) {
        const BlowdownData b = presets::blowdown(name, 6);
        for (int n : {8, 16}) {
            const EllipsoidSequenceTerm t = ellipsoid_sequence_term(b, n);
            CAPTURE(name);
            CAPTURE(n);
            CHECK(t.q.sum() == doctest::Approx(0.5).epsilon(1e-14));
            CHECK(t.q(5) == doctest::Approx(1.0 / (n * n)));
            CHECK(t.tau == doctest::Approx(b.bN * n * n / 2.0));
            CHECK(t.identity_error <= 1e-6);
        }
    }
}

TEST_CASE("richardson removes 1/n terms exactly")
{
    std::vector<int> n{8, 16, 32, 64};
    std::vector<double> v;
    for (int k : n) v.push_back(2.0 + 3.0 / k - 5.0 / (double(k) * k) + 1.0 / std::pow(k, 3));
    CHECK(richardson_limit(n, v, 3) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("paraboloid solution: sign, coincidence and laplacian")
{
    ConstructionReport rep;
    const ParaboloidSolution s = construct_paraboloid(presets::blowdown("anisotropic", 6), {}, &rep);
    const Paraboloid& P = s.paraboloid();
    CHECK(rep.extrapolation_gap < 1e-3);
    std::mt19937_64 g(1);
    int inside = 0;
    for (int k = 0; k < 200; ++k) {
        Vec x = oracle::random_in_ball(g, 6, 6.0);
        x(5) += -P.vertex_shift();
        const double u = s.value(x);
        CHECK(u >= -1e-8);
        if (P.contains(x)) {
            ++inside;
            CHECK(std::abs(u) <= 1e-6);
        } else {
            CHECK(s.hessian(x).trace() == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    CHECK(inside > 0);
}

TEST_CASE("paraboloid solution blows down to p")
{
    const ParaboloidSolution s = construct_paraboloid(presets::blowdown("anisotropic", 6), {.run_sequence = false});
    Vec x(6);
    x << 0.3, -0.5, 0.2, 0.4, -0.1, -0.6;
    double prev = 1e300;
    for (double r : {10.0, 100.0, 1000.0}) {
        const double d = std::abs(s.value(r * x) / (r * r) - s.blowdown().p(x));
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-3);
}

TEST_CASE("construction requires N >= 6")
{
    CHECK_THROWS_AS(construct_paraboloid(BlowdownData::isotropic(5)), Error);
}

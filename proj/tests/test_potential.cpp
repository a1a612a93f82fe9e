#include <doctest.h>

#include "obstlab/construct.hpp"
#include "obstlab/error.hpp"
#include "obstlab/potential.hpp"
#include "oracles.hpp"

using namespace obstlab;

TEST_CASE("newton constant matches 1/(N(N-2)|B_1|)")
{
    for (int N = 3; N <= 9; ++N)
        CHECK(newton_constant(N) == doctest::Approx(1.0 / (N * (N - 2.0) * oracle::ball_volume(N))).epsilon(1e-15));
}

TEST_CASE("ball potential inside and outside")
{
    for (int N = 3; N <= 8; ++N)
        for (double r : {0.0, 0.3, 0.99, 1.5, 4.0}) {
            Vec x = Vec::Zero(N);
            x(0) = r;
            CAPTURE(N);
            CAPTURE(r);
            CHECK(ellipsoid_potential(Ellipsoid::ball(N, 1.0), x) ==
                  doctest::Approx(oracle::ball_potential(N, 1.0, r)).epsilon(1e-11));
        }
}

TEST_CASE("gradient and hessian agree with differences of the value")
{
    std::mt19937_64 g(3);
    for (int N : {3, 5, 7}) {
        const Ellipsoid E(oracle::random_semiaxes(g, N));
        for (double s : {0.4, 3.0}) {
            const Vec x = s * E.semiaxes().cwiseProduct(Vec::Ones(N)) / std::sqrt(N);
            const Vec grad = ellipsoid_potential_gradient(E, x);
            const Mat H = ellipsoid_potential_hessian(E, x);
            for (int j = 0; j < N; ++j) {
                const double h = 1e-5;
                Vec e = Vec::Zero(N);
                e(j) = h;
                const double fd = (ellipsoid_potential(E, x + e) - ellipsoid_potential(E, x - e)) / (2 * h);
                CHECK(grad(j) == doctest::Approx(fd).epsilon(1e-7));
                const Vec gfd = (ellipsoid_potential_gradient(E, x + e) - ellipsoid_potential_gradient(E, x - e)) / (2 * h);
                CHECK((H.col(j) - gfd).norm() < 1e-6);
            }
            // Laplacian is -1 in E and 0 outside
            CHECK(H.trace() == doctest::Approx(E.contains(x) ? -1.0 : 0.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("value and gradient continuous across the boundary")
{
    Vec a(4);
    a << 1.0, 1.5, 0.7, 2.0;
    const Ellipsoid E(a);
    Vec x = Vec::Zero(4);
    x(1) = 1.5;
    Vec d = Vec::Zero(4);
    d(1) = 1e-9;
    CHECK(std::abs(ellipsoid_potential(E, x + d) - ellipsoid_potential(E, x - d)) < 1e-8);
    CHECK((ellipsoid_potential_gradient(E, x + d) - ellipsoid_potential_gradient(E, x - d)).norm() < 1e-7);
}

TEST_CASE("interior coefficients of a ball")
{
    for (int N = 3; N <= 8; ++N) {
        const InteriorQuadratic q = ellipsoid_interior_coefficients(Ellipsoid::ball(N, 2.0));
        for (int j = 0; j < N; ++j) CHECK(q.q(j) == doctest::Approx(1.0 / (2 * N)).epsilon(1e-12));
        CHECK(q.c == doctest::Approx(4.0 / (2 * (N - 2))).epsilon(1e-12));
    }
}

TEST_CASE("homoeoid gap is constant inside the inner ellipsoid")
{
    Vec a(5);
    a << 1.0, 0.5, 2.0, 1.2, 0.8;
    const Ellipsoid E(a);
    std::mt19937_64 g(5);
    const double ref = homoeoid_gap(E, 1.7, Vec::Zero(5));
    for (int k = 0; k < 30; ++k) {
        Vec x = oracle::random_in_ball(g, 5, 1.0).cwiseProduct(a) * 0.95;
        CHECK(homoeoid_gap(E, 1.7, x) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("monte carlo agrees with the closed form")
{
    Vec a(3);
    a << 1.0, 0.6, 1.4;
    const Ellipsoid E(a);
    Vec x(3);
    x << 0.9, -1.2, 0.3;
    const MonteCarloResult r =
        montecarlo_potential([&](const Vec& y) { return E.contains(y); }, Box{-a, a}, x, 200000, 42);
    const double exact = ellipsoid_potential(E, x);
    CHECK(std::abs(r.estimate - exact) < 4 * r.stderr_);
    const MonteCarloResult again =
        montecarlo_potential([&](const Vec& y) { return E.contains(y); }, Box{-a, a}, x, 200000, 42);
    CHECK(again.estimate == r.estimate);
}

TEST_CASE("paraboloid potential: closed form, sequence and laplacian")
{
    const ParaboloidSolution s = construct_paraboloid(BlowdownData::isotropic(6), {.run_sequence = false});
    const Paraboloid& P = s.paraboloid();
    const ParaboloidPotential V(P);
    Vec inside = Vec::Zero(6);
    inside(5) = 4.0;
    inside(0) = 0.5;
    Vec outside = Vec::Zero(6);
    outside(0) = 3.0;
    outside(5) = 3.5;
    CHECK(V.hessian(inside).trace() == doctest::Approx(-1.0).epsilon(1e-7));
    CHECK(std::abs(V.hessian(outside).trace()) < 1e-7);
    for (const Vec& x : {inside, outside}) {
        const PotentialValue seq = paraboloid_potential(P, x, 1e-5);
        CHECK(std::abs(seq.value - V.value(x)) < 1e-5);
        CHECK(V.value(x) > 0);
    }
}

TEST_CASE("paraboloid potential rejects N < 6")
{
    CHECK_THROWS_AS(ParaboloidPotential(Paraboloid(Vec::Ones(4), 0.0)), Error);
}

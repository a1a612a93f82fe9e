#include <doctest.h>

#include "obstlab/quadrature.hpp"
#include "obstlab/sphere.hpp"
#include "oracles.hpp"

using namespace obstlab;

TEST_CASE("gauss-gegenbauer integrates even moments exactly")
{
    for (double lambda : {0.5, 1.0, 1.5, 2.0, 3.5}) {
        const auto r = quad::gauss_gegenbauer(8, lambda);
        for (int k = 0; k < 8; ++k) {
            double s = 0;
            for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], 2 * k);
            CHECK(s == doctest::Approx(oracle::gegenbauer_moment(k, lambda)).epsilon(1e-13));
        }
    }
}

TEST_CASE("gauss-legendre on an interval")
{
    const auto r = quad::gauss_legendre(10, 0.0, 2.0);
    double s = 0;
    for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::exp(r.x[i]);
    CHECK(s == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-14));
}

TEST_CASE("sphere rule reproduces area and moments")
{
    for (int d = 2; d <= 8; ++d) {
        const SphereRule S = sphere_rule(d, uniform_counts(d, 4));
        double area = 0, m2 = 0, m4 = 0, odd = 0;
        for (std::size_t k = 0; k < S.nodes.size(); ++k) {
            const Vec& x = S.nodes[k];
            CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-14));
            area += S.weights[k];
            m2 += S.weights[k] * x(d - 1) * x(d - 1);
            m4 += S.weights[k] * std::pow(x(0), 4);
            odd += S.weights[k] * x(0) * x(d - 1);
        }
        CAPTURE(d);
        CHECK(area == doctest::Approx(oracle::sphere_area(d)).epsilon(1e-13));
        CHECK(m2 == doctest::Approx(oracle::sphere_area(d) / d).epsilon(1e-13));
        CHECK(m4 == doctest::Approx(oracle::sphere_fourth_moment(d)).epsilon(1e-12));
        CHECK(std::abs(odd) < 1e-13);
    }
}

TEST_CASE("split first angle still integrates constants")
{
    const SphereRule S = sphere_rule(5, {6, 1, 1, 1}, true, 2);
    double area = 0, upper = 0;
    for (std::size_t k = 0; k < S.nodes.size(); ++k) {
        area += S.weights[k];
        if (S.nodes[k](2) > 0) upper += S.weights[k];
    }
    CHECK(area == doctest::Approx(oracle::sphere_area(5)).epsilon(1e-13));
    CHECK(upper == doctest::Approx(0.5 * oracle::sphere_area(5)).epsilon(1e-13));
}

TEST_CASE("polar integrator: ball volume and a radial moment")
{
    for (int N : {3, 6}) {
        const PolarIntegrator I(N, PolarOptions{});
        const Vec c = Vec::Zero(N);
        const auto v = I.ball(
            c, 2.0, [N](double t) { return std::pow(t, N - 1); },
            [](const Vec& y, double* out) {
                out[0] = 1.0;
                out[1] = y.squaredNorm();
            },
            2, nullptr);
        CHECK(v[0] == doctest::Approx(oracle::ball_volume(N) * std::pow(2.0, N)).epsilon(1e-12));
        CHECK(v[1] == doctest::Approx(oracle::sphere_area(N) * std::pow(2.0, N + 2) / (N + 2)).epsilon(1e-12));
    }
}

TEST_CASE("polar options refine all but unit counts")
{
    PolarOptions o;
    o.sphere = {4, 1, 1};
    const PolarOptions r = o.refined(1.5);
    CHECK(r.n_radial == 36);
    CHECK(r.sphere[0] == 6);
    CHECK(r.sphere[1] == 1);
}

#include <doctest.h>

#include "obstlab/diagnostics.hpp"
#include "obstlab/error.hpp"
#include "obstlab/presets.hpp"
#include "oracles.hpp"

using namespace obstlab;

namespace {

FieldPtr zero_field(int N) { return quadratic_field(Mat::Zero(N, N), Vec::Zero(N), 0.0); }

FieldPtr linear_field(int N, int axis)
{
    Vec l = Vec::Zero(N);
    l(axis) = 1.0;
    return quadratic_field(Mat::Zero(N, N), l, 0.0);
}

const ParaboloidSolution& iso6()
{
    static const ParaboloidSolution s = construct_paraboloid(BlowdownData::isotropic(6), {.run_sequence = false});
    return s;
}

} // namespace

TEST_CASE("F1 of a linear function is -|S^{N-1}| / (N r^2)")
{
    for (int N : {3, 6}) {
        const FieldPtr u = linear_field(N, N - 1);
        for (double r : {0.5, 2.0}) {
            const FrequencyValue v = frequency_F1(u, zero_field(N), r);
            CHECK(v.F1 == doctest::Approx(-oracle::sphere_area(N) / (N * r * r)).epsilon(1e-10));
        }
    }
}

TEST_CASE("F1 vanishes on homogeneous harmonic quadratics")
{
    Mat Q = Mat::Zero(6, 6);
    Q(0, 0) = 1.0;
    Q(1, 1) = -1.0;
    Q(2, 3) = Q(3, 2) = 0.5;
    const FrequencyValue v = frequency_F1(quadratic_field(Q, Vec::Zero(6), 0.0), zero_field(6), 1.0);
    CHECK(std::abs(v.F1) < 1e-10);
    CHECK(v.dirichlet > 1.0);
}

TEST_CASE("frequency report on the constructed solution")
{
    const FrequencyReport r =
        frequency_report(paraboloid_field(iso6()), blowdown_field(iso6().blowdown()), {0.5, 1.0, 2.0});
    CHECK(r.monotone());
    CHECK(r.nonpositive());
    CHECK(r.values.size() == 3);
}

TEST_CASE("P2' projection recovers a harmonic quadratic")
{
    SphereSamples S = sphere_samples(6, 6);
    for (const Vec& x : S.points) S.values.push_back(0.7 * x(0) * x(1) + 0.4 * (x(2) * x(2) - x(4) * x(4)) + 1.0);
    const HarmonicQuadratic h = project_P2prime(S);
    Vec y(6);
    y << 0.2, -0.3, 0.5, 0.1, 0.4, 0.9;
    CHECK(h.value(y) == doctest::Approx(0.7 * y(0) * y(1) + 0.4 * (y(2) * y(2) - y(4) * y(4))).epsilon(1e-10));
}

TEST_CASE("P2' projection needs enough samples")
{
    SphereSamples S;
    S.dim = 6;
    S.points = {Vec::Ones(6)};
    S.weights = {1.0};
    S.values = {0.0};
    CHECK_THROWS_AS(project_P2prime(S), Error);
}

TEST_CASE("doubling exponent of a homogeneous perturbation")
{
    // u = p + x_1^3: f(r) ~ r^3, u = p + x_1: f(r) ~ r
    const FieldPtr p = blowdown_field(BlowdownData::isotropic(6));
    const FieldPtr cubic =
        function_field(6, [](const Vec& x) { return std::pow(x(0), 3); }, [](const Vec& x) {
            Vec g = Vec::Zero(6);
            g(0) = 3 * x(0) * x(0);
            return g;
        });
    CHECK(doubling_f(sum_field(p, cubic), p, 1.5).log2_ratio == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(doubling_f(sum_field(p, linear_field(6, 2)), p, 1.5).log2_ratio == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(doubling_f(p, p, 1.0).degenerate);
}

TEST_CASE("ACF of a linear function is |S^{N-1}|^2 / 16 at every radius")
{
    const int N = 6;
    const FieldPtr h = linear_field(N, 0);
    for (double r : {0.5, 2.0}) {
        const ACFValue a = acf(h, r, Vec::Zero(N), acf_options(N, 0));
        CHECK(a.phi == doctest::Approx(std::pow(oracle::sphere_area(N), 2) / 16.0).epsilon(1e-10));
    }
}

TEST_CASE("ACF of the constructed solution is nondecreasing")
{
    Vec e = Vec::Zero(6);
    e(0) = 1.0;
    const FieldPtr h = directional_derivative(paraboloid_field(iso6()), e);
    double prev = 0;
    for (double r : {0.5, 1.0, 2.0}) {
        const ACFValue a = acf(h, r, Vec::Zero(6), acf_options(6, 0));
        CHECK(a.phi >= prev - a.error);
        prev = a.phi;
    }
}

TEST_CASE("growth envelope on a synthetic paraboloid mask")
{
    const GridSpec g = GridSpec::from_spacing(2.0, 0.0, 4.0, 1.0 / 16);
    CoincidenceMask m;
    m.nr = g.nr;
    m.nz = g.nz;
    m.mask.assign(std::size_t(g.nr) * g.nz, 0);
    for (int j = 0; j < g.nz; ++j)
        for (int i = 0; i < g.nr; ++i) {
            const double rho = i * g.hr(), y = j * g.hz();
            m.mask[std::size_t(j) * g.nr + i] = rho * rho <= y;
        }
    // |x'|^2 <= y lies in |x'|^2 < y^{1+delta} exactly where y > 1
    const EnvelopeReport r = growth_envelope_check(m, g, 0.5);
    CHECK(r.a_est <= 1.0 + 1e-12);
    CHECK(r.a_est > 0.9);
    CHECK(r.violation_count > 0);
    CHECK_THROWS_AS(growth_envelope_check(m, g, 1.5), Error);
}

TEST_CASE("potential decay scan")
{
    const Paraboloid& P = iso6().paraboloid();
    const DecayTable t = potential_decay_scan(P, P.enclosing_gamma(), 0.35, {1e2, 1e3});
    CHECK(t.edge_decreasing);
    CHECK(t.off_axis_decreasing);
    CHECK_THROWS_AS(potential_decay_scan(P, P.enclosing_gamma(), 0.3, {1e2, 1e3}), Error);
    CHECK_THROWS_AS(potential_decay_scan(P, 0.5 * P.enclosing_gamma(), 0.35, {1e2, 1e3}), Error);
}

TEST_CASE("subquadratic ratios of a ball potential")
{
    const SubquadraticTable t = subquadratic_check(PotentialEvaluator::ellipsoid(Ellipsoid::ball(6, 1.0)), {2.0, 4.0, 8.0});
    CHECK(t.decreasing);
    // V(x)/|x|^2 = R^N |x|^{-N} / (N (N-2))
    CHECK(t.rows[1].max_ratio == doctest::Approx(std::pow(4.0, -6) / 24.0).epsilon(1e-8));
}

TEST_CASE("comparison and sliding at a coarse grid")
{
    const ParaboloidSolution& s = iso6();
    const double Lambda = 0.5, h = 1.0 / 16;
    const ParaboloidSolution sh = s.shifted(Lambda);
    const GridSolution u = solve_obstacle(6, boundary_from_field(paraboloid_field(sh)),
                                          presets::solve_box(s.paraboloid(), h, Lambda));
    Expansion e;
    e.l = Vec::Zero(6);
    e.l(5) = -1.0;
    e.c = sh.c_P();
    e.c_P = s.c_P();
    const ComparisonReport r = compare_and_slide(u, s.blowdown(), e, s.paraboloid());
    CHECK(r.lambda_bar == doctest::Approx(Lambda).epsilon(1e-12));
    CHECK(r.verdict);
    CHECK(r.symdiff_ok);
}

TEST_CASE("hele-shaw residual of one bump shrinks under refinement")
{
    const auto bumps = presets::hele_shaw_bumps(iso6().paraboloid());
    const double coarse = hele_shaw_weak_residual(iso6(), 1.0, bumps[0], 8);
    const double fine = hele_shaw_weak_residual(iso6(), 1.0, bumps[0], 16);
    CHECK(std::abs(fine) * 3 < std::abs(coarse));
}

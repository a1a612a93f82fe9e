#include <doctest.h>

#include "obstlab/error.hpp"
#include "obstlab/field.hpp"
#include "obstlab/presets.hpp"
#include "obstlab/solver.hpp"

using namespace obstlab;

TEST_CASE("slab obstacle problem has the one-sided parabola as solution")
{
    // u(0) = 0, u(2) = 1/2: exact u = (z - 1)_+^2 / 2
    const GridSolution s = solve_slab([](double z) { return z > 1 ? 0.5 * (z - 1) * (z - 1) : 0.0; }, 0.0, 2.0, 65);
    for (int j = 0; j < s.grid.nz; ++j) {
        const double z = s.z(j), exact = z > 1 ? 0.5 * (z - 1) * (z - 1) : 0.0;
        CHECK(std::abs(s.at(0, j) - exact) < 1e-8);
    }
}

TEST_CASE("stencil is exact for positive quadratics with unit laplacian")
{
    // u = (rho^2 + z^2) / (2N) + 1 > 0 and Delta u = 1 in R^N
    for (int N : {3, 6, 8}) {
        const BoundaryData bc = [N](double rho, double z) { return (rho * rho + z * z) / (2.0 * N) + 1.0; };
        const GridSolution s = solve_obstacle(N, bc, GridSpec::from_spacing(1.0, -1.0, 1.0, 1.0 / 16));
        double err = 0;
        for (int j = 0; j < s.grid.nz; ++j)
            for (int i = 0; i < s.grid.nr; ++i) err = std::max(err, std::abs(s.at(i, j) - bc(s.rho(i), s.z(j))));
        CAPTURE(N);
        CHECK(err < 1e-8);
        CHECK(s.laplacian(4, 7) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(s.complementarity_residual() <= 1e-6);
        CHECK(coincidence_mask(s).count == 0);
    }
}

TEST_CASE("solve of the paraboloid data converges at second order")
{
    const ParaboloidSolution sol = construct_paraboloid(BlowdownData::isotropic(6), {.run_sequence = false});
    const FieldPtr uP = paraboloid_field(sol);
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32}) {
        const GridSolution s = solve_obstacle(6, boundary_from_field(uP), presets::solve_box(sol.paraboloid(), h));
        double e = 0;
        for (int j = 0; j < s.grid.nz; ++j)
            for (int i = 0; i < s.grid.nr; ++i) {
                Vec x = Vec::Zero(6);
                x(0) = s.rho(i);
                x(5) = s.z(j);
                e = std::max(e, std::abs(s.at(i, j) - uP->value(x)));
            }
        for (double v : s.u) CHECK(v >= 0.0);
        errs.push_back(e);
        const CoincidenceMask m = coincidence_mask(s);
        CHECK(m.count > 0);
        CHECK(m.columns_contiguous);
    }
    CHECK(errs[0] / errs[1] > 2.5);
}

TEST_CASE("negative boundary data is rejected")
{
    CHECK_THROWS_AS(solve_obstacle(6, [](double, double) { return -1.0; }, GridSpec::from_spacing(1, 0, 1, 0.25)),
                    Error);
}

TEST_CASE("sweep budget exhaustion reports history")
{
    SolveOptions o;
    o.max_sweeps = 3;
    try {
        solve_obstacle(6, [](double rho, double z) { return 1.0 + rho * rho + z * z; },
                       GridSpec::from_spacing(1, 0, 1, 1.0 / 32), o);
        FAIL("expected a budget error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::IterationBudget);
    }
}

TEST_CASE("interpolation and grid fields")
{
    const BoundaryData bc = [](double rho, double z) { return (rho * rho + z * z) / 12.0 + 1.0; };
    auto s = std::make_shared<const GridSolution>(solve_obstacle(6, bc, GridSpec::from_spacing(1, -1, 1, 1.0 / 16)));
    CHECK(s->interpolate(0.5, 0.25) == doctest::Approx(bc(0.5, 0.25)).epsilon(2e-3));
    CHECK_THROWS_AS(s->interpolate(1.5, 0.0), Error);
    const FieldPtr f = grid_field(s);
    Vec x = Vec::Zero(6);
    x(1) = 0.3;
    x(5) = -0.2;
    CHECK(f->value(x) == doctest::Approx(bc(0.3, -0.2)).epsilon(2e-3));
    CHECK(f->gradient_source() == "finite-difference");
    const FieldPtr g = rescale(f, 0.5); // u(r x) / r^2
    CHECK(g->value(x) == doctest::Approx(f->value(0.5 * x) * 4.0));
}

TEST_CASE("blow-down estimate of an exact quadratic")
{
    Mat Q = Mat::Zero(6, 6);
    for (int j = 0; j < 5; ++j) Q(j, j) = 0.1;
    const FieldPtr p = quadratic_field(Q, Vec::Zero(6), 0.0);
    const BlowdownEstimate b = blowdown_estimate(p, {1.0, 2.0});
    CHECK(b.isotropic);
    CHECK(b.trace.back() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(b.residual.back() < 1e-10);
    CHECK(b.trace_ok);
}

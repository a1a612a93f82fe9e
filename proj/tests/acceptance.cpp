// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "obstlab/diagnostics.hpp"
#include "obstlab/error.hpp"
#include "obstlab/presets.hpp"
#include "oracles.hpp"

using namespace obstlab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... v)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
}

const ParaboloidSolution& solution(const char* preset)
{
    static const ParaboloidSolution iso = construct_paraboloid(presets::blowdown("isotropic", 6));
    static const ParaboloidSolution aniso = construct_paraboloid(presets::blowdown("anisotropic", 6));
    return std::string(preset) == "isotropic" ? iso : aniso;
}

Outcome trace_identity()
{
    std::mt19937_64 g(20240601);
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        const int N = 3 + k % 6;
        const Ellipsoid E(oracle::random_semiaxes(g, N, 0.05, 20.0));
        worst = std::max(worst, std::abs(ellipsoid_interior_coefficients(E).q.sum() - 0.5));
    }
    return {worst <= 1e-10, fmt("max |sum q - 1/2| = %.2e over 1000 ellipsoids (tol 1e-10)", worst)};
}

Outcome ball_oracle()
{
    double worst = 0;
    for (int N = 3; N <= 8; ++N)
        for (double R : {0.5, 1.0, 3.0}) {
            const Ellipsoid B = Ellipsoid::ball(N, R);
            const double v = ellipsoid_potential(B, Vec::Zero(N));
            worst = std::max(worst, std::abs(v - R * R / (2.0 * (N - 2))) / (R * R));
            const Vec q = ellipsoid_interior_coefficients(B).q;
            worst = std::max(worst, (q.array() - 1.0 / (2 * N)).abs().maxCoeff());
        }
    return {worst <= 1e-10, fmt("max deviation %.2e for N = 3..8 (tol 1e-10)", worst)};
}

Outcome no_gravity()
{
    std::mt19937_64 g(77);
    std::uniform_real_distribution<double> T(1.1, 2.5);
    double worst = 0;
    for (int k = 0; k < 20; ++k) {
        const int N = 3 + k % 6;
        const Ellipsoid E(oracle::random_semiaxes(g, N));
        const double t = T(g);
        double lo = 1e300, hi = -1e300;
        for (int i = 0; i < 100; ++i) {
            const Vec x = 0.999 * oracle::random_in_ball(g, N, 1.0).cwiseProduct(E.semiaxes());
            const double v = homoeoid_gap(E, t, x);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        worst = std::max(worst, hi - lo);
    }
    return {worst <= 1e-10, fmt("max spread %.2e over 20 ellipsoids x 100 points (tol 1e-10)", worst)};
}

Outcome ellipsoid_sequence()
{
    bool ok = true;
    std::string detail;
    for (const char* preset : {"isotropic", "anisotropic"}) {
        const BlowdownData b = presets::blowdown(preset, 6);
        double worst = 0;
        std::vector<Vec> B;
        for (int n : {8, 16, 32, 64}) {
            const EllipsoidSequenceTerm t = ellipsoid_sequence_term(b, n, 20);
            worst = std::max(worst, t.identity_error);
            B.push_back(t.aperture());
        }
        const double d1 = (B[2] - B[1]).cwiseAbs().maxCoeff(), d2 = (B[3] - B[2]).cwiseAbs().maxCoeff();
        const double order = std::log2(d1 / d2);
        ok = ok && worst <= 1e-6 && order >= 1.5 && order <= 2.5;
        detail += fmt("%s: identity %.1e, aperture order %.2f; ", preset, worst, order);
    }
    return {ok, detail + "(tol 1e-6, order in [1.5, 2.5])"};
}

Outcome self_consistency()
{
    bool ok = true;
    std::string detail;
    for (const char* preset : {"isotropic", "anisotropic"}) {
        const ParaboloidSolution& s = solution(preset);
        const Paraboloid& P = s.paraboloid();
        const int N = s.dim();
        std::mt19937_64 g(99);
        double min_u = 1e300, max_in = 0;
        double e1 = 0, e2 = 0;
        int outside = 0;
        auto lap = [&](const Vec& x, double h) {
            double acc = 0;
            const double u0 = s.value(x);
            for (int j = 0; j < N; ++j) {
                Vec d = Vec::Zero(N);
                d(j) = h;
                acc += (s.value(x + d) - 2 * u0 + s.value(x - d)) / (h * h);
            }
            return acc;
        };
        for (int k = 0; k < 400; ++k) {
            Vec x = oracle::random_in_ball(g, N, 6.0);
            x(N - 1) -= P.vertex_shift();
            const double u = s.value(x);
            min_u = std::min(min_u, u);
            if (P.contains(x)) {
                max_in = std::max(max_in, u);
                continue;
            }
            // every stencil arm must stay in the smooth region outside P
            bool clear = true;
            for (int j = 0; j < N && clear; ++j)
                for (int m = -8; m <= 8 && clear; ++m) {
                    Vec y = x;
                    y(j) += 0.05 * m;
                    clear = !P.contains(y);
                }
            if (!clear) continue;
            ++outside;
            e1 = std::max(e1, std::abs(lap(x, 0.2) - 1.0));
            e2 = std::max(e2, std::abs(lap(x, 0.1) - 1.0));
        }
        const double ratio = e1 / e2;
        ok = ok && min_u >= -1e-8 && max_in <= 1e-6 && outside > 50 && ratio >= 3.0;
        detail += fmt("%s%s: min u %.1e, max u on P %.1e, lap err %.1e -> %.1e (x%.2f, %d pts)", detail.empty() ? "" : "; ", preset, min_u,
                      max_in, e1, e2, ratio, outside);
    }
    return {ok, detail};
}

Outcome frequency_suite()
{
    const ParaboloidSolution& s = solution("isotropic");
    const FieldPtr u = paraboloid_field(s), p = blowdown_field(s.blowdown());
    const FrequencyReport r = frequency_report(u, p, {0.25, 0.5, 1.0, 2.0, 4.0});
    Mat Q = Mat::Zero(6, 6);
    Q(0, 0) = 0.3;
    Q(1, 1) = -0.3;
    Q(0, 2) = Q(2, 0) = 0.2;
    const FrequencyValue a = frequency_F1(u, p, 1.0);
    const FrequencyValue b = frequency_F1(sum_field(u, quadratic_field(Q, Vec::Zero(6), 0.0)), p, 1.0);
    const double tol = a.error + b.error + 1e-9;
    const double diff = std::abs(a.F1 - b.F1);
    double max_f = -1e300;
    for (const auto& v : r.values) max_f = std::max(max_f, v.F1);
    return {r.monotone() && r.nonpositive() && diff <= tol,
            fmt("violations %d, max F1 %.3e, harmonic shift |dF1| = %.1e (tol %.1e)", r.violations,
                max_f, diff, tol)};
}

Outcome decay_suite()
{
    const Paraboloid& P = solution("isotropic").paraboloid();
    const DecayTable d = potential_decay_scan(P, P.enclosing_gamma(), 7.0 / 20.0, {1e2, 1e3, 1e4});
    const SubquadraticTable q = subquadratic_check(PotentialEvaluator::paraboloid(P), {1e2, 1e3, 1e4});
    std::string vals;
    for (const auto& r : d.rows) vals += fmt("%.3g/%.3g ", r.edge_value, r.off_axis);
    return {d.edge_decreasing && d.off_axis_decreasing && q.decreasing,
            fmt("edge/off-axis %sratios %.3g %.3g %.3g", vals.c_str(), q.rows[0].max_ratio, q.rows[1].max_ratio,
                q.rows[2].max_ratio)};
}

Outcome comparison()
{
    const ParaboloidSolution& s = solution("isotropic");
    const double Lambda = 0.5, h = 1.0 / 64;
    const ParaboloidSolution sh = s.shifted(Lambda);
    SolveOptions o;
    o.auto_omega = true;
    const GridSolution u = solve_obstacle(6, boundary_from_field(paraboloid_field(sh)),
                                          presets::solve_box(s.paraboloid(), h, Lambda), o);
    Expansion e;
    e.l = Vec::Zero(6);
    e.l(5) = -s.blowdown().bN;
    e.c = sh.c_P();
    e.c_P = s.c_P();
    CompareOptions co;
    co.strict = false;
    const ComparisonReport r = compare_and_slide(u, s.blowdown(), e, s.paraboloid(), co);
    double gap = 0;
    for (const auto& row : r.rows)
        if (row.tested) gap = std::max(gap, row.max_gap);
    return {r.verdict && r.symdiff_ok,
            fmt("lambda_bar %.3f, max gap %.1e (tol %.1e), symdiff %.4f (tol %.4f)", r.lambda_bar, gap, r.tolerance,
                r.symdiff_fraction, 5 * h)};
}

Outcome solver_convergence()
{
    const ParaboloidSolution& s = solution("isotropic");
    const FieldPtr uP = paraboloid_field(s);
    double errs[2];
    bool maxp = true;
    int k = 0;
    for (double h : {1.0 / 32, 1.0 / 64}) {
        SolveOptions o;
        o.auto_omega = true;
        const GridSolution g = solve_obstacle(6, boundary_from_field(uP), presets::solve_box(s.paraboloid(), h), o);
        double e = 0, interior_max = 0, boundary_max = 0;
        for (int j = 0; j < g.grid.nz; ++j)
            for (int i = 0; i < g.grid.nr; ++i) {
                Vec x = Vec::Zero(6);
                x(0) = g.rho(i);
                x(5) = g.z(j);
                e = std::max(e, std::abs(g.at(i, j) - uP->value(x)));
                maxp = maxp && g.at(i, j) >= 0;
                (g.interior(i, j) ? interior_max : boundary_max) =
                    std::max(g.interior(i, j) ? interior_max : boundary_max, g.at(i, j));
            }
        maxp = maxp && interior_max <= boundary_max;
        errs[k++] = e;
    }
    const double ratio = errs[0] / errs[1];
    return {maxp && ratio >= 3.0,
            fmt("max error %.2e -> %.2e (x%.2f, need >= 3), max principle %s", errs[0], errs[1], ratio,
                maxp ? "holds" : "fails")};
}

Outcome hele_shaw()
{
    const ParaboloidSolution& s = solution("isotropic");
    const auto rows = hele_shaw_residual(s, 1.0, presets::hele_shaw_bumps(s.paraboloid()), 8);
    bool ok = rows.size() == 5;
    double worst = 1e300;
    for (const auto& r : rows) {
        ok = ok && r.ratio >= 3.0;
        worst = std::min(worst, r.ratio);
    }
    return {ok, fmt("smallest reduction x%.2f over %d bumps, n = 8 -> 16 (need >= 3)", worst, int(rows.size()))};
}

Outcome acf_monotone()
{
    const ParaboloidSolution& s = solution("isotropic");
    Vec e = Vec::Zero(6);
    e(0) = 1.0;
    const FieldPtr h = directional_derivative(paraboloid_field(s), e);
    bool ok = true;
    double prev = -1, prev_err = 0;
    std::string vals;
    for (double r : {0.5, 1.0, 2.0}) {
        const ACFValue a = acf(h, r, Vec::Zero(6), acf_options(6, 0));
        if (prev >= 0) ok = ok && a.phi >= prev - (a.error + prev_err + 1e-12);
        prev = a.phi;
        prev_err = a.error;
        vals += fmt("%.7f ", a.phi);
    }
    return {ok, "phi = " + vals};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"trace identity", trace_identity},
        {"ball oracle", ball_oracle},
        {"no-gravity", no_gravity},
        {"ellipsoid sequence identity", ellipsoid_sequence},
        {"paraboloid solution self-consistency", self_consistency},
        {"frequency suite", frequency_suite},
        {"decay suite", decay_suite},
        {"comparison and sliding", comparison},
        {"solver convergence", solver_convergence},
        {"hele-shaw residual", hele_shaw},
        {"acf monotonicity", acf_monotone},
    };
    int failed = 0, k = 0;
    for (const auto& [name, run] : criteria) {
        ++k;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const Error& e) {
            o = {false, std::string("error: ") + e.to_json().dump()};
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-4s %2d %-38s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str(), dt);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%d criteria passed\n", k - failed, k);
    return failed == 0 ? 0 : 1;
}

#include "obstlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "obstlab/error.hpp"
#include "obstlab/quadrature.hpp"

namespace obstlab {

namespace {

PolarOptions with_sphere(PolarOptions o, int N, bool axisymmetric)
{
    if (o.sphere.empty() && !axisymmetric) o.sphere = uniform_counts(N - 1, 4);
    return o;
}

} // namespace

// ---- frequency -------------------------------------------------------------

FrequencyValue frequency_F1(FieldPtr u, FieldPtr p, double r, const QuadratureOptions& opt)
{
    if (!(r > 0)) throw Error(ErrorKind::InvalidInput, "frequency_F1 needs r > 0", {{"r", r}});
    const int N = u->dim();
    const FieldPtr v = sum_field(rescale(u, r), p, -1.0);
    const Vec c0 = Vec::Zero(N);
    const auto rb = v->radial_breaks(c0);
    auto breaks = [&](double t, const Vec& w) { return v->polar_breaks(c0, t, w); };

    auto run = [&](const PolarOptions& o) {
        const PolarIntegrator I(N, o);
        const auto D = I.ball(
            c0, 1.0, [&](double t) { return std::pow(t, N - 1); },
            [&](const Vec& y, double* out) { out[0] = v->gradient(y).squaredNorm(); }, 1, breaks, rb);
        const auto T = I.sphere(
            c0, 1.0,
            [&](const Vec& y, double* out) {
                const double s = v->value(y);
                out[0] = s * s;
            },
            1, breaks);
        return std::pair{D[0], T[0]};
    };
    const PolarOptions base = with_sphere(opt.polar, N, v->axisymmetric());
    const auto [D0, T0] = run(base);
    const auto [D1, T1] = run(base.refined(opt.refine));

    FrequencyValue fv;
    fv.r = r;
    fv.dirichlet = D1;
    fv.trace = T1;
    fv.F1 = D1 - 2.0 * T1;
    fv.error = std::abs(fv.F1 - (D0 - 2.0 * T0));
    return fv;
}

FrequencyReport frequency_report(FieldPtr u, FieldPtr p, const std::vector<double>& radii,
                                 const QuadratureOptions& opt, double tol_floor)
{
    FrequencyReport rep;
    rep.gradient_source = sum_field(u, p, -1.0)->gradient_source();
    for (double r : radii) rep.values.push_back(frequency_F1(u, p, r, opt));
    for (std::size_t k = 0; k < rep.values.size(); ++k) {
        const auto& a = rep.values[k];
        const double over = a.F1 - (a.error + tol_floor);
        if (over > 0) {
            ++rep.positive;
            rep.max_positive = std::max(rep.max_positive, a.F1);
        }
        if (k + 1 < rep.values.size()) {
            const auto& b = rep.values[k + 1];
            const double drop = a.F1 - b.F1;
            if (drop > a.error + b.error + tol_floor) {
                ++rep.violations;
                rep.max_violation = std::max(rep.max_violation, drop);
            }
        }
    }
    return rep;
}

// ---- projection ------------------------------------------------------------

SphereSamples sphere_samples(int N, int nodes)
{
    const SphereRule rule = sphere_rule(N, uniform_counts(N, nodes));
    SphereSamples s;
    s.dim = N;
    s.points = rule.nodes;
    s.weights = rule.weights;
    return s;
}

namespace {

struct P2Basis {
    int n;
    std::vector<std::pair<int, int>> mixed;
    int size() const { return static_cast<int>(mixed.size()) + n - 1; }
    explicit P2Basis(int n_) : n(n_)
    {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) mixed.emplace_back(i, j);
    }
    void eval(const Vec& x, double* out) const
    {
        int k = 0;
        for (auto [i, j] : mixed) out[k++] = x(i) * x(j);
        for (int i = 0; i + 1 < n; ++i) out[k++] = x(i) * x(i) - x(i + 1) * x(i + 1);
    }
};

} // namespace

double HarmonicQuadratic::value(const Vec& x) const
{
    const int n = dim - 1;
    return x.head(n).dot(Q * x.head(n));
}

HarmonicQuadratic project_P2prime(const SphereSamples& g)
{
    const int N = g.dim;
    if (N < 3) throw Error(ErrorKind::UnsupportedDimension, "projection needs N >= 3");
    if (g.values.size() != g.points.size() || g.weights.size() != g.points.size())
        throw Error(ErrorKind::InvalidInput, "sphere samples: points, weights and values differ in length");
    const P2Basis basis(N - 1);
    const int m = basis.size();
    if (static_cast<int>(g.points.size()) < 3 * m)
        throw Error(ErrorKind::Precondition, "too few sphere samples for the projection",
                    {{"samples", g.points.size()}, {"basis", m}});

    Mat G = Mat::Zero(m, m);
    Vec rhs = Vec::Zero(m);
    std::vector<double> phi(m);
    for (std::size_t k = 0; k < g.points.size(); ++k) {
        basis.eval(g.points[k], phi.data());
        const Eigen::Map<const Vec> f(phi.data(), m);
        G.noalias() += g.weights[k] * f * f.transpose();
        rhs += g.weights[k] * g.values[k] * f;
    }
    const Eigen::SelfAdjointEigenSolver<Mat> es(G);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 1e-10 * hi))
        throw Error(ErrorKind::Precondition, "sphere samples do not resolve the harmonic quadratics",
                    {{"min_eigenvalue", lo}, {"max_eigenvalue", hi}});

    HarmonicQuadratic h;
    h.dim = N;
    h.coefficients = G.ldlt().solve(rhs);
    const int n = N - 1;
    h.Q = Mat::Zero(n, n);
    int k = 0;
    for (auto [i, j] : basis.mixed) {
        h.Q(i, j) = h.Q(j, i) = 0.5 * h.coefficients(k++);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double c = h.coefficients(k++);
        h.Q(i, i) += c;
        h.Q(i + 1, i + 1) -= c;
    }
    return h;
}

DoublingValue doubling_f(FieldPtr u, FieldPtr p, double r, int nodes)
{
    if (!(r > 0)) throw Error(ErrorKind::InvalidInput, "doubling_f needs r > 0", {{"r", r}});
    const int N = u->dim();
    SphereSamples S = sphere_samples(N, nodes);
    auto f_at = [&](double rho) {
        S.values.assign(S.points.size(), 0.0);
        parallel_for(static_cast<int>(S.points.size()), [&](int k) {
            const Vec& x = S.points[k];
            S.values[k] = u->value(rho * x) / (rho * rho) - p->value(x);
        });
        const HarmonicQuadratic h = project_P2prime(S);
        double acc = 0.0;
        for (std::size_t k = 0; k < S.points.size(); ++k) {
            const double d = S.values[k] - h.value(S.points[k]);
            acc += S.weights[k] * d * d;
        }
        return rho * rho * std::sqrt(acc);
    };
    DoublingValue d;
    d.r = r;
    d.f_r = f_at(r);
    d.f_2r = f_at(2 * r);
    d.degenerate = !(d.f_r > 1e-12 * r * r);
    d.log2_ratio = d.degenerate ? std::nan("") : std::log2(d.f_2r / d.f_r);
    return d;
}

// ---- ACF -------------------------------------------------------------------

QuadratureOptions acf_options(int N, int axis, int nodes)
{
    QuadratureOptions o;
    o.polar.n_radial = nodes;
    o.polar.n_polar = nodes;
    o.polar.sphere.assign(N - 2, 1);
    if (N - 2 >= 2) {
        o.polar.sphere[0] = nodes;
        o.polar.split_first = true;
        o.polar.first_axis = axis;
    } else {
        o.polar.sphere[0] = 4 * nodes;
    }
    return o;
}

ACFValue acf(FieldPtr h, double r, const Vec& x, const QuadratureOptions& opt)
{
    if (!(r > 0)) throw Error(ErrorKind::InvalidInput, "acf needs r > 0", {{"r", r}});
    const int N = h->dim();
    if (x.size() != N) throw Error(ErrorKind::InvalidInput, "acf: point dimension mismatch");
    const auto rb = h->radial_breaks(x);
    auto breaks = [&](double t, const Vec& w) { return h->polar_breaks(x, t, w); };
    auto run = [&](const PolarOptions& o) {
        const PolarIntegrator I(N, o);
        // |y - x|^{2-N} against the polar volume element t^{N-1} leaves t
        return I.ball(
            x, r, [](double t) { return t; },
            [&](const Vec& y, double* out) {
                const double v = h->value(y);
                const double g2 = h->gradient(y).squaredNorm();
                out[0] = v > 0 ? g2 : 0.0;
                out[1] = v < 0 ? g2 : 0.0;
            },
            2, breaks, rb);
    };
    const PolarOptions base = with_sphere(opt.polar, N, h->axisymmetric());
    const auto a = run(base);
    const auto b = run(base.refined(opt.refine));
    ACFValue out;
    out.r = r;
    out.I_plus = b[0];
    out.I_minus = b[1];
    const double r4 = std::pow(r, 4);
    out.phi = b[0] * b[1] / r4;
    out.error = std::abs(out.phi - a[0] * a[1] / r4);
    return out;
}

// ---- growth envelope -------------------------------------------------------

EnvelopeReport growth_envelope_check(const CoincidenceMask& mask, const GridSpec& grid, double delta,
                                     double shift)
{
    if (!(delta > 0 && delta < 1))
        throw Error(ErrorKind::Precondition, "growth envelope needs delta in (0, 1)", {{"delta", delta}});
    if (mask.nr != grid.nr || mask.nz != grid.nz)
        throw Error(ErrorKind::InvalidInput, "mask and grid differ in shape");
    EnvelopeReport rep;
    rep.delta = delta;
    rep.a_est = grid.z0 + shift;
    std::vector<EnvelopeNode> bad;
    for (int j = 0; j < mask.nz; ++j)
        for (int i = 0; i < mask.nr; ++i) {
            if (!mask.at(i, j)) continue;
            ++rep.checked;
            const double rho = i * grid.hr(), y = grid.z0 + j * grid.hz() + shift;
            if (y <= 0 || rho * rho >= std::pow(y, 1.0 + delta)) bad.push_back({i, j, rho, y});
        }
    rep.violation_count = static_cast<long>(bad.size());
    for (const auto& b : bad) rep.a_est = std::max(rep.a_est, b.height);
    std::stable_sort(bad.begin(), bad.end(),
                     [](const EnvelopeNode& a, const EnvelopeNode& b) { return a.height > b.height; });
    if (bad.size() > 100) bad.resize(100);
    rep.violations = std::move(bad);
    for (int j = 0; j < mask.nz; ++j) {
        const double y = grid.z0 + j * grid.hz() + shift;
        if (y > rep.a_est) break;
        for (int i = 0; i < mask.nr; ++i)
            if (mask.at(i, j)) {
                rep.below_max_rho = std::max(rep.below_max_rho, i * grid.hr());
                if (i == mask.nr - 1 && mask.nr > 1) rep.below_bounded = false;
            }
    }
    return rep;
}

// ---- decay -----------------------------------------------------------------

DecayTable potential_decay_scan(const Paraboloid& P, double gamma, double mu, const std::vector<double>& ks)
{
    const int N = P.dim();
    if (N < 6) throw Error(ErrorKind::UnsupportedDimension, "decay scan needs N >= 6", {{"N", N}});
    if (!(mu > kMuThreshold))
        throw Error(ErrorKind::Precondition, "mu must exceed 25/72", {{"mu", mu}, {"threshold", kMuThreshold}});
    if (!(gamma >= P.enclosing_gamma() * (1 - 1e-12)))
        throw Error(ErrorKind::Precondition, "gamma smaller than the enclosing width of P",
                    {{"gamma", gamma}, {"minimal", P.enclosing_gamma()}});
    const ParaboloidPotential V(P);
    DecayTable t;
    t.gamma = gamma;
    t.mu = mu;
    const int dirs = P.isotropic() ? 1 : N - 1;
    for (double k : ks) {
        DecayRow row;
        row.k = k;
        Vec x = Vec::Zero(N);
        x(0) = gamma * std::pow(k, 0.5 + mu);
        x(N - 1) = k - P.vertex_shift();
        row.edge_value = V.value(x);
        const int M = 33;
        for (int j = 0; j < dirs; ++j)
            for (int m = 0; m < M; ++m) {
                const double th = M_PI / 3 + (M_PI - M_PI / 3) * m / (M - 1);
                Vec y = Vec::Zero(N);
                y(j) = k * std::sin(th);
                y(N - 1) = k * std::cos(th);
                row.off_axis = std::max(row.off_axis, V.value(y));
            }
        if (!t.rows.empty()) {
            t.edge_decreasing = t.edge_decreasing && row.edge_value < t.rows.back().edge_value;
            t.off_axis_decreasing = t.off_axis_decreasing && row.off_axis < t.rows.back().off_axis;
        }
        t.rows.push_back(row);
    }
    return t;
}

SubquadraticTable subquadratic_check(const PotentialEvaluator& V, const std::vector<double>& radii,
                                     bool axis_only, int polar_nodes)
{
    const int N = V.dim();
    std::vector<Vec> dirs;
    if (axis_only) {
        for (double s : {1.0, -1.0}) {
            Vec d = Vec::Zero(N);
            d(N - 1) = s;
            dirs.push_back(d);
        }
    } else {
        for (int j = 0; j < N - 1; ++j)
            for (int m = 0; m < polar_nodes; ++m) {
                const double th = M_PI * m / (polar_nodes - 1);
                Vec d = Vec::Zero(N);
                d(j) = std::sin(th);
                d(N - 1) = std::cos(th);
                dirs.push_back(d);
            }
    }
    SubquadraticTable t;
    for (double R : radii) {
        SubquadraticRow row;
        row.radius = R;
        row.max_ratio = -1.0;
        for (const Vec& d : dirs) {
            const double q = V.value(R * d) / (R * R);
            if (q > row.max_ratio) {
                row.max_ratio = q;
                row.argmax = R * d;
            }
        }
        if (!t.rows.empty()) t.decreasing = t.decreasing && row.max_ratio < t.rows.back().max_ratio;
        t.rows.push_back(row);
    }
    return t;
}

// ---- comparison ------------------------------------------------------------

ComparisonReport compare_and_slide(const GridSolution& u, const BlowdownData& b, const Expansion& e,
                                   const Paraboloid& P, const CompareOptions& opt)
{
    const int N = u.dim;
    if (u.mode != GridMode::Axisymmetric)
        throw Error(ErrorKind::InvalidInput, "comparison needs an axisymmetric grid solution");
    if (b.dim != N || P.dim() != N || e.l.size() != N)
        throw Error(ErrorKind::InvalidInput, "comparison: dimension mismatch");
    const double lN = e.l(N - 1);
    if (!(lN < 0))
        throw Error(ErrorKind::Precondition, "the linear part must satisfy l(e^N) < 0", {{"l_N", lN}});

    ComparisonReport rep;
    rep.lambda_bar = (e.c_P - e.c) / (-lN);
    rep.h = std::max(u.grid.hr(), u.grid.hz());
    rep.tolerance = opt.C_cmp * rep.h * rep.h;
    rep.gamma = P.enclosing_gamma();
    rep.mu = opt.mu;

    const ParaboloidSolution base(b, P);
    const int nr = u.grid.nr, nz = u.grid.nz;

    std::vector<std::pair<double, bool>> schedule;
    for (double o : opt.offsets) schedule.emplace_back(rep.lambda_bar + o, true);
    if (opt.below > 0) schedule.emplace_back(rep.lambda_bar - opt.below, false);

    for (auto [lambda, tested] : schedule) {
        const ParaboloidSolution s = base.shifted(lambda);
        std::vector<double> gap(nz, 0.0);
        std::vector<int> arg(nz, 0);
        parallel_for(nz, [&](int j) {
            Vec x = Vec::Zero(N);
            x(N - 1) = u.z(j);
            for (int i = 0; i < nr; ++i) {
                x(0) = u.rho(i);
                const double g = std::max(0.0, s.value(x) - u.at(i, j));
                if (g > gap[j]) {
                    gap[j] = g;
                    arg[j] = i;
                }
            }
        });
        ComparisonRow row;
        row.lambda = lambda;
        row.tested = tested;
        const auto jm = std::max_element(gap.begin(), gap.end()) - gap.begin();
        row.max_gap = gap[jm];
        row.rho = u.rho(arg[jm]);
        row.z = u.z(static_cast<int>(jm));
        row.pass = row.max_gap <= rep.tolerance;
        if (tested && !row.pass && opt.strict)
            throw Error(ErrorKind::ComparisonFailed, "ordering u_{P_lambda} <= u violated",
                        {{"lambda", lambda}, {"gap", row.max_gap}, {"tolerance", rep.tolerance},
                         {"rho", row.rho}, {"z", row.z}});
        rep.rows.push_back(row);
    }

    // coincidence sets at lambda_bar, weighted by the axisymmetric volume element
    const ParaboloidSolution s = base.shifted(rep.lambda_bar);
    const CoincidenceMask mask = coincidence_mask(u, opt.eps);
    const double hr = u.grid.hr();
    double sym = 0.0, vol = 0.0;
    Vec x = Vec::Zero(N);
    for (int j = 0; j < nz; ++j) {
        x(N - 1) = u.z(j);
        for (int i = 0; i < nr; ++i) {
            x(0) = u.rho(i);
            const double rp = u.rho(i) + 0.5 * hr, rm = std::max(0.0, u.rho(i) - 0.5 * hr);
            const double w = std::pow(rp, N - 1) - std::pow(rm, N - 1);
            const bool inP = s.paraboloid().contains(x);
            if (inP) vol += w;
            if (inP != mask.at(i, j)) sym += w;
        }
    }
    rep.symdiff_fraction = vol > 0 ? sym / vol : (sym > 0 ? INFINITY : 0.0);
    rep.symdiff_ok = rep.symdiff_fraction <= 5.0 * rep.h;
    rep.verdict = rep.symdiff_ok;
    for (const auto& r : rep.rows)
        if (r.tested) rep.verdict = rep.verdict && r.pass;
    return rep;
}

// ---- Hele-Shaw -------------------------------------------------------------

namespace {

struct BumpEval {
    const Bump& b;
    int N;
    double w(double t, double rho, double z) const
    {
        const double a = (t - b.t0) / b.st, r = rho / b.sr, c = (z - b.z0) / b.sz;
        return a * a + r * r + c * c;
    }
    double value(double t, double rho, double z) const
    {
        const double s = 1.0 - w(t, rho, z);
        return s > 0 ? s * s * s * s : 0.0;
    }
    // rho-part uses the axisymmetric Laplacian d_rr + (N-2)/rho d_r
    double laplacian(double t, double rho, double z) const
    {
        const double s = 1.0 - w(t, rho, z);
        if (s <= 0) return 0.0;
        const double d1 = -4.0 * s * s * s, d2 = 12.0 * s * s;
        const double wr = 2.0 * rho / (b.sr * b.sr), wz = 2.0 * (z - b.z0) / (b.sz * b.sz);
        const double lap_w = 2.0 * (N - 1) / (b.sr * b.sr) + 2.0 / (b.sz * b.sz);
        return d2 * (wr * wr + wz * wz) + d1 * lap_w;
    }
};

} // namespace

double hele_shaw_weak_residual(const ParaboloidSolution& uP, double c, const Bump& phi, int n, int time_nodes)
{
    if (!(c > 0)) throw Error(ErrorKind::InvalidInput, "Hele-Shaw speed must be positive", {{"c", c}});
    if (n < 1 || time_nodes < 1) throw Error(ErrorKind::InvalidInput, "Hele-Shaw mesh must be nonempty");
    const Paraboloid& P = uP.paraboloid();
    if (!P.isotropic())
        throw Error(ErrorKind::Precondition, "axisymmetric test functions need an isotropic paraboloid");
    const int N = uP.dim();
    const BumpEval B{phi, N};
    const double A2 = std::pow(P.sectional_semiaxes()(0), 2);
    const double area = unit_sphere_area(N - 1);
    const double dr = phi.sr / n, dz = 2.0 * phi.sz / n;
    std::vector<double> rows(n, 0.0);
    parallel_for(n, [&](int a) {
        const double rho = (a + 0.5) * dr;
        const double wx = area * std::pow(rho, N - 2) * dr * dz;
        Vec y = Vec::Zero(N);
        y(0) = rho;
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const double z = phi.z0 - phi.sz + (k + 0.5) * dz;
            // x - c t e^N lies in P exactly for t <= T
            const double T = (z - (rho * rho / A2 - P.vertex_shift())) / c;
            // exact t-support of phi at this cell
            const double rem = 1.0 - std::pow(rho / phi.sr, 2) - std::pow((z - phi.z0) / phi.sz, 2);
            if (rem <= 0) continue;
            const double half = phi.st * std::sqrt(rem);
            const double ta = phi.t0 - half, tb = phi.t0 + half;
            double s = 0.0;
            const double lo = std::max(T, ta);
            if (lo < tb) {
                const auto& g = quad::gauss_legendre(time_nodes, lo, tb);
                for (std::size_t q = 0; q < g.x.size(); ++q) {
                    const double lap = B.laplacian(g.x[q], rho, z);
                    if (lap == 0.0) continue;
                    y(N - 1) = z - c * g.x[q];
                    const double p = -c * uP.gradient(y)(N - 1);
                    s += g.w[q] * p * lap;
                }
            }
            // int chi_{p>0} d_t phi dt = -phi(T, x)
            if (T > ta && T < tb) s -= B.value(T, rho, z);
            acc += wx * s;
        }
        rows[a] = acc;
    });
    double r = 0.0;
    for (double v : rows) r += v;
    return r;
}

std::vector<HeleShawRow> hele_shaw_residual(const ParaboloidSolution& uP, double c,
                                            const std::vector<Bump>& bumps, int n, const SpaceTimeBox& box)
{
    std::vector<HeleShawRow> out;
    for (const Bump& b : bumps) {
        if (!(b.st > 0 && b.sr > 0 && b.sz > 0))
            throw Error(ErrorKind::InvalidInput, "bump radii must be positive");
        if (b.t0 - b.st < box.t0 || b.t0 + b.st > box.t1 || b.z0 - b.sz < box.z0 || b.z0 + b.sz > box.z1 ||
            b.sr > box.R)
            throw Error(ErrorKind::Precondition, "test function support exceeds the space-time box",
                        {{"t0", b.t0}, {"z0", b.z0}});
        HeleShawRow row;
        row.bump = b;
        row.n = n;
        row.coarse = hele_shaw_weak_residual(uP, c, b, n);
        row.fine = hele_shaw_weak_residual(uP, c, b, 2 * n);
        row.ratio = std::abs(row.coarse) / std::abs(row.fine);
        out.push_back(row);
    }
    return out;
}

} // namespace obstlab

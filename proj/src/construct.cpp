#include "obstlab/construct.hpp"

#include <cmath>
#include <random>

#include "obstlab/error.hpp"

namespace obstlab {

BlowdownData BlowdownData::isotropic(int N, double bN, double bN1)
{
    BlowdownData d;
    d.dim = N;
    d.b = Vec::Constant(N - 1, 0.5 / (N - 1));
    d.bN = bN;
    d.bN1 = bN1;
    return d;
}

void BlowdownData::validate() const
{
    if (dim < 3) throw Error(ErrorKind::UnsupportedDimension, "blow-down data needs N >= 3", {{"N", dim}});
    if (b.size() != dim - 1)
        throw Error(ErrorKind::InvalidInput, "need N-1 quadratic coefficients",
                    {{"N", dim}, {"got", b.size()}});
    if (!b.allFinite() || !std::isfinite(bN) || !std::isfinite(bN1))
        throw Error(ErrorKind::InvalidInput, "non-finite blow-down data");
    if ((b.array() <= 0.0).any())
        throw Error(ErrorKind::Precondition, "quadratic coefficients must be positive");
    if (std::abs(b.sum() - 0.5) > 1e-12)
        throw Error(ErrorKind::Precondition, "trace condition sum b_j = 1/2 violated",
                    {{"sum", b.sum()}});
}

double BlowdownData::p(const Vec& x) const
{
    return (b.array() * x.head(dim - 1).array().square()).sum();
}

namespace {

Vec log_q(const Vec& a)
{
    return ellipsoid_interior_coefficients(Ellipsoid(a)).q.array().log().matrix();
}

} // namespace

FitResult fit_ellipsoid_ex(const Vec& q, double c, const FitOptions& opt)
{
    const int N = static_cast<int>(q.size());
    if (N < 3) throw Error(ErrorKind::UnsupportedDimension, "fit_ellipsoid needs N >= 3", {{"N", N}});
    if ((q.array() <= 0.0).any() || !q.allFinite())
        throw Error(ErrorKind::Precondition, "fit_ellipsoid needs q_j > 0");
    if (std::abs(q.sum() - 0.5) > 1e-12)
        throw Error(ErrorKind::Precondition, "fit_ellipsoid needs sum q_j = 1/2", {{"sum", q.sum()}});
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorKind::Precondition, "fit_ellipsoid needs c > 0");

    // unknowns: log a_1..a_{N-1}; a_N frozen at 1 (q is scale invariant)
    const int n = N - 1;
    Vec a(N);
    if (opt.initial) {
        if (opt.initial->size() != N || (opt.initial->array() <= 0.0).any())
            throw Error(ErrorKind::InvalidInput, "bad initial semiaxes");
        a = *opt.initial / (*opt.initial)(N - 1);
    } else {
        a = (q.array() / q(N - 1)).rsqrt().matrix();
    }
    if (a.maxCoeff() / a.minCoeff() > 1e3)
        throw Error(ErrorKind::FitFailed, "initial semiaxis ratio exceeds 1e3",
                    {{"ratio", a.maxCoeff() / a.minCoeff()}});
    // Match log q_j on every index except the largest coefficient, which the
    // trace fixes; small coefficients (q_N = 1/n^2 in the sequence) then
    // keep full relative accuracy.
    Eigen::Index drop = 0;
    q.maxCoeff(&drop);
    std::vector<int> rows;
    for (int j = 0; j < N; ++j)
        if (j != drop) rows.push_back(j);
    auto residual = [&](const Vec& u) {
        Vec aa(N);
        aa.head(n) = u.array().exp().matrix();
        aa(N - 1) = 1.0;
        const Vec lq = log_q(aa);
        Vec r(n);
        for (int k = 0; k < n; ++k) r(k) = lq(rows[k]) - std::log(q(rows[k]));
        return r;
    };
    Vec u = a.head(n).array().log().matrix();
    Vec r = residual(u);
    double rn = r.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < opt.max_iter && rn > opt.tol; ++it) {
        Mat J(n, n);
        for (int k = 0; k < n; ++k) {
            Vec up = u, um = u;
            up(k) += opt.fd_step;
            um(k) -= opt.fd_step;
            J.col(k) = (residual(up) - residual(um)) / (2.0 * opt.fd_step);
        }
        const Vec step = J.partialPivLu().solve(-r);
        double t = 1.0;
        bool improved = false;
        for (int h = 0; h < 40; ++h, t *= 0.5) {
            const Vec un = u + t * step;
            if (!un.allFinite()) continue;
            Vec rnew;
            try {
                rnew = residual(un);
            } catch (const Error&) {
                continue;
            }
            const double nn = rnew.lpNorm<Eigen::Infinity>();
            if (nn < rn) {
                u = un;
                r = rnew;
                rn = nn;
                improved = true;
                break;
            }
        }
        if (!improved) break; // stagnated at round-off
    }
    if (rn > std::max(opt.tol, 1e-10))
        throw Error(ErrorKind::FitFailed, "Newton iteration did not converge",
                    {{"residual", rn}, {"iterations", it}});
    Vec aa(N);
    aa.head(n) = u.array().exp().matrix();
    aa(N - 1) = 1.0;
    const double ct = ellipsoid_interior_coefficients(Ellipsoid(aa)).c;
    const double beta = std::sqrt(c / ct);
    FitResult out;
    out.E = Ellipsoid(beta * aa);
    out.iterations = it;
    out.residual = rn;
    return out;
}

Ellipsoid fit_ellipsoid(const Vec& q, double c, const FitOptions& opt)
{
    return fit_ellipsoid_ex(q, c, opt).E;
}

Vec EllipsoidSequenceTerm::aperture() const
{
    const int m = static_cast<int>(q.size()) - 1;
    return (tau / E.semiaxes().head(m).array().square()).matrix();
}

double EllipsoidSequenceTerm::axis_ratio() const
{
    return tau / E.semiaxes()(q.size() - 1);
}

double EllipsoidSequenceTerm::level_constant() const
{
    const double r = axis_ratio();
    return tau * (1.0 - r) * (1.0 + r);
}

EllipsoidSequenceTerm ellipsoid_sequence_term(const BlowdownData& b, int n, int samples,
                                              const FitOptions& opt)
{
    b.validate();
    if (n < 2) throw Error(ErrorKind::Precondition, "sequence index must be >= 2", {{"n", n}});
    const int N = b.dim;
    EllipsoidSequenceTerm t;
    t.n = n;
    const double n2 = static_cast<double>(n) * n;
    t.q.resize(N);
    t.q.head(N - 1) = (1.0 - 2.0 / n2) * b.b;
    t.q(N - 1) = 1.0 / n2;
    t.c = std::pow(0.5 * b.bN * n, 2);
    t.tau = 0.5 * b.bN * n2;
    const FitResult fr = fit_ellipsoid_ex(t.q, t.c, opt);
    t.fitted = fr.E;
    t.fit_iterations = fr.iterations;
    t.fit_residual = fr.residual;
    Vec shift = Vec::Zero(N);
    shift(N - 1) = t.tau;
    t.E = fr.E.translated(shift);

    // V_{E^n}(x) = b_N x_N - q^n(x) at interior samples
    std::mt19937_64 rng(0x5eed0000ULL + n);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    const InteriorQuadratic iq = ellipsoid_interior_coefficients(t.E);
    double err = 0.0;
    for (int s = 0; s < samples; ++s) {
        Vec w(N);
        for (int i = 0; i < N; ++i) w(i) = normal(rng);
        w *= std::pow(unif(rng), 1.0 / N) / w.norm();
        const Vec x = t.E.center() + (t.E.semiaxes().array() * w.array()).matrix();
        const Vec d = x - t.E.center();
        const double V = iq.c - (iq.q.array() * d.array().square()).sum();
        const double rhs = b.bN * x(N - 1) - (t.q.array() * x.array().square()).sum();
        err = std::max(err, std::abs(V - rhs));
    }
    t.identity_error = err;
    return t;
}

ParaboloidSolution::ParaboloidSolution(BlowdownData b, Paraboloid P) : b_(std::move(b)), pot_(P)
{
    if (P.dim() != b_.dim) throw Error(ErrorKind::InvalidInput, "paraboloid/blow-down dimension mismatch");
}

double ParaboloidSolution::value(const Vec& x) const
{
    const int N = b_.dim;
    return b_.p(x) - b_.bN * x(N - 1) - b_.bN1 + pot_.value(x);
}

Vec ParaboloidSolution::gradient(const Vec& x) const
{
    const int N = b_.dim;
    Vec g = pot_.gradient(x);
    g.head(N - 1) += 2.0 * (b_.b.array() * x.head(N - 1).array()).matrix();
    g(N - 1) -= b_.bN;
    return g;
}

Mat ParaboloidSolution::hessian(const Vec& x) const
{
    const int N = b_.dim;
    Mat H = pot_.hessian(x);
    for (int j = 0; j < N - 1; ++j) H(j, j) += 2.0 * b_.b(j);
    return H;
}

ParaboloidSolution ParaboloidSolution::shifted(double lambda) const
{
    BlowdownData b = b_;
    b.bN1 += b.bN * lambda;
    const Paraboloid& P = pot_.body();
    return ParaboloidSolution(b, Paraboloid(P.sectional_semiaxes(), P.vertex_shift() + lambda));
}

BlowdownData blowdown_of(const Paraboloid& P)
{
    const ParaboloidPotential pot(P);
    BlowdownData d;
    d.dim = P.dim();
    d.b = pot.interior_b();
    d.bN = pot.interior_bN();
    d.bN1 = pot.interior_bN1();
    return d;
}

namespace {

// exact parameters: a' = fit_{N-1}(b', b_N/2), A = sqrt(2) a',
// a_N = (b_{N+1} - (prod a'/4) int_0^inf s ds/g) / b_N
Paraboloid exact_paraboloid(const BlowdownData& b)
{
    const Ellipsoid sec = fit_ellipsoid(b.b, 0.5 * b.bN);
    const Vec& ap = sec.semiaxes();
    const TailIntegrals t = tail_integrals(ap, 0.0, Bracket::None, Vec(), 0.0, true);
    const double aN = (b.bN1 - ap.prod() / 4.0 * t.Is) / b.bN;
    return Paraboloid(std::sqrt(2.0) * ap, aN);
}

} // namespace

std::vector<int> sequence_schedule(const BlowdownData& b, int n_max)
{
    std::vector<int> out;
    for (int n = 8; n <= n_max; n *= 2) {
        const double ratio = n * std::sqrt(b.b.maxCoeff());
        if (ratio > 1e3) break;
        out.push_back(n);
    }
    return out;
}

double richardson_limit(const std::vector<int>& n, const std::vector<double>& v, int levels)
{
    const int K = static_cast<int>(v.size());
    if (levels + 1 > K) throw Error(ErrorKind::Precondition, "not enough terms for extrapolation");
    Mat A(levels + 1, levels + 1);
    Vec rhs(levels + 1);
    for (int i = 0; i <= levels; ++i) {
        const int k = K - 1 - levels + i;
        const double h = 1.0 / n[k];
        double p = 1.0;
        for (int e = 0; e <= levels; ++e, p *= h) A(i, e) = p;
        rhs(i) = v[k];
    }
    return A.fullPivLu().solve(rhs)(0);
}

ParaboloidSolution construct_paraboloid(const BlowdownData& b, const ConstructOptions& opt,
                                        ConstructionReport* report)
{
    b.validate();
    if (b.dim < 6)
        throw Error(ErrorKind::UnsupportedDimension, "paraboloid solutions need N >= 6", {{"N", b.dim}});
    if (!(b.bN > 0.0)) throw Error(ErrorKind::Precondition, "construction needs b_N > 0", {{"bN", b.bN}});
    const Paraboloid P = exact_paraboloid(b);
    if (!opt.run_sequence) return ParaboloidSolution(b, P);

    const int N = b.dim, m = N - 1;
    ConstructionReport rep;
    const std::vector<int> schedule = opt.schedule.empty() ? sequence_schedule(b) : opt.schedule;
    for (int n : schedule) rep.terms.push_back(ellipsoid_sequence_term(b, n));
    const int K = static_cast<int>(rep.terms.size());
    const int levels = std::min(opt.levels, K - 1);
    if (levels < 1) throw Error(ErrorKind::Precondition, "need at least two sequence terms");
    for (int k = 1; k < K; ++k) {
        const double d = (rep.terms[k].aperture() - rep.terms[k - 1].aperture()).lpNorm<Eigen::Infinity>();
        rep.cauchy.push_back(d);
        if (k >= 2) rep.cauchy_ratio.push_back(rep.cauchy[k - 2] / d);
    }
    for (std::size_t k = 1; k < rep.cauchy.size(); ++k)
        if (!(rep.cauchy[k] < rep.cauchy[k - 1])) rep.full_sequence_converges = false;

    rep.aperture_extrapolated.resize(m);
    for (int j = 0; j < m; ++j) {
        std::vector<double> v;
        for (const auto& t : rep.terms) v.push_back(t.aperture()(j));
        rep.aperture_extrapolated(j) = richardson_limit(schedule, v, levels);
    }
    std::vector<double> lev;
    for (const auto& t : rep.terms) lev.push_back(t.level_constant());
    rep.level_extrapolated = richardson_limit(schedule, lev, levels);
    rep.semiaxes_extrapolated = (2.0 / rep.aperture_extrapolated.array()).sqrt().matrix();
    rep.vertex_extrapolated = 0.5 * rep.level_extrapolated + b.bN1 / b.bN;

    const Vec& A = P.sectional_semiaxes();
    double gap = ((rep.semiaxes_extrapolated - A).array() / A.array()).abs().maxCoeff();
    gap = std::max(gap, std::abs(rep.vertex_extrapolated - P.vertex_shift()) /
                            std::max(1.0, std::abs(P.vertex_shift())));
    rep.extrapolation_gap = gap;
    if (report) *report = rep;
    if (!rep.full_sequence_converges || gap > opt.tol)
        throw Error(ErrorKind::ConstructionFailed, "ellipsoid sequence limit is not Cauchy to tolerance",
                    {{"extrapolation_gap", gap}, {"tol", opt.tol}, {"cauchy", rep.cauchy}});
    return ParaboloidSolution(b, P);
}

SectionalEllipsoid sectional_ellipsoid(const BlowdownData& b)
{
    b.validate();
    const int m = b.dim - 1;
    if (m < 3) throw Error(ErrorKind::UnsupportedDimension, "sectional ellipsoid needs N-1 >= 3");
    SectionalEllipsoid s;
    s.E = fit_ellipsoid(b.b, 1.0);
    s.scale = 1.0 / std::sqrt(b.bN);
    // V'_{E'}(x') = V'(0) - p_b(x') on E'
    const double V0 = ellipsoid_potential(s.E, Vec::Zero(m));
    std::mt19937_64 rng(0xe11ULL);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    double res = 0.0;
    for (int k = 0; k < 20; ++k) {
        Vec w(m);
        for (int i = 0; i < m; ++i) w(i) = normal(rng);
        w *= std::pow(unif(rng), 1.0 / m) / w.norm();
        const Vec x = (s.E.semiaxes().array() * w.array()).matrix();
        res = std::max(res, std::abs(ellipsoid_potential(s.E, x) - (V0 - (b.b.array() * x.array().square()).sum())));
    }
    s.residual = res;
    return s;
}

} // namespace obstlab

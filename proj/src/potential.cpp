#include "obstlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "obstlab/error.hpp"
#include "obstlab/quadrature.hpp"

namespace obstlab {

namespace {

constexpr double kRelTol = 1e-12;

void require_dim_at_least(int N, int lo, const char* what)
{
    if (N < lo)
        throw Error(ErrorKind::UnsupportedDimension, std::string(what) + " needs N >= " +
                                                         std::to_string(lo),
                    {{"N", N}});
}

void require_point(int N, const Vec& x)
{
    if (x.size() != N)
        throw Error(ErrorKind::InvalidInput, "dimension mismatch", {{"expected", N}, {"got", x.size()}});
    if (!x.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite coordinates");
}

} // namespace

TailIntegrals tail_integrals(const Vec& a, double lambda, Bracket mode, const Vec& d, double z,
                             bool with_sigma)
{
    const int m = static_cast<int>(a.size());
    if (m + 3 > quad::kMaxComponents) throw Error(ErrorKind::UnsupportedDimension, "dimension too large");
    if (with_sigma || mode == Bracket::Paraboloid) require_dim_at_least(m, 5, "sigma moment");
    double a2[quad::kMaxComponents], d2[quad::kMaxComponents];
    double amin2 = a(0) * a(0);
    for (int j = 0; j < m; ++j) {
        a2[j] = a(j) * a(j) + lambda;
        amin2 = std::min(amin2, a(j) * a(j));
        d2[j] = (mode != Bracket::None) ? d(j) * d(j) : 0.0;
    }
    // s = lambda + S (1/t^2 - 1) maps t in (0,1] onto [lambda, inf); with
    // D_j = S (1 - t^2) + (a_j^2 + lambda) t^2 we get a_j^2 + s = D_j / t^2.
    const double S = amin2 + lambda;
    const int isig = with_sigma ? m + 1 : -1;
    const int ibr = (mode != Bracket::None) ? m + 1 + (with_sigma ? 1 : 0) : -1;
    const int ncomp = m + 1 + (with_sigma ? 1 : 0) + (mode != Bracket::None ? 1 : 0);
    auto f = [&](double t, double* out) {
        const double t2 = t * t;
        double prod = 1.0, sum = 0.0;
        double inv[quad::kMaxComponents];
        for (int j = 0; j < m; ++j) {
            const double D = S * (1.0 - t2) + a2[j] * t2;
            prod *= D;
            inv[j] = 1.0 / D;
            sum += d2[j] * inv[j];
        }
        const double root = std::sqrt(prod);
        const double base = 2.0 * S * std::pow(t, m - 3) / root;
        out[0] = base;
        for (int j = 0; j < m; ++j) out[1 + j] = base * t2 * inv[j];
        double sig = 0.0;
        if (with_sigma || mode == Bracket::Paraboloid)
            sig = 2.0 * S * std::pow(t, m - 5) * (lambda * t2 + S * (1.0 - t2)) / root;
        if (isig >= 0) out[isig] = sig;
        if (mode == Bracket::Ellipsoid) out[ibr] = base * (1.0 - t2 * sum);
        else if (mode == Bracket::Paraboloid) out[ibr] = sig + base * (2.0 * z - t2 * sum);
    };
    double abs_tol[quad::kMaxComponents];
    for (int i = 0; i < ncomp; ++i) abs_tol[i] = 1e-300;
    // D_j switches from S to a_j^2 + lambda around t_j = sqrt(S / (S + a_j^2 + lambda))
    std::vector<double> breaks;
    for (int j = 0; j < m; ++j) {
        const double tj = std::sqrt(S / (S + a2[j]));
        if (tj < 0.5) {
            breaks.push_back(tj / 4.0);
            breaks.push_back(tj);
            breaks.push_back(std::min(0.75, 4.0 * tj));
        }
    }
    std::sort(breaks.begin(), breaks.end());
    auto r = quad::integrate(f, ncomp, 0.0, 1.0, kRelTol, abs_tol, 2000, breaks);
    if (!r.converged) {
        double worst = 0.0;
        for (int i = 0; i < ncomp; ++i)
            worst = std::max(worst, r.error[i] / std::max(std::abs(r.value[i]), 1e-300));
        if (worst > 1e-9)
            throw Error(ErrorKind::ToleranceNotMet, "tail quadrature did not converge",
                        {{"achieved_rel_error", worst}, {"requested", kRelTol}});
    }
    TailIntegrals out;
    out.I0 = r.value[0];
    out.I.resize(m);
    for (int j = 0; j < m; ++j) out.I(j) = r.value[1 + j];
    if (isig >= 0) out.Is = r.value[isig];
    if (ibr >= 0) out.bracket = r.value[ibr];
    out.intervals = r.intervals;
    return out;
}

InteriorQuadratic ellipsoid_interior_coefficients(const Ellipsoid& E)
{
    require_dim_at_least(E.dim(), 3, "ellipsoid potential");
    const double K = E.semiaxes().prod() / 4.0;
    const TailIntegrals t = tail_integrals(E.semiaxes(), 0.0, Bracket::None);
    InteriorQuadratic iq;
    iq.c = K * t.I0;
    iq.q = K * t.I;
    return iq;
}

double ellipsoid_potential(const Ellipsoid& E, const Vec& x)
{
    require_dim_at_least(E.dim(), 3, "ellipsoid potential");
    require_point(E.dim(), x);
    const double lam = ellipsoidal_coordinate(E, x);
    const Vec d = x - E.center();
    const double K = E.semiaxes().prod() / 4.0;
    if (lam == 0.0) {
        const InteriorQuadratic iq = ellipsoid_interior_coefficients(E);
        return iq.c - (iq.q.array() * d.array().square()).sum();
    }
    return K * tail_integrals(E.semiaxes(), lam, Bracket::Ellipsoid, d).bracket;
}

Vec ellipsoid_potential_gradient(const Ellipsoid& E, const Vec& x)
{
    require_dim_at_least(E.dim(), 3, "ellipsoid potential");
    require_point(E.dim(), x);
    const double lam = ellipsoidal_coordinate(E, x);
    const Vec d = x - E.center();
    const double K = E.semiaxes().prod() / 2.0;
    const TailIntegrals t = tail_integrals(E.semiaxes(), lam, Bracket::None);
    return -K * (d.array() * t.I.array()).matrix();
}

Mat ellipsoid_potential_hessian(const Ellipsoid& E, const Vec& x)
{
    require_dim_at_least(E.dim(), 3, "ellipsoid potential");
    require_point(E.dim(), x);
    const int N = E.dim();
    const double lam = ellipsoidal_coordinate(E, x);
    const Vec d = x - E.center();
    const double K = E.semiaxes().prod() / 2.0;
    const TailIntegrals t = tail_integrals(E.semiaxes(), lam, Bracket::None);
    Mat H = Mat::Zero(N, N);
    for (int j = 0; j < N; ++j) H(j, j) = -K * t.I(j);
    if (lam > 0.0) {
        const Eigen::ArrayXd s = E.semiaxes().array().square() + lam;
        const double g = s.sqrt().prod();
        const double denom = (d.array().square() / s.square()).sum();
        const Vec dlam = ((2.0 * d.array() / s) / denom).matrix();
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) H(j, k) += K * d(j) * dlam(k) / (s(j) * g);
    }
    return H;
}

double homoeoid_gap(const Ellipsoid& E, double t, const Vec& x)
{
    if (!(t >= 1.0)) throw Error(ErrorKind::Precondition, "homoeoid_gap needs t >= 1", {{"t", t}});
    if (!E.contains(x)) throw Error(ErrorKind::Precondition, "homoeoid_gap needs x in E");
    return ellipsoid_potential(E.scaled(t), x) - ellipsoid_potential(E, x);
}

ParaboloidPotential::ParaboloidPotential(const Paraboloid& P) : P_(P)
{
    require_dim_at_least(P.dim(), 6, "paraboloid potential");
    ap_ = P.sectional_semiaxes() / std::sqrt(2.0);
    prod_ = ap_.prod();
    at0_ = tail_integrals(ap_, 0.0, Bracket::None, Vec(), 0.0, true);
    const double K4 = prod_ / 4.0;
    b_ = K4 * at0_.I;
    bN_ = 2.0 * K4 * at0_.I0;
    bN1_ = K4 * at0_.Is + bN_ * P.vertex_shift();
}

double ParaboloidPotential::coordinate(const Vec& x) const
{
    require_point(dim(), x);
    const int m = dim() - 1;
    const double z = x(m) + P_.vertex_shift();
    const Eigen::ArrayXd x2 = x.head(m).array().square();
    const Eigen::ArrayXd a2 = ap_.array().square();
    auto F = [&](double s) { return (x2 / (a2 + s)).sum() - s - 2.0 * z; };
    if (F(0.0) <= 0.0) return 0.0;
    double lo = 0.0, hi = std::sqrt(x2.sum()) + 2.0 * std::abs(z) + 1.0;
    while (hi - lo > 1e-8 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (F(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double fv = F(s);
        const double scale = s + 2.0 * std::abs(z) + 1.0;
        if (std::abs(fv) <= 1e-15 * scale) break;
        const double fp = -(x2 / (a2 + s).square()).sum() - 1.0;
        double next = s - fv / fp;
        if (fv > 0.0) lo = s;
        else hi = s;
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (next == s) break;
        s = next;
    }
    return s;
}

double ParaboloidPotential::value(const Vec& x) const
{
    const int m = dim() - 1;
    const double lam = coordinate(x);
    if (lam == 0.0)
        return -(b_.array() * x.head(m).array().square()).sum() + bN_ * x(m) + bN1_;
    const double z = x(m) + P_.vertex_shift();
    return prod_ / 4.0 * tail_integrals(ap_, lam, Bracket::Paraboloid, x.head(m), z).bracket;
}

Vec ParaboloidPotential::gradient(const Vec& x) const
{
    const int m = dim() - 1;
    const double lam = coordinate(x);
    const TailIntegrals t = lam == 0.0 ? at0_ : tail_integrals(ap_, lam, Bracket::None);
    const double K = prod_ / 2.0;
    Vec g(m + 1);
    g.head(m) = -K * (x.head(m).array() * t.I.array()).matrix();
    g(m) = K * t.I0;
    return g;
}

Mat ParaboloidPotential::hessian(const Vec& x) const
{
    const int m = dim() - 1;
    const double lam = coordinate(x);
    const TailIntegrals t = lam == 0.0 ? at0_ : tail_integrals(ap_, lam, Bracket::None);
    const double K = prod_ / 2.0;
    Mat H = Mat::Zero(m + 1, m + 1);
    for (int j = 0; j < m; ++j) H(j, j) = -K * t.I(j);
    if (lam > 0.0) {
        const Eigen::ArrayXd s = ap_.array().square() + lam;
        const double g = s.sqrt().prod();
        const Eigen::ArrayXd xp = x.head(m).array();
        const double Fs = -(xp.square() / s.square()).sum() - 1.0;
        Vec dlam(m + 1);
        dlam.head(m) = (-(2.0 * xp / s) / Fs).matrix();
        dlam(m) = -(-2.0) / Fs;
        for (int k = 0; k <= m; ++k) {
            for (int j = 0; j < m; ++j) H(j, k) += K * xp(j) * dlam(k) / (s(j) * g);
            H(m, k) = -K * dlam(k) / g;
        }
        // symmetrize (analytically symmetric)
        H = 0.5 * (H + H.transpose()).eval();
    }
    return H;
}

MonteCarloResult montecarlo_potential(const std::function<bool(const Vec&)>& membership,
                                      const Box& box, const Vec& x, long samples,
                                      std::uint64_t seed)
{
    const int N = static_cast<int>(x.size());
    require_dim_at_least(N, 3, "Monte-Carlo potential");
    if (samples < 1000) throw Error(ErrorKind::Precondition, "need at least 1e3 samples", {{"samples", samples}});
    if (box.lo.size() != N || box.hi.size() != N || !box.lo.allFinite() || !box.hi.allFinite() ||
        ((box.hi - box.lo).array() <= 0.0).any())
        throw Error(ErrorKind::DegenerateSampler, "bounding box must be finite with positive volume");
    double T2 = 0.0;
    for (int i = 0; i < N; ++i)
        T2 += std::max((x(i) - box.lo(i)) * (x(i) - box.lo(i)), (x(i) - box.hi(i)) * (x(i) - box.hi(i)));
    const double T = std::sqrt(T2);
    // t has density 2t/T^2, omega uniform: weight alpha |S^{N-1}| T^2 / 2
    const double W = newton_constant(N) * unit_sphere_area(N) * T2 / 2.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Vec y(N), w(N);
    long hits = 0;
    for (long s = 0; s < samples; ++s) {
        for (int i = 0; i < N; ++i) w(i) = normal(rng);
        const double t = T * std::sqrt(unif(rng));
        y = x + (t / w.norm()) * w;
        if (((y - box.lo).array() >= 0.0).all() && ((box.hi - y).array() >= 0.0).all() && membership(y))
            ++hits;
    }
    MonteCarloResult r;
    r.accepted = hits;
    if (hits == 0) return r;
    const double p = static_cast<double>(hits) / samples;
    r.estimate = W * p;
    r.stderr_ = W * std::sqrt(p * (1.0 - p) / (samples - 1));
    return r;
}

SlabResult paraboloid_montecarlo(const Paraboloid& P, const Vec& x, long samples,
                                 std::uint64_t seed, double tail_tol)
{
    const int N = P.dim(), m = N - 1;
    require_dim_at_least(N, 6, "paraboloid Monte-Carlo");
    require_point(N, x);
    if (P.contains(x)) throw Error(ErrorKind::Precondition, "slab sampler needs an exterior point");
    const double alpha = newton_constant(N);
    const Vec& A = P.sectional_semiaxes();
    const double C = alpha * unit_ball_volume(m) * A.prod();
    const double yx = x(m) + P.vertex_shift();
    // V_tail <= C kappa^{m/2} int_Y^inf (h - yx)^{m/2+2-N} dh
    auto tail = [&](double Y) {
        const double kappa = yx > 0.0 ? Y / (Y - yx) : 1.0;
        return C * std::pow(kappa, 0.5 * m) * std::pow(Y - yx, 0.5 * (5 - N)) * 2.0 / (N - 5);
    };
    double Y = std::max(1.0, 2.0 * std::abs(yx) + 1.0);
    while (tail(Y) > tail_tol) Y *= 2.0;

    std::vector<double> edges{0.0};
    for (double e = 1e-2; e < Y; e *= 1.5) edges.push_back(e);
    edges.push_back(Y);
    const int K = static_cast<int>(edges.size()) - 1;
    const long per = std::max<long>(samples / K, 16);
    const double p = 0.5 * m + 1.0;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    Vec y(N), w(m);
    double total = 0.0, var = 0.0;
    for (int k = 0; k < K; ++k) {
        const double lo = std::pow(edges[k], p), hi = std::pow(edges[k + 1], p);
        const double vol = unit_ball_volume(m) * A.prod() * (hi - lo) / p;
        double s1 = 0.0, s2 = 0.0;
        for (long s = 0; s < per; ++s) {
            const double h = std::pow(lo + unif(rng) * (hi - lo), 1.0 / p);
            for (int i = 0; i < m; ++i) w(i) = normal(rng);
            const double rad = std::pow(unif(rng), 1.0 / m) / w.norm();
            y.head(m) = (std::sqrt(h) * rad) * (A.array() * w.array()).matrix();
            y(m) = h - P.vertex_shift();
            const double f = vol * alpha * std::pow((y - x).norm(), 2.0 - N);
            s1 += f;
            s2 += f * f;
        }
        const double mean = s1 / per;
        total += mean;
        var += std::max(0.0, s2 / per - mean * mean) / (per - 1);
    }
    SlabResult r;
    r.estimate = total;
    r.stderr_ = std::sqrt(var);
    r.tail_bound = tail(Y);
    r.height = Y;
    return r;
}

const char* method_name(PotentialMethod m)
{
    switch (m) {
    case PotentialMethod::ClosedForm: return "closed-form";
    case PotentialMethod::SequenceExtrapolation: return "sequence-extrapolation";
    case PotentialMethod::MonteCarlo: return "monte-carlo";
    }
    return "unknown";
}

PotentialEvaluator PotentialEvaluator::ellipsoid(const Ellipsoid& E)
{
    require_dim_at_least(E.dim(), 3, "ellipsoid potential");
    PotentialEvaluator ev;
    ev.dim_ = E.dim();
    ev.method_ = PotentialMethod::ClosedForm;
    ev.tol_ = 1e-10;
    ev.eval_ = [E](const Vec& x) {
        PotentialValue v;
        v.value = ellipsoid_potential(E, x);
        v.method = method_name(PotentialMethod::ClosedForm);
        return v;
    };
    ev.grad_ = [E](const Vec& x) { return ellipsoid_potential_gradient(E, x); };
    return ev;
}

PotentialEvaluator PotentialEvaluator::paraboloid(const Paraboloid& P, PotentialMethod m, double tol)
{
    PotentialEvaluator ev;
    ev.dim_ = P.dim();
    ev.tol_ = tol;
    auto pp = std::make_shared<ParaboloidPotential>(P);
    ev.grad_ = [pp](const Vec& x) { return pp->gradient(x); };
    if (m == PotentialMethod::SequenceExtrapolation) {
        ev.method_ = m;
        ev.eval_ = [P, tol](const Vec& x) { return paraboloid_potential(P, x, tol); };
    } else if (m == PotentialMethod::ClosedForm) {
        ev.method_ = m;
        ev.eval_ = [pp](const Vec& x) {
            PotentialValue v;
            v.value = pp->value(x);
            v.method = method_name(PotentialMethod::ClosedForm);
            return v;
        };
    } else {
        throw Error(ErrorKind::InvalidInput, "use PotentialEvaluator::montecarlo for sampled sets");
    }
    return ev;
}

PotentialEvaluator PotentialEvaluator::montecarlo(std::function<bool(const Vec&)> membership, Box box,
                                                  int dim, long samples, std::uint64_t seed)
{
    PotentialEvaluator ev;
    ev.dim_ = dim;
    ev.method_ = PotentialMethod::MonteCarlo;
    ev.tol_ = 0.0;
    ev.eval_ = [membership, box, samples, seed](const Vec& x) {
        const MonteCarloResult r = montecarlo_potential(membership, box, x, samples, seed);
        PotentialValue v;
        v.value = r.estimate;
        v.stderr_ = r.stderr_;
        v.method = method_name(PotentialMethod::MonteCarlo);
        return v;
    };
    ev.grad_ = [ev_eval = ev.eval_](const Vec& x) {
        // central differences of the sampled value (common random numbers via the fixed seed)
        const double h = 1e-3;
        Vec g(x.size());
        for (int i = 0; i < x.size(); ++i) {
            Vec xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            g(i) = (ev_eval(xp).value - ev_eval(xm).value) / (2.0 * h);
        }
        return g;
    };
    return ev;
}

PotentialValue PotentialEvaluator::evaluate(const Vec& x) const
{
    return eval_(x);
}

Vec PotentialEvaluator::gradient(const Vec& x) const
{
    return grad_(x);
}

} // namespace obstlab

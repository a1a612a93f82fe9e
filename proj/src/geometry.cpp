#include "obstlab/geometry.hpp"

#include <cmath>

#include "obstlab/error.hpp"

namespace obstlab {

namespace {

void require_finite(const Vec& x, const char* what)
{
    if (!x.allFinite())
        throw Error(ErrorKind::InvalidInput, std::string("non-finite coordinates in ") + what);
}

void require_dim(int expected, const Vec& x)
{
    if (x.size() != expected)
        throw Error(ErrorKind::InvalidInput, "dimension mismatch",
                    {{"expected", expected}, {"got", x.size()}});
}

} // namespace

Ellipsoid::Ellipsoid(Vec semiaxes, Vec center) : a_(std::move(semiaxes)), c_(std::move(center))
{
    if (a_.size() < 1 || c_.size() != a_.size())
        throw Error(ErrorKind::InvalidInput, "ellipsoid semiaxes/center size mismatch");
    require_finite(a_, "semiaxes");
    require_finite(c_, "center");
    if ((a_.array() <= 0.0).any())
        throw Error(ErrorKind::InvalidInput, "ellipsoid semiaxes must be positive");
}

Ellipsoid::Ellipsoid(Vec semiaxes) : Ellipsoid(semiaxes, Vec::Zero(semiaxes.size())) {}

Ellipsoid Ellipsoid::ball(int dim, double radius)
{
    return Ellipsoid(Vec::Constant(dim, radius));
}

Ellipsoid Ellipsoid::point(int dim)
{
    Ellipsoid e;
    e.a_ = Vec::Zero(dim);
    e.c_ = Vec::Zero(dim);
    e.degenerate_ = true;
    return e;
}

double Ellipsoid::level(const Vec& x) const
{
    require_dim(dim(), x);
    return ((x - c_).array() / a_.array()).square().sum();
}

bool Ellipsoid::contains(const Vec& x) const
{
    require_dim(dim(), x);
    require_finite(x, "point");
    if (degenerate_) return (x - c_).squaredNorm() == 0.0;
    return level(x) <= 1.0;
}

Ellipsoid Ellipsoid::scaled(double t) const
{
    return Ellipsoid(t * a_, c_);
}

Ellipsoid Ellipsoid::translated(const Vec& shift) const
{
    return Ellipsoid(a_, c_ + shift);
}

double ellipsoidal_coordinate(const Ellipsoid& E, const Vec& x)
{
    if (x.size() != E.dim())
        throw Error(ErrorKind::InvalidInput, "dimension mismatch");
    require_finite(x, "point");
    const Vec d = x - E.center();
    const Eigen::ArrayXd d2 = d.array().square();
    const Eigen::ArrayXd a2 = E.semiaxes().array().square();
    auto f = [&](double lam) { return (d2 / (a2 + lam)).sum() - 1.0; };
    if (f(0.0) <= 0.0) return 0.0;
    // f is decreasing and f(|d|^2) < 0 since sum d^2/(a^2+lam) < |d|^2/lam
    double lo = 0.0, hi = d2.sum();
    while (hi - lo > 1e-8 * std::max(1.0, hi) && hi - lo > 0.0) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) lo = mid;
        else hi = mid;
        if (mid == lo && mid == hi) break;
    }
    double lam = 0.5 * (lo + hi);
    for (int it = 0; it < 50; ++it) {
        const double fv = f(lam);
        if (std::abs(fv) <= 1e-15) break;
        const double fp = -(d2 / (a2 + lam).square()).sum();
        double next = lam - fv / fp;
        if (!(next >= lo && next <= hi)) next = 0.5 * (lo + hi);
        if (fv > 0.0) lo = lam;
        else hi = lam;
        if (next == lam) break;
        lam = next;
    }
    return lam;
}

Paraboloid::Paraboloid(Vec sectional_semiaxes, double vertex_shift)
    : A_(std::move(sectional_semiaxes)), aN_(vertex_shift)
{
    if (A_.size() < 2) throw Error(ErrorKind::InvalidInput, "paraboloid needs dim >= 3");
    require_finite(A_, "sectional semiaxes");
    if (!std::isfinite(aN_)) throw Error(ErrorKind::InvalidInput, "non-finite vertex shift");
    if ((A_.array() <= 0.0).any())
        throw Error(ErrorKind::InvalidInput, "sectional semiaxes must be positive");
}

bool Paraboloid::contains(const Vec& x) const
{
    require_dim(dim(), x);
    require_finite(x, "point");
    const double y = x(dim() - 1) + aN_;
    if (y < 0.0) return false;
    return (x.head(dim() - 1).array() / A_.array()).square().sum() <= y;
}

double Paraboloid::boundary_height(const Vec& xprime) const
{
    return (xprime.array() / A_.array()).square().sum() - aN_;
}

bool Paraboloid::isotropic(double tol) const
{
    return (A_.array() - A_(0)).abs().maxCoeff() <= tol * A_(0);
}

Ellipsoid paraboloid_section(const Paraboloid& P, double height)
{
    const double y = height + P.vertex_shift();
    if (y < 0.0)
        throw Error(ErrorKind::EmptySection, "section below the vertex",
                    {{"height", height}, {"vertex", -P.vertex_shift()}});
    if (y == 0.0) return Ellipsoid::point(P.dim() - 1);
    return Ellipsoid(P.sectional_semiaxes() * std::sqrt(y));
}

EnvelopeSet EnvelopeSet::growth(int dim, double delta, double shift)
{
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "growth envelope needs delta > 0");
    EnvelopeSet e;
    e.kind_ = EnvelopeKind::Growth;
    e.dim_ = dim;
    e.delta_ = delta;
    e.shift_ = shift;
    return e;
}

EnvelopeSet EnvelopeSet::widened(int dim, double gamma, double mu, double shift)
{
    if (!(mu > kMuThreshold))
        throw Error(ErrorKind::Precondition, "widened paraboloid needs mu > 25/72", {{"mu", mu}});
    if (!(gamma > 0.0)) throw Error(ErrorKind::InvalidInput, "widened paraboloid needs gamma > 0");
    EnvelopeSet e;
    e.kind_ = EnvelopeKind::WidenedParaboloid;
    e.dim_ = dim;
    e.gamma_ = gamma;
    e.mu_ = mu;
    e.shift_ = shift;
    return e;
}

bool EnvelopeSet::contains(const Vec& x) const
{
    require_dim(dim_, x);
    require_finite(x, "point");
    const double y = x(dim_ - 1) + shift_;
    if (y <= 0.0) return false;
    const double r2 = x.head(dim_ - 1).squaredNorm();
    if (kind_ == EnvelopeKind::Growth) return r2 < std::pow(y, 1.0 + delta_);
    return std::sqrt(r2) < gamma_ * std::pow(y, 0.5 + mu_);
}

bool contains(const Body& body, const Vec& x)
{
    return std::visit([&](const auto& b) { return b.contains(x); }, body);
}

int body_dim(const Body& body)
{
    return std::visit([](const auto& b) { return b.dim(); }, body);
}

} // namespace obstlab

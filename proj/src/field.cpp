#include "obstlab/field.hpp"

#include <algorithm>
#include <cmath>

#include "obstlab/error.hpp"

namespace obstlab {

namespace {

Vec fd_gradient(const std::function<double(const Vec&)>& f, const Vec& x)
{
    const double h = 1e-6 * std::max(1.0, x.norm());
    Vec g(x.size()), y = x;
    for (int i = 0; i < x.size(); ++i) {
        y(i) = x(i) + h;
        const double fp = f(y);
        y(i) = x(i) - h;
        const double fm = f(y);
        y(i) = x(i);
        g(i) = (fp - fm) / (2 * h);
    }
    return g;
}

std::vector<double> merged(std::vector<double> a, const std::vector<double>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
}

class ParaboloidField final : public Field {
public:
    explicit ParaboloidField(const ParaboloidSolution& s) : s_(s) {}
    int dim() const override { return s_.dim(); }
    double value(const Vec& x) const override { return s_.value(x); }
    Vec gradient(const Vec& x) const override { return s_.gradient(x); }
    Mat hessian(const Vec& x) const override { return s_.hessian(x); }

    // roots of g(theta) = sum y_j^2/A_j^2 - y_N - a_N along the great half-circle
    std::vector<double> polar_breaks(const Vec& c, double t, const Vec& w) const override
    {
        const Paraboloid& P = s_.paraboloid();
        const Vec& A = P.sectional_semiaxes();
        const int n = P.dim() - 1;
        auto g = [&](double th) {
            const double st = std::sin(th), ct = std::cos(th);
            double q = 0.0;
            for (int j = 0; j < n; ++j) {
                const double y = c(j) + t * st * w(j);
                q += y * y / (A(j) * A(j));
            }
            return q - (c(n) + t * ct + P.vertex_shift());
        };
        std::vector<double> out;
        const int M = 64;
        double a = 0.0, ga = g(a);
        for (int k = 1; k <= M; ++k) {
            double b = M_PI * k / M, gb = g(b);
            if ((ga < 0) != (gb < 0)) {
                double lo = a, hi = b, glo = ga;
                for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi), gm = g(mid);
                    if ((gm < 0) == (glo < 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                out.push_back(std::cos(0.5 * (lo + hi)));
            }
            a = b;
            ga = gb;
        }
        return out;
    }

    // On-axis centers: the sphere passes the vertex at t = |s| and first
    // touches dP at the distance from the center to the boundary.
    std::vector<double> radial_breaks(const Vec& c) const override
    {
        const Paraboloid& P = s_.paraboloid();
        const int n = P.dim() - 1;
        if (c.head(n).norm() > 0.0) return {};
        const double s = c(n) + P.vertex_shift();
        std::vector<double> out;
        if (s == 0.0) return out;
        out.push_back(std::abs(s));
        if (s > 0.0) {
            const double A2 = std::pow(P.sectional_semiaxes().minCoeff(), 2);
            const double d2 = s - 0.5 * A2 >= 0.0 ? A2 * s - 0.25 * A2 * A2 : s * s;
            out.push_back(std::sqrt(d2));
        }
        return out;
    }

    bool axisymmetric() const override
    {
        const Vec& b = s_.blowdown().b;
        return s_.paraboloid().isotropic() && (b.array() - b(0)).abs().maxCoeff() < 1e-14;
    }

private:
    ParaboloidSolution s_;
};

class QuadraticField final : public Field {
public:
    QuadraticField(Mat Q, Vec l, double c) : Q_(0.5 * (Q + Q.transpose())), l_(std::move(l)), c_(c)
    {
        if (Q_.rows() != l_.size())
            throw Error(ErrorKind::InvalidInput, "quadratic field: dimension mismatch");
    }
    int dim() const override { return static_cast<int>(l_.size()); }
    double value(const Vec& x) const override { return x.dot(Q_ * x) + l_.dot(x) + c_; }
    Vec gradient(const Vec& x) const override { return 2.0 * Q_ * x + l_; }
    Mat hessian(const Vec&) const override { return 2.0 * Q_; }
    bool axisymmetric() const override
    {
        const int n = dim() - 1;
        const Mat Qp = Q_.topLeftCorner(n, n);
        const Mat D = Qp - Qp(0, 0) * Mat::Identity(n, n);
        return D.cwiseAbs().maxCoeff() < 1e-14 && Q_.col(n).head(n).cwiseAbs().maxCoeff() < 1e-14 &&
               l_.head(n).cwiseAbs().maxCoeff() < 1e-14;
    }

private:
    Mat Q_;
    Vec l_;
    double c_;
};

class SumField final : public Field {
public:
    SumField(FieldPtr a, FieldPtr b, double s) : a_(std::move(a)), b_(std::move(b)), s_(s)
    {
        if (a_->dim() != b_->dim()) throw Error(ErrorKind::InvalidInput, "sum field: dimension mismatch");
    }
    int dim() const override { return a_->dim(); }
    double value(const Vec& x) const override { return a_->value(x) + s_ * b_->value(x); }
    Vec gradient(const Vec& x) const override { return a_->gradient(x) + s_ * b_->gradient(x); }
    Mat hessian(const Vec& x) const override { return a_->hessian(x) + s_ * b_->hessian(x); }
    std::vector<double> polar_breaks(const Vec& c, double t, const Vec& w) const override
    {
        return merged(a_->polar_breaks(c, t, w), b_->polar_breaks(c, t, w));
    }
    std::vector<double> radial_breaks(const Vec& c) const override
    {
        return merged(a_->radial_breaks(c), b_->radial_breaks(c));
    }
    bool axisymmetric() const override { return a_->axisymmetric() && b_->axisymmetric(); }
    std::string gradient_source() const override
    {
        const auto sa = a_->gradient_source(), sb = b_->gradient_source();
        return sa == sb ? sa : "mixed";
    }

private:
    FieldPtr a_, b_;
    double s_;
};

class DirectionalField final : public Field {
public:
    DirectionalField(FieldPtr f, Vec e) : f_(std::move(f)), e_(std::move(e))
    {
        if (e_.size() != f_->dim()) throw Error(ErrorKind::InvalidInput, "direction: dimension mismatch");
    }
    int dim() const override { return f_->dim(); }
    double value(const Vec& x) const override { return e_.dot(f_->gradient(x)); }
    Vec gradient(const Vec& x) const override { return f_->hessian(x) * e_; }
    std::vector<double> polar_breaks(const Vec& c, double t, const Vec& w) const override
    {
        return f_->polar_breaks(c, t, w);
    }
    std::vector<double> radial_breaks(const Vec& c) const override { return f_->radial_breaks(c); }
    bool axisymmetric() const override
    {
        return f_->axisymmetric() && e_.head(dim() - 1).cwiseAbs().maxCoeff() == 0.0;
    }
    std::string gradient_source() const override { return f_->gradient_source(); }

private:
    FieldPtr f_;
    Vec e_;
};

class FunctionField final : public Field {
public:
    FunctionField(int dim, std::function<double(const Vec&)> f, std::function<Vec(const Vec&)> g,
                  bool axi)
        : dim_(dim), f_(std::move(f)), g_(std::move(g)), axi_(axi) {}
    int dim() const override { return dim_; }
    double value(const Vec& x) const override { return f_(x); }
    Vec gradient(const Vec& x) const override { return g_ ? g_(x) : fd_gradient(f_, x); }
    bool axisymmetric() const override { return axi_; }
    std::string gradient_source() const override { return g_ ? "closed-form" : "finite-difference"; }

private:
    int dim_;
    std::function<double(const Vec&)> f_;
    std::function<Vec(const Vec&)> g_;
    bool axi_;
};

} // namespace

Mat Field::hessian(const Vec& x) const
{
    const double h = 1e-5 * std::max(1.0, x.norm());
    const int n = dim();
    Mat H(n, n);
    Vec y = x;
    for (int i = 0; i < n; ++i) {
        y(i) = x(i) + h;
        const Vec gp = gradient(y);
        y(i) = x(i) - h;
        const Vec gm = gradient(y);
        y(i) = x(i);
        H.col(i) = (gp - gm) / (2 * h);
    }
    return 0.5 * (H + H.transpose());
}

std::vector<double> Field::polar_breaks(const Vec&, double, const Vec&) const { return {}; }
std::vector<double> Field::radial_breaks(const Vec&) const { return {}; }

FieldPtr paraboloid_field(const ParaboloidSolution& sol)
{
    return std::make_shared<ParaboloidField>(sol);
}

FieldPtr quadratic_field(const Mat& Q, const Vec& l, double c)
{
    return std::make_shared<QuadraticField>(Q, l, c);
}

FieldPtr blowdown_field(const BlowdownData& b)
{
    const int N = b.dim;
    Mat Q = Mat::Zero(N, N);
    Q.diagonal().head(N - 1) = b.b;
    return quadratic_field(Q, Vec::Zero(N), 0.0);
}

FieldPtr sum_field(FieldPtr a, FieldPtr b, double s)
{
    return std::make_shared<SumField>(std::move(a), std::move(b), s);
}

FieldPtr directional_derivative(FieldPtr f, const Vec& e)
{
    return std::make_shared<DirectionalField>(std::move(f), e);
}

FieldPtr function_field(int dim, std::function<double(const Vec&)> f,
                        std::function<Vec(const Vec&)> grad, bool axisymmetric)
{
    return std::make_shared<FunctionField>(dim, std::move(f), std::move(grad), axisymmetric);
}

} // namespace obstlab

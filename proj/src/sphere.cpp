#include "obstlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "obstlab/error.hpp"
#include "obstlab/quadrature.hpp"

namespace obstlab {

namespace {

double sin_power_integral(int p)
{
    return std::sqrt(M_PI) * std::tgamma(0.5 * (p + 1)) / std::tgamma(0.5 * p + 1.0);
}

// nodes/weights on [0, pi] for the weight sin^p. Unsplit angles use
// Gauss-Gegenbauer in cos(psi) (exact for polynomial integrands); split
// ones use Gauss-Legendre in psi on each half, renormalized.
void angle_rule(int n, int p, bool split, std::vector<double>& x, std::vector<double>& w)
{
    x.clear();
    w.clear();
    if (!split) {
        const auto g = quad::gauss_gegenbauer(n, 0.5 * p);
        for (int i = n - 1; i >= 0; --i) {
            x.push_back(std::acos(g.x[i]));
            w.push_back(g.w[i]);
        }
        return;
    }
    for (auto [a, b] : {std::pair{0.0, 0.5 * M_PI}, std::pair{0.5 * M_PI, M_PI}}) {
        const auto r = quad::gauss_legendre(n, a, b);
        for (std::size_t i = 0; i < r.x.size(); ++i) {
            x.push_back(r.x[i]);
            w.push_back(r.w[i] * std::pow(std::sin(r.x[i]), p));
        }
    }
    double s = 0.0;
    for (double v : w) s += v;
    const double scale = sin_power_integral(p) / s;
    for (double& v : w) v *= scale;
}

} // namespace

SphereRule sphere_rule(int d, const std::vector<int>& counts, bool split_first, int first_axis)
{
    if (d < 2) throw Error(ErrorKind::InvalidInput, "sphere_rule needs d >= 2");
    if (static_cast<int>(counts.size()) != d - 1)
        throw Error(ErrorKind::InvalidInput, "sphere_rule: counts must have d-1 entries",
                    {{"d", d}, {"counts", counts}});
    if (first_axis < 0 || first_axis >= d)
        throw Error(ErrorKind::InvalidInput, "sphere_rule: first_axis out of range");
    for (int c : counts)
        if (c < 1) throw Error(ErrorKind::InvalidInput, "sphere_rule: counts must be positive");

    std::vector<std::vector<double>> ax(d - 2), aw(d - 2);
    for (int k = 0; k < d - 2; ++k)
        angle_rule(counts[k], d - 2 - k, split_first && k == 0, ax[k], aw[k]);
    const int m = counts[d - 2];

    SphereRule rule;
    std::vector<int> idx(d - 2, 0);
    while (true) {
        for (int j = 0; j < m; ++j) {
            const double phi = 2.0 * M_PI * (j + 0.5) / m;
            Vec w(d);
            double s = 1.0, weight = 2.0 * M_PI / m;
            for (int k = 0; k < d - 2; ++k) {
                const double psi = ax[k][idx[k]];
                w(k) = s * std::cos(psi);
                s *= std::sin(psi);
                weight *= aw[k][idx[k]];
            }
            w(d - 2) = s * std::cos(phi);
            w(d - 1) = s * std::sin(phi);
            if (first_axis != 0) std::swap(w(0), w(first_axis));
            rule.nodes.push_back(std::move(w));
            rule.weights.push_back(weight);
        }
        int k = d - 3;
        while (k >= 0 && ++idx[k] == static_cast<int>(ax[k].size())) idx[k--] = 0;
        if (k < 0) break;
    }
    return rule;
}

std::vector<int> uniform_counts(int d, int n)
{
    std::vector<int> c(d - 1, n);
    c.back() = 2 * n;
    return c;
}

PolarOptions PolarOptions::refined(double factor) const
{
    PolarOptions o = *this;
    auto up = [&](int n) { return n <= 1 ? n : static_cast<int>(std::ceil(n * factor)); };
    o.n_radial = up(n_radial);
    o.n_polar = up(n_polar);
    for (int& c : o.sphere) c = up(c);
    return o;
}

PolarIntegrator::PolarIntegrator(int N, PolarOptions opt) : N_(N), opt_(std::move(opt))
{
    if (N < 3) throw Error(ErrorKind::UnsupportedDimension, "polar quadrature needs N >= 3");
    if (opt_.sphere.empty()) opt_.sphere.assign(N - 2, 1);
    inner_ = sphere_rule(N - 1, opt_.sphere, opt_.split_first, opt_.first_axis);
}

std::vector<double> PolarIntegrator::sphere(const Vec& c, double R, const Integrand& f, int K,
                                            const Breaks& breaks) const
{
    std::vector<double> acc(K, 0.0), out(K);
    Vec y(N_);
    for (std::size_t s = 0; s < inner_.nodes.size(); ++s) {
        const Vec& w = inner_.nodes[s];
        std::vector<double> th{0.0, M_PI};
        if (breaks)
            for (double u : breaks(R, w))
                if (u > -1.0 && u < 1.0) th.push_back(std::acos(u));
        std::sort(th.begin(), th.end());
        for (std::size_t p = 0; p + 1 < th.size(); ++p) {
            if (th[p + 1] - th[p] < 1e-14) continue;
            const auto& g = quad::gauss_legendre(opt_.n_polar, th[p], th[p + 1]);
            for (std::size_t i = 0; i < g.x.size(); ++i) {
                const double st = std::sin(g.x[i]), ct = std::cos(g.x[i]);
                y.head(N_ - 1) = c.head(N_ - 1) + R * st * w;
                y(N_ - 1) = c(N_ - 1) + R * ct;
                f(y, out.data());
                const double wt = inner_.weights[s] * g.w[i] * std::pow(st, N_ - 2);
                for (int k = 0; k < K; ++k) acc[k] += wt * out[k];
            }
        }
    }
    return acc;
}

std::vector<double> PolarIntegrator::ball(const Vec& c, double R,
                                          const std::function<double(double)>& rw,
                                          const Integrand& f, int K, const Breaks& breaks,
                                          const std::vector<double>& radial_breaks) const
{
    std::vector<double> edges{0.0, R};
    for (double t : radial_breaks)
        if (t > 1e-12 * R && t < R * (1 - 1e-12)) edges.push_back(t);
    std::sort(edges.begin(), edges.end());

    std::vector<double> tn, tw;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
        const auto& g = quad::gauss_legendre(opt_.n_radial, edges[p], edges[p + 1]);
        tn.insert(tn.end(), g.x.begin(), g.x.end());
        tw.insert(tw.end(), g.w.begin(), g.w.end());
    }
    std::vector<std::vector<double>> slots(tn.size());
    parallel_for(static_cast<int>(tn.size()), [&](int i) {
        slots[i] = sphere(c, tn[i], f, K, breaks);
    });
    std::vector<double> acc(K, 0.0);
    for (std::size_t i = 0; i < tn.size(); ++i) {
        const double wt = tw[i] * rw(tn[i]);
        for (int k = 0; k < K; ++k) acc[k] += wt * slots[i][k];
    }
    return acc;
}

} // namespace obstlab

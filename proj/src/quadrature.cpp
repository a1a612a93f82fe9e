#include "obstlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <Eigen/Eigenvalues>

namespace obstlab::quad {

namespace {

// Golub-Welsch for the weight (1 - x^2)^{lambda - 1/2}; lambda = 1/2 is Legendre.
Rule unit_rule(int n, double lambda)
{
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double beta = std::sqrt(k * (k + 2 * lambda - 1) / (4.0 * (k + lambda) * (k + lambda - 1)));
        J(k, k - 1) = J(k - 1, k) = beta;
    }
    const double mu0 = std::sqrt(M_PI) * std::tgamma(lambda + 0.5) / std::tgamma(lambda + 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        r.x[i] = es.eigenvalues()(i);
        const double v = es.eigenvectors()(0, i);
        r.w[i] = mu0 * v * v;
    }
    // symmetrize to remove eigensolver asymmetry
    for (int i = 0; i < n / 2; ++i) {
        const double x = 0.5 * (r.x[n - 1 - i] - r.x[i]);
        const double w = 0.5 * (r.w[n - 1 - i] + r.w[i]);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

} // namespace

Rule gauss_gegenbauer(int n, double lambda)
{
    static std::mutex mu;
    static std::map<std::pair<int, double>, Rule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, lambda});
    if (it == cache.end()) it = cache.emplace(std::pair{n, lambda}, unit_rule(n, lambda)).first;
    return it->second;
}

Rule gauss_legendre(int n, double a, double b)
{
    Rule base = gauss_gegenbauer(n, 0.5);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        base.x[i] = c + h * base.x[i];
        base.w[i] *= h;
    }
    return base;
}

} // namespace obstlab::quad

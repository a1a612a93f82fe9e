#pragma once
// Independent reference values used by the unit and acceptance tests.

#include <cmath>
#include <random>

#include "obstlab/types.hpp"

namespace oracle {

inline double sphere_area(int n) { return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n); }
inline double ball_volume(int n) { return sphere_area(n) / n; }

// V_{B_R}(x) for the unit-normalized kernel alpha_N |x - y|^{2-N}
inline double ball_potential(int N, double R, double r)
{
    if (r <= R) return R * R / (2.0 * (N - 2)) - r * r / (2.0 * N);
    return std::pow(R, N) / (N * (N - 2.0)) * std::pow(r, 2.0 - N);
}

// int_{-1}^{1} x^{2k} (1 - x^2)^{lambda - 1/2} dx = B(k + 1/2, lambda + 1/2)
inline double gegenbauer_moment(int k, double lambda)
{
    return std::exp(std::lgamma(k + 0.5) + std::lgamma(lambda + 0.5) - std::lgamma(k + lambda + 1.0));
}

// int_{S^{d-1}} x_1^4
inline double sphere_fourth_moment(int d) { return 3.0 * sphere_area(d) / (d * (d + 2.0)); }

inline obstlab::Vec random_semiaxes(std::mt19937_64& g, int N, double lo = 0.3, double hi = 3.0)
{
    std::uniform_real_distribution<double> U(lo, hi);
    obstlab::Vec a(N);
    for (int j = 0; j < N; ++j) a(j) = U(g);
    return a;
}

// uniform point in the unit ball of R^N scaled by s
inline obstlab::Vec random_in_ball(std::mt19937_64& g, int N, double s)
{
    std::normal_distribution<double> G;
    std::uniform_real_distribution<double> U;
    obstlab::Vec x(N);
    for (int j = 0; j < N; ++j) x(j) = G(g);
    return s * std::pow(U(g), 1.0 / N) * x / x.norm();
}

} // namespace oracle

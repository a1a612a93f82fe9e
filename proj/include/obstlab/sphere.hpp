#pragma once

#include <functional>
#include <vector>

#include "obstlab/types.hpp"

namespace obstlab {

// Product rule on S^{d-1} in R^d. Hyperspherical angles psi_1..psi_{d-2} use
// Gauss-Gegenbauer in cos(psi) (weight sin^{d-1-k}), phi on [0, 2pi) the
// trapezoid rule. counts has d-1 entries; the first angle is measured from
// e_{first_axis} and may be split at pi/2, in which case each half gets
// Gauss-Legendre in psi renormalized so constants integrate exactly.
struct SphereRule {
    std::vector<Vec> nodes;
    std::vector<double> weights;
};

SphereRule sphere_rule(int d, const std::vector<int>& counts, bool split_first = false,
                       int first_axis = 0);

// Same counts for every angle (phi gets twice as many nodes).
std::vector<int> uniform_counts(int d, int n);

struct PolarOptions {
    int n_radial = 24;
    int n_polar = 24;           // per polar piece
    std::vector<int> sphere;    // counts for S^{N-2}; empty: all ones
    bool split_first = false;
    int first_axis = 0;

    PolarOptions refined(double factor) const;
};

// Integration over balls in R^N, split along polar breaks. The sphere is
// parameterized by y = c + t (cos(theta) e^N + sin(theta) w).
class PolarIntegrator {
public:
    using Breaks = std::function<std::vector<double>(double t, const Vec& w)>;
    // f(y, out) adds nothing; it writes K values to out
    using Integrand = std::function<void(const Vec& y, double* out)>;

    PolarIntegrator(int N, PolarOptions opt);

    // int_0^R rw(t) int_{S^{N-1}} f(c + t omega) d omega dt
    std::vector<double> ball(const Vec& c, double R, const std::function<double(double)>& rw,
                             const Integrand& f, int K, const Breaks& breaks,
                             const std::vector<double>& radial_breaks = {}) const;
    // int_{S^{N-1}} f(c + R omega) d omega
    std::vector<double> sphere(const Vec& c, double R, const Integrand& f, int K,
                               const Breaks& breaks) const;

private:
    int N_;
    PolarOptions opt_;
    SphereRule inner_;
};

} // namespace obstlab

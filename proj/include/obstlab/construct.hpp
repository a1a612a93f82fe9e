#pragma once

#include <optional>
#include <vector>

#include "obstlab/geometry.hpp"
#include "obstlab/potential.hpp"

namespace obstlab {

// p_b(x') = sum b_j x_j^2, linear part -b_N x_N, constant -b_{N+1}.
struct BlowdownData {
    int dim = 0;
    Vec b;           // b_1..b_{N-1}
    double bN = 0.0;
    double bN1 = 0.0;

    static BlowdownData isotropic(int N, double bN = 1.0, double bN1 = 0.0);
    void validate() const;
    double c_p() const { return b.minCoeff(); }
    double p(const Vec& x) const; // p_b(x'), x in R^N or R^{N-1}
};

struct FitOptions {
    int max_iter = 100;
    double fd_step = 1e-6;
    double tol = 1e-13; // max |log q_j(a) - log q_j|
    std::optional<Vec> initial; // semiaxes guess; default q^{-1/2}
};

struct FitResult {
    Ellipsoid E;
    int iterations = 0;
    double residual = 0.0;
};

FitResult fit_ellipsoid_ex(const Vec& q, double c, const FitOptions& opt = {});
Ellipsoid fit_ellipsoid(const Vec& q, double c, const FitOptions& opt = {});

struct EllipsoidSequenceTerm {
    int n = 0;
    Vec q;           // q^n, size N
    double c = 0.0;  // c_n
    double tau = 0.0;
    Ellipsoid fitted; // centered fit of (q^n, c_n)
    Ellipsoid E;      // fitted + tau e^N
    double identity_error = 0.0; // max |V_{E^n} - (b_N x_N - q^n(x))| on samples
    int fit_iterations = 0;
    double fit_residual = 0.0;

    // tau_n / B_{j,n}^2 for j < N
    Vec aperture() const;
    // tau_n / B_{N,n}
    double axis_ratio() const;
    // tau_n (1 - (tau_n/B_{N,n})^2)
    double level_constant() const;
};

EllipsoidSequenceTerm ellipsoid_sequence_term(const BlowdownData& b, int n, int samples = 20,
                                              const FitOptions& opt = {});

// u_P(x) = p_b(x') - b_N x_N - b_{N+1} + V_P(x)
class ParaboloidSolution {
public:
    ParaboloidSolution(BlowdownData b, Paraboloid P);

    const BlowdownData& blowdown() const { return b_; }
    const Paraboloid& paraboloid() const { return pot_.body(); }
    const ParaboloidPotential& potential() const { return pot_; }
    int dim() const { return b_.dim; }
    double c_P() const { return -b_.bN1; }

    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;

    // Same solution translated: u_{P_lambda}(x) = u_P(x + lambda e^N).
    ParaboloidSolution shifted(double lambda) const;

private:
    BlowdownData b_;
    ParaboloidPotential pot_;
};

struct ConstructionReport {
    std::vector<EllipsoidSequenceTerm> terms;
    Vec aperture_extrapolated;   // B_j
    double level_extrapolated = 0.0;
    Vec semiaxes_extrapolated;   // A_j from the limit
    double vertex_extrapolated = 0.0;
    double extrapolation_gap = 0.0; // max rel. difference to the polished parameters
    std::vector<double> cauchy;     // max_j |B_{j,n} - B_{j,n/2}| per n
    std::vector<double> cauchy_ratio;
    bool full_sequence_converges = true;
};

// Doubling schedule 8, 16, ... truncated where the initial semiaxis ratio of
// the fit would exceed 1e3.
std::vector<int> sequence_schedule(const BlowdownData& b, int n_max = 2048);

// Limit of v(n) assuming v = v_inf + sum_{e=1..levels} c_e n^{-e}, fitted
// through the last levels+1 entries.
double richardson_limit(const std::vector<int>& n, const std::vector<double>& v, int levels);

struct ConstructOptions {
    std::vector<int> schedule; // empty: sequence_schedule(b)
    int levels = 4;
    double tol = 1e-6;
    bool run_sequence = true;
};

ParaboloidSolution construct_paraboloid(const BlowdownData& b, const ConstructOptions& opt = {},
                                        ConstructionReport* report = nullptr);

struct SectionalEllipsoid {
    Ellipsoid E;       // in dimension N-1
    double scale = 1.0; // E = scale * (unit-height section of P)
    double residual = 0.0;
};

SectionalEllipsoid sectional_ellipsoid(const BlowdownData& b);

// Exact blow-down data of a paraboloid (inverse direction of construct).
BlowdownData blowdown_of(const Paraboloid& P);

} // namespace obstlab

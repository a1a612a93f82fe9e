#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "obstlab/geometry.hpp"
#include "obstlab/types.hpp"

namespace obstlab {

// Integrals over [lambda, inf) with g(s) = prod_k sqrt(a_k^2 + s):
//   I0 = int ds/g,  I_j = int ds/((a_j^2+s) g),  Is = int s ds/g,
// plus the potential integrand integrated directly (bracket).
struct TailIntegrals {
    double I0 = 0.0;
    Vec I;
    double Is = 0.0;
    double bracket = 0.0;
    int intervals = 0;
};

enum class Bracket { None, Ellipsoid, Paraboloid };

// d: offsets x - center (ellipsoid) or x' (paraboloid); z = x_N + a_N for the paraboloid.
TailIntegrals tail_integrals(const Vec& a, double lambda, Bracket mode, const Vec& d = Vec(),
                             double z = 0.0, bool with_sigma = false);

struct InteriorQuadratic {
    double c = 0.0;
    Vec q;
};

InteriorQuadratic ellipsoid_interior_coefficients(const Ellipsoid& E);
double ellipsoid_potential(const Ellipsoid& E, const Vec& x);
Vec ellipsoid_potential_gradient(const Ellipsoid& E, const Vec& x);
Mat ellipsoid_potential_hessian(const Ellipsoid& E, const Vec& x);
// V_{tE}(x) - V_E(x) for x in E.
double homoeoid_gap(const Ellipsoid& E, double t, const Vec& x);

// Closed-form potential of a paraboloid (N >= 6), the tau -> infinity limit
// of the ellipsoid formula:
//   V_P(x) = (prod a'/4) int_lambda^inf (s + 2z - sum x_j^2/(a'_j^2+s)) ds / g(s)
// with a'_j = A_j / sqrt(2), z = x_N + a_N.
class ParaboloidPotential {
public:
    explicit ParaboloidPotential(const Paraboloid& P);

    const Paraboloid& body() const { return P_; }
    int dim() const { return P_.dim(); }
    // Largest root of sum x_j^2/(a'_j^2+s) - s - 2z = 0 (0 inside P).
    double coordinate(const Vec& x) const;
    double value(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    Mat hessian(const Vec& x) const;

    // Inside P: V = -sum b_j x_j^2 + b_N x_N + b_{N+1}.
    const Vec& interior_b() const { return b_; }
    double interior_bN() const { return bN_; }
    double interior_bN1() const { return bN1_; }

private:
    Paraboloid P_;
    Vec ap_; // a'
    double prod_ = 1.0;
    TailIntegrals at0_;
    Vec b_;
    double bN_ = 0.0, bN1_ = 0.0;
};

struct PotentialValue {
    double value = 0.0;
    double stderr_ = -1.0; // < 0 when not applicable
    std::string method;
    int n_terms = 0;
    double bracket = 0.0; // difference of the last two extrapolants
    bool nested = true;    // every E^{n/2} inside E^n on sampled boundary points
    bool from_below = true; // raw sequence nondecreasing
};

// Evaluation front end. For paraboloids the sequence method extrapolates
// V_{E^n}(x) in 1/n over the doubling schedule (see sequence_schedule).
PotentialValue paraboloid_potential(const Paraboloid& P, const Vec& x, double tol);

struct Box {
    Vec lo, hi;
};

struct MonteCarloResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    long accepted = 0;
};

// alpha_N int_{M cap box} |x - y|^{2-N} dy, importance sampled in polar
// coordinates around x so the estimator is bounded.
MonteCarloResult montecarlo_potential(const std::function<bool(const Vec&)>& membership,
                                      const Box& box, const Vec& x, long samples,
                                      std::uint64_t seed);

// Stratified slab sampler for P cap {y_N <= Y} plus the analytic bound on
// the omitted tail. Returns estimate, stderr and the tail bound.
struct SlabResult {
    double estimate = 0.0;
    double stderr_ = 0.0;
    double tail_bound = 0.0;
    double height = 0.0;
};
SlabResult paraboloid_montecarlo(const Paraboloid& P, const Vec& x, long samples,
                                 std::uint64_t seed, double tail_tol);

enum class PotentialMethod { ClosedForm, SequenceExtrapolation, MonteCarlo };
const char* method_name(PotentialMethod m);

// Callable value/gradient field for V_E, V_P or Monte-Carlo V_M.
class PotentialEvaluator {
public:
    static PotentialEvaluator ellipsoid(const Ellipsoid& E);
    static PotentialEvaluator paraboloid(const Paraboloid& P,
                                         PotentialMethod m = PotentialMethod::ClosedForm,
                                         double tol = 1e-8);
    static PotentialEvaluator montecarlo(std::function<bool(const Vec&)> membership, Box box,
                                         int dim, long samples, std::uint64_t seed);

    int dim() const { return dim_; }
    double alpha() const { return newton_constant(dim_); }
    PotentialMethod method() const { return method_; }
    double tolerance() const { return tol_; }

    PotentialValue evaluate(const Vec& x) const;
    double value(const Vec& x) const { return evaluate(x).value; }
    Vec gradient(const Vec& x) const;

private:
    int dim_ = 0;
    PotentialMethod method_ = PotentialMethod::ClosedForm;
    double tol_ = 1e-10;
    std::function<PotentialValue(const Vec&)> eval_;
    std::function<Vec(const Vec&)> grad_;
};

} // namespace obstlab

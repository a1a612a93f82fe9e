#pragma once

#include <string>
#include <vector>

#include "obstlab/construct.hpp"
#include "obstlab/field.hpp"
#include "obstlab/geometry.hpp"
#include "obstlab/potential.hpp"
#include "obstlab/solver.hpp"
#include "obstlab/sphere.hpp"

namespace obstlab {

// ---- frequency functional ------------------------------------------------

struct QuadratureOptions {
    PolarOptions polar;   // empty sphere counts: ones for axisymmetric integrands, else 4
    double refine = 1.5;  // the error estimate reruns with this many more nodes
};

struct FrequencyValue {
    double r = 0.0;
    double F1 = 0.0;
    double dirichlet = 0.0; // int_{B_1} |grad v|^2
    double trace = 0.0;     // int_{dB_1} v^2
    double error = 0.0;     // |F1(refined) - F1(base)|
};

// F1 of v_r = u_r - p on the unit ball.
FrequencyValue frequency_F1(FieldPtr u, FieldPtr p, double r, const QuadratureOptions& opt = {});

struct FrequencyReport {
    std::vector<FrequencyValue> values;
    int violations = 0;          // F1 decreasing by more than the quadrature error
    double max_violation = 0.0;
    int positive = 0;            // F1 above the quadrature error
    double max_positive = 0.0;
    std::string gradient_source;

    bool monotone() const { return violations == 0; }
    bool nonpositive() const { return positive == 0; }
};

FrequencyReport frequency_report(FieldPtr u, FieldPtr p, const std::vector<double>& radii,
                                 const QuadratureOptions& opt = {}, double tol_floor = 1e-9);

// ---- projection onto harmonic x'-quadratics ------------------------------

struct SphereSamples {
    int dim = 0;
    std::vector<Vec> points;
    std::vector<double> weights;
    std::vector<double> values;
};

// product-rule points on S^{N-1}; values left empty
SphereSamples sphere_samples(int N, int nodes);

// symmetric traceless Q on x', value Q(x') = x'^T Q x'
struct HarmonicQuadratic {
    int dim = 0;
    Mat Q;
    Vec coefficients; // in the basis x_i x_j (i<j), then x_i^2 - x_{i+1}^2
    double value(const Vec& x) const;
};

HarmonicQuadratic project_P2prime(const SphereSamples& g);

struct DoublingValue {
    double r = 0.0;
    double f_r = 0.0;
    double f_2r = 0.0;
    double log2_ratio = 0.0;
    bool degenerate = false; // f(r) vanishes, ratio undefined
};

DoublingValue doubling_f(FieldPtr u, FieldPtr p, double r, int nodes = 6);

// ---- ACF functional ------------------------------------------------------

struct ACFValue {
    double r = 0.0;
    double phi = 0.0;
    double I_plus = 0.0;
    double I_minus = 0.0;
    double error = 0.0;
};

// Options for h = directional derivative of an axisymmetric field along e_axis (axis < N-1):
// the sign of h flips across {x_axis = 0}.
QuadratureOptions acf_options(int N, int axis, int nodes = 16);

ACFValue acf(FieldPtr h, double r, const Vec& x, const QuadratureOptions& opt);

// ---- growth envelope -----------------------------------------------------

struct EnvelopeNode {
    int i = 0, j = 0;
    double rho = 0.0, height = 0.0; // height = z + shift
};

struct EnvelopeReport {
    double delta = 0.0;
    double a_est = 0.0;                  // mask nodes above a_est satisfy the envelope
    std::vector<EnvelopeNode> violations; // highest first, at most 100
    long violation_count = 0;
    long checked = 0;
    double below_max_rho = 0.0;          // extent of the mask below a_est
    bool below_bounded = true;           // the mask below a_est stays off rho = R
};

EnvelopeReport growth_envelope_check(const CoincidenceMask& mask, const GridSpec& grid, double delta,
                                     double shift = 0.0);

// ---- decay and growth of potentials --------------------------------------

struct DecayRow {
    double k = 0.0;
    double edge_value = 0.0;  // V_P at (gamma k^{1/2+mu}, 0, .., k - a_N)
    double off_axis = 0.0;    // max on dB_k cap {x_N <= k/2}
};

struct DecayTable {
    double gamma = 0.0, mu = 0.0;
    std::vector<DecayRow> rows;
    bool edge_decreasing = true;
    bool off_axis_decreasing = true;
};

DecayTable potential_decay_scan(const Paraboloid& P, double gamma, double mu, const std::vector<double>& ks);

struct SubquadraticRow {
    double radius = 0.0;
    double max_ratio = 0.0;
    Vec argmax;
};

struct SubquadraticTable {
    std::vector<SubquadraticRow> rows;
    bool decreasing = true;
};

// axis_only: sample only +-e^N
SubquadraticTable subquadratic_check(const PotentialEvaluator& V, const std::vector<double>& radii,
                                     bool axis_only = false, int polar_nodes = 17);

// ---- comparison and sliding ----------------------------------------------

// u = p + l.x + c + V_C at infinity
struct Expansion {
    Vec l;
    double c = 0.0;
    double c_P = 0.0;
};

struct CompareOptions {
    std::vector<double> offsets{1.0, 0.5, 0.1, 0.0}; // lambda = lambda_bar + offset
    double below = 1.0;     // one untested row at lambda_bar - below (<= 0 disables)
    double C_cmp = 10.0;    // tolerance C_cmp h^2
    double eps = -1.0;      // coincidence threshold, < 0: default
    double mu = 7.0 / 20.0;
    bool strict = true;     // throw comparison-failed on a tested violation
};

struct ComparisonRow {
    double lambda = 0.0;
    double max_gap = 0.0;
    double rho = 0.0, z = 0.0; // location of the maximum
    bool tested = true;
    bool pass = true;
};

struct ComparisonReport {
    double lambda_bar = 0.0;
    double h = 0.0;
    double tolerance = 0.0;
    double gamma = 0.0, mu = 0.0;
    std::vector<ComparisonRow> rows;
    double symdiff_fraction = 0.0;
    bool symdiff_ok = false;
    bool verdict = false;
};

ComparisonReport compare_and_slide(const GridSolution& u, const BlowdownData& b, const Expansion& e,
                                   const Paraboloid& P, const CompareOptions& opt = {});

// ---- Hele-Shaw traveling wave --------------------------------------------

// phi = (1 - w)_+^4, w = ((t-t0)/st)^2 + (rho/sr)^2 + ((z-z0)/sz)^2, on the axis
struct Bump {
    double t0 = 0.0, z0 = 0.0;
    double st = 0.5, sr = 0.5, sz = 0.5;
};

struct SpaceTimeBox {
    double t0 = -1e300, t1 = 1e300, z0 = -1e300, z1 = 1e300, R = 1e300;
};

// int int p lap(phi) + chi_{p>0} d_t phi, midpoint rule with n cells per space axis,
// time integrated by Gauss-Legendre split at the free-boundary passage.
double hele_shaw_weak_residual(const ParaboloidSolution& uP, double c, const Bump& phi, int n,
                               int time_nodes = 12);

struct HeleShawRow {
    Bump bump;
    int n = 0;
    double coarse = 0.0;  // residual with n cells
    double fine = 0.0;    // with 2n cells
    double ratio = 0.0;   // |coarse| / |fine|
};

std::vector<HeleShawRow> hele_shaw_residual(const ParaboloidSolution& uP, double c,
                                            const std::vector<Bump>& bumps, int n = 8,
                                            const SpaceTimeBox& box = {});

} // namespace obstlab

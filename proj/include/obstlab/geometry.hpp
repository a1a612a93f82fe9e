#pragma once

#include <string>
#include <variant>

#include "obstlab/types.hpp"

namespace obstlab {

class Ellipsoid {
public:
    Ellipsoid() = default;
    Ellipsoid(Vec semiaxes, Vec center);
    explicit Ellipsoid(Vec semiaxes);
    static Ellipsoid ball(int dim, double radius);

    int dim() const { return static_cast<int>(a_.size()); }
    const Vec& semiaxes() const { return a_; }
    const Vec& center() const { return c_; }
    // True for the point-ellipsoid produced by a vertex section.
    bool degenerate() const { return degenerate_; }

    bool contains(const Vec& x) const;
    // sum (x_j - c_j)^2 / a_j^2
    double level(const Vec& x) const;
    Ellipsoid scaled(double t) const; // tE about the center
    Ellipsoid translated(const Vec& shift) const;

    static Ellipsoid point(int dim); // flagged degenerate, all semiaxes 0

private:
    Vec a_;
    Vec c_;
    bool degenerate_ = false;
};

// Largest root of sum (x_j - c_j)^2 / (a_j^2 + lambda) = 1, or 0 inside E.
double ellipsoidal_coordinate(const Ellipsoid& E, const Vec& x);

// P = { x_N >= -a_N, sum_{j<N} x_j^2 / A_j^2 <= x_N + a_N }, axis e^N.
class Paraboloid {
public:
    Paraboloid() = default;
    Paraboloid(Vec sectional_semiaxes, double vertex_shift);

    int dim() const { return static_cast<int>(A_.size()) + 1; }
    const Vec& sectional_semiaxes() const { return A_; }
    double vertex_shift() const { return aN_; }

    bool contains(const Vec& x) const;
    // Height of the lower boundary above the point x' (x_N on dP).
    double boundary_height(const Vec& xprime) const;
    // Minimal gamma with P inside { |y'| <= gamma sqrt(y_N) }, y_N = x_N + a_N.
    double enclosing_gamma() const { return A_.maxCoeff(); }
    bool isotropic(double tol = 1e-14) const;

private:
    Vec A_;
    double aN_ = 0.0;
};

// Section at height x_N = height, an (N-1)-ellipsoid with semiaxes A_j sqrt(height + a_N).
Ellipsoid paraboloid_section(const Paraboloid& P, double height);

enum class EnvelopeKind { Growth, WidenedParaboloid };

// growth:  |x'|^2 < y_N^{1+delta}
// widened: |x'| < gamma y_N^{1/2+mu}
// with y_N = x_N + shift.
class EnvelopeSet {
public:
    static EnvelopeSet growth(int dim, double delta, double shift = 0.0);
    static EnvelopeSet widened(int dim, double gamma, double mu, double shift = 0.0);

    int dim() const { return dim_; }
    EnvelopeKind kind() const { return kind_; }
    double delta() const { return delta_; }
    double gamma() const { return gamma_; }
    double mu() const { return mu_; }
    double shift() const { return shift_; }

    bool contains(const Vec& x) const;

private:
    EnvelopeKind kind_ = EnvelopeKind::Growth;
    int dim_ = 0;
    double delta_ = 0.0, gamma_ = 0.0, mu_ = 0.0, shift_ = 0.0;
};

// Lower bound on mu for widened envelopes.
constexpr double kMuThreshold = 25.0 / 72.0;

using Body = std::variant<Ellipsoid, Paraboloid, EnvelopeSet>;
bool contains(const Body& body, const Vec& x);
int body_dim(const Body& body);

} // namespace obstlab

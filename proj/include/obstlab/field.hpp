#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "obstlab/construct.hpp"
#include "obstlab/types.hpp"

namespace obstlab {

// Scalar field on R^N with value, gradient and Hessian, plus hints for
// quadrature: polar breaks where the field is not smooth on a sphere.
class Field {
public:
    virtual ~Field() = default;
    virtual int dim() const = 0;
    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec& x) const = 0;
    // default: central differences of the gradient
    virtual Mat hessian(const Vec& x) const;

    // cos(theta) values in (-1, 1) at which the field is non-smooth along
    // y = center + t (cos(theta) e^N + sin(theta) w), w a unit vector in x'.
    virtual std::vector<double> polar_breaks(const Vec& center, double t, const Vec& w) const;
    // radii t where the set of polar breaks changes (sphere tangency etc.)
    virtual std::vector<double> radial_breaks(const Vec& center) const;
    // depends on x' only through |x'|
    virtual bool axisymmetric() const { return false; }
    virtual std::string gradient_source() const { return "closed-form"; }
};

using FieldPtr = std::shared_ptr<const Field>;

FieldPtr paraboloid_field(const ParaboloidSolution& sol);
// x^T Q x + l.x + c
FieldPtr quadratic_field(const Mat& Q, const Vec& l, double c);
// p_b(x') as a field on R^N
FieldPtr blowdown_field(const BlowdownData& b);
// a + s b
FieldPtr sum_field(FieldPtr a, FieldPtr b, double s = 1.0);
// e . grad f
FieldPtr directional_derivative(FieldPtr f, const Vec& e);
// generic callable; gradient by central differences when not given
FieldPtr function_field(int dim, std::function<double(const Vec&)> f,
                        std::function<Vec(const Vec&)> grad = {}, bool axisymmetric = false);

} // namespace obstlab

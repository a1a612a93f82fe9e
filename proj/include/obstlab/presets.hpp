#pragma once

#include <string>
#include <vector>

#include "obstlab/construct.hpp"
#include "obstlab/diagnostics.hpp"
#include "obstlab/solver.hpp"

namespace obstlab::presets {

// "isotropic" (any N >= 3) or "anisotropic" (N = 6: b = (.05,.05,.1,.1,.2)); b_N = 1, b_{N+1} = 0
BlowdownData blowdown(const std::string& name, int N);
std::vector<std::string> blowdown_names();

// Axisymmetric box around the vertex of P: rho <= 2, x_N in vertex + [-2, 2].
GridSpec solve_box(const Paraboloid& P, double h, double shift = 0.0);

// Five axisymmetric test functions straddling the free boundary at t = 0.
std::vector<Bump> hele_shaw_bumps(const Paraboloid& P);

} // namespace obstlab::presets

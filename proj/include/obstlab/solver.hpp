#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <json.hpp>

#include "obstlab/field.hpp"

namespace obstlab {

enum class GridMode { Axisymmetric, Slab };

// Nodes rho_i = i h_r (i < nr), z_j = z0 + j h_z (j < nz). Slab grids have nr = 1.
struct GridSpec {
    double R = 1.0;
    double z0 = -1.0, z1 = 1.0;
    int nr = 33, nz = 65;

    static GridSpec from_spacing(double R, double z0, double z1, double h);
    double hr() const { return nr > 1 ? R / (nr - 1) : 0.0; }
    double hz() const { return (z1 - z0) / (nz - 1); }
};

struct SolveOptions {
    double tol = 1e-10;          // max nodal update at exit
    double residual_tol = 1e-6;  // complementarity residual at exit
    double omega = 1.7;
    bool auto_omega = false;
    long max_sweeps = 1000000;
    nlohmann::json boundary = nlohmann::json::object(); // descriptor, stored as given
};

struct SolveStats {
    long sweeps = 0;
    double final_update = 0.0;
    double residual = 0.0;
    double omega = 0.0; // relaxation factor at exit
    std::vector<std::pair<long, double>> history; // (sweep, max update)
};

struct GridSolution {
    int dim = 0;
    GridMode mode = GridMode::Axisymmetric;
    GridSpec grid;
    double tol = 0.0;
    std::vector<double> u; // u[j * nr + i]
    nlohmann::json boundary = nlohmann::json::object();
    SolveStats stats;

    double rho(int i) const { return i * grid.hr(); }
    double z(int j) const { return grid.z0 + j * grid.hz(); }
    double at(int i, int j) const { return u[static_cast<std::size_t>(j) * grid.nr + i]; }
    bool interior(int i, int j) const;
    // discrete Laplacian at an interior node, including the radial term
    double laplacian(int i, int j) const;
    // max over interior nodes of the complementarity defect
    double complementarity_residual() const;

    // bilinear interpolation in (rho, z); domain error outside the grid
    double interpolate(double rho, double z) const;
    // point of R^N (slab grids use x_N only)
    double value(const Vec& x) const;
};

// Dirichlet data as a function of (rho, z).
using BoundaryData = std::function<double(double rho, double z)>;
BoundaryData boundary_from_field(FieldPtr f);

GridSolution solve_obstacle(int N, const BoundaryData& bc, const GridSpec& grid,
                            const SolveOptions& opt = {});
// One-dimensional solve of u'' = chi_{u>0} on [z0, z1].
GridSolution solve_slab(const std::function<double(double)>& bc, double z0, double z1, int nz,
                        const SolveOptions& opt = {});

struct CoincidenceMask {
    int nr = 0, nz = 0;
    double eps = 0.0;
    std::vector<std::uint8_t> mask; // mask[j * nr + i]
    long count = 0;
    // per row z_j the mask is one contiguous run in rho starting at the axis
    bool columns_contiguous = true;
    std::vector<int> noncontiguous_rows;

    bool at(int i, int j) const { return mask[static_cast<std::size_t>(j) * nr + i] != 0; }
};

// nodes with u <= eps; eps < 0 selects the default 10 * tol
CoincidenceMask coincidence_mask(const GridSolution& sol, double eps = -1.0);

FieldPtr grid_field(std::shared_ptr<const GridSolution> sol);
// u_r(x) = u(r x) / r^2
FieldPtr rescale(FieldPtr u, double r);
FieldPtr rescale(std::shared_ptr<const GridSolution> sol, double r);

struct BlowdownEstimate {
    std::vector<double> radii;
    std::vector<Mat> Q;              // fitted x'-quadratic per radius
    std::vector<double> residual;    // weighted RMS misfit on the sphere
    std::vector<double> trace;
    bool isotropic = false;
    bool trace_ok = false;           // last radius within 5% of 1/2

    Vec coefficients(std::size_t k) const { return Q[k].diagonal(); }
};

BlowdownEstimate blowdown_estimate(FieldPtr u, const std::vector<double>& radii, int nodes = 6);
BlowdownEstimate blowdown_estimate(std::shared_ptr<const GridSolution> sol,
                                   const std::vector<double>& radii, int nodes = 6);

} // namespace obstlab

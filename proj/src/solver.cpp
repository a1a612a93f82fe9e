#include "obstlab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "obstlab/error.hpp"
#include "obstlab/quadrature.hpp"
#include "obstlab/sphere.hpp"

namespace obstlab {

namespace {

// Conservative radial stencil: fluxes through rho_{i+-1/2}, normalized by
// the cell volume, so it is exact for quadratics and an M-matrix.
struct Stencil {
    std::vector<double> cE, cW;
    double cz = 0.0;

    Stencil(int N, const GridSpec& g, GridMode mode)
    {
        cE.assign(g.nr, 0.0);
        cW.assign(g.nr, 0.0);
        cz = 1.0 / (g.hz() * g.hz());
        if (mode == GridMode::Slab) return;
        const double h = g.hr();
        for (int i = 0; i < g.nr; ++i) {
            const double rp = (i + 0.5) * h, rm = std::max(0.0, (i - 0.5) * h);
            const double vol = std::pow(rp, N - 1) - std::pow(rm, N - 1);
            cE[i] = (N - 1) * std::pow(rp, N - 2) / (vol * h);
            cW[i] = i == 0 ? 0.0 : (N - 1) * std::pow(rm, N - 2) / (vol * h);
        }
    }
};

double apply(const GridSolution& s, const Stencil& st, int i, int j)
{
    const int nr = s.grid.nr;
    const double* u = s.u.data() + static_cast<std::size_t>(j) * nr;
    double v = st.cz * (u[i + nr] + u[i - nr] - 2.0 * u[i]);
    if (s.mode == GridMode::Axisymmetric) {
        v += st.cE[i] * (u[i + 1] - u[i]);
        if (i > 0) v += st.cW[i] * (u[i - 1] - u[i]);
    }
    return v;
}

double auto_omega(const GridSpec& g, GridMode mode)
{
    const double Lz = g.z1 - g.z0, hz = g.hz();
    double mu;
    if (mode == GridMode::Slab) {
        mu = std::cos(M_PI * hz / Lz);
    } else {
        const double hr = g.hr();
        const double wr = 1.0 / (hr * hr), wz = 1.0 / (hz * hz);
        mu = (wr * std::cos(M_PI * hr / (2.0 * g.R)) + wz * std::cos(M_PI * hz / Lz)) / (wr + wz);
    }
    return std::min(1.95, 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - mu * mu))));
}

GridSolution run(int N, GridMode mode, const BoundaryData& bc, const GridSpec& g,
                 const SolveOptions& opt)
{
    if (N < 3) throw Error(ErrorKind::UnsupportedDimension, "solver needs N >= 3", {{"N", N}});
    if (!(opt.tol > 0) || !(opt.residual_tol > 0))
        throw Error(ErrorKind::InvalidInput, "solver tolerances must be positive");
    if (g.nz < 3 || (mode == GridMode::Axisymmetric && g.nr < 3) || !(g.z1 > g.z0) ||
        (mode == GridMode::Axisymmetric && !(g.R > 0)))
        throw Error(ErrorKind::InvalidInput, "degenerate grid",
                    {{"nr", g.nr}, {"nz", g.nz}, {"R", g.R}, {"z0", g.z0}, {"z1", g.z1}});

    GridSolution s;
    s.dim = N;
    s.mode = mode;
    s.grid = g;
    s.tol = opt.tol;
    s.boundary = opt.boundary;
    s.u.assign(static_cast<std::size_t>(g.nr) * g.nz, 0.0);

    auto set_bc = [&](int i, int j) {
        const double v = bc(s.rho(i), s.z(j));
        if (!std::isfinite(v) || v < -1e-9)
            throw Error(ErrorKind::Precondition, "boundary data must be nonnegative",
                        {{"rho", s.rho(i)}, {"z", s.z(j)}, {"value", v}});
        s.u[static_cast<std::size_t>(j) * g.nr + i] = std::max(0.0, v);
    };
    for (int i = 0; i < g.nr; ++i) {
        set_bc(i, 0);
        set_bc(i, g.nz - 1);
    }
    if (mode == GridMode::Axisymmetric)
        for (int j = 1; j < g.nz - 1; ++j) set_bc(g.nr - 1, j);

    const Stencil st(N, g, mode);
    double omega = opt.auto_omega ? auto_omega(g, mode) : opt.omega;
    if (!(omega > 0 && omega < 2))
        throw Error(ErrorKind::InvalidInput, "relaxation factor must lie in (0, 2)", {{"omega", omega}});
    s.stats.omega = omega;

    const int imax = mode == GridMode::Axisymmetric ? g.nr - 1 : 1;
    std::vector<double> row_max(g.nz, 0.0);
    auto sweep_color = [&](int color) {
        parallel_for(g.nz - 2, [&](int jj) {
            const int j = jj + 1;
            double m = row_max[j];
            double* u = s.u.data() + static_cast<std::size_t>(j) * g.nr;
            const double* un = u + g.nr;
            const double* us = u - g.nr;
            for (int i = (j + color) % 2; i < imax; i += 2) {
                double num = st.cz * (un[i] + us[i]) - 1.0, diag = 2.0 * st.cz;
                if (mode == GridMode::Axisymmetric) {
                    num += st.cE[i] * u[i + 1];
                    diag += st.cE[i];
                    if (i > 0) {
                        num += st.cW[i] * u[i - 1];
                        diag += st.cW[i];
                    }
                }
                const double target = num / diag;
                const double nu = std::max(0.0, u[i] + omega * (target - u[i]));
                m = std::max(m, std::abs(nu - u[i]));
                u[i] = nu;
            }
            row_max[j] = m;
        });
    };

    long sweep = 0, best_at = 0;
    double update = 0.0, best = INFINITY;
    while (true) {
        std::fill(row_max.begin(), row_max.end(), 0.0);
        sweep_color(0);
        sweep_color(1);
        ++sweep;
        update = *std::max_element(row_max.begin(), row_max.end());
        // Near omega = 2 the iteration amplifies roundoff; relax toward
        // Gauss-Seidel once the updates stop decreasing.
        if (update < best) {
            best = update;
            best_at = sweep;
        } else if (sweep - best_at > 500 && omega > 1.2) {
            omega = 1.0 + 0.5 * (omega - 1.0);
            s.stats.omega = omega;
            best = update;
            best_at = sweep;
        }
        if (sweep % 100 == 0 || update < opt.tol) {
            s.stats.history.emplace_back(sweep, update);
            if (s.stats.history.size() > 200)
                s.stats.history.erase(s.stats.history.begin());
        }
        if (update < opt.tol) {
            const double res = s.complementarity_residual();
            if (res <= opt.residual_tol) {
                s.stats.residual = res;
                break;
            }
        }
        if (sweep >= opt.max_sweeps) {
            nlohmann::json hist = nlohmann::json::array();
            for (auto& [k, v] : s.stats.history) hist.push_back({k, v});
            throw Error(ErrorKind::IterationBudget, "projected SOR did not converge within the sweep budget",
                        {{"sweeps", sweep},
                         {"update", update},
                         {"residual", s.complementarity_residual()},
                         {"history", hist}});
        }
    }
    s.stats.sweeps = sweep;
    s.stats.final_update = update;
    return s;
}

} // namespace

GridSpec GridSpec::from_spacing(double R, double z0, double z1, double h)
{
    if (!(h > 0)) throw Error(ErrorKind::InvalidInput, "grid spacing must be positive");
    GridSpec g;
    g.R = R;
    g.z0 = z0;
    g.z1 = z1;
    g.nr = static_cast<int>(std::lround(R / h)) + 1;
    g.nz = static_cast<int>(std::lround((z1 - z0) / h)) + 1;
    return g;
}

bool GridSolution::interior(int i, int j) const
{
    if (j <= 0 || j >= grid.nz - 1) return false;
    return mode == GridMode::Slab ? i == 0 : (i >= 0 && i < grid.nr - 1);
}

double GridSolution::laplacian(int i, int j) const
{
    if (!interior(i, j)) throw Error(ErrorKind::Domain, "laplacian at a boundary node", {{"i", i}, {"j", j}});
    const Stencil st(dim, grid, mode);
    return apply(*this, st, i, j);
}

double GridSolution::complementarity_residual() const
{
    const Stencil st(dim, grid, mode);
    const int imax = mode == GridMode::Axisymmetric ? grid.nr - 1 : 1;
    double r = 0.0;
    for (int j = 1; j < grid.nz - 1; ++j)
        for (int i = 0; i < imax; ++i) {
            const double L = apply(*this, st, i, j) - 1.0;
            r = std::max(r, at(i, j) > 0.0 ? std::abs(L) : std::max(0.0, L));
        }
    return r;
}

double GridSolution::interpolate(double rho, double zz) const
{
    const double hz = grid.hz();
    const double eps = 1e-12 * std::max(1.0, std::abs(grid.z1) + std::abs(grid.z0));
    if (!(zz >= grid.z0 - eps && zz <= grid.z1 + eps) ||
        (mode == GridMode::Axisymmetric && !(rho >= 0 && rho <= grid.R * (1 + 1e-12))))
        throw Error(ErrorKind::Domain, "evaluation outside the solved domain",
                    {{"rho", rho}, {"z", zz}, {"R", grid.R}, {"z0", grid.z0}, {"z1", grid.z1}});
    const double tz = std::clamp((zz - grid.z0) / hz, 0.0, grid.nz - 1.0);
    const int j = std::min(static_cast<int>(tz), grid.nz - 2);
    const double fz = tz - j;
    if (mode == GridMode::Slab) return (1 - fz) * at(0, j) + fz * at(0, j + 1);
    const double tr = std::clamp(rho / grid.hr(), 0.0, grid.nr - 1.0);
    const int i = std::min(static_cast<int>(tr), grid.nr - 2);
    const double fr = tr - i;
    return (1 - fr) * (1 - fz) * at(i, j) + fr * (1 - fz) * at(i + 1, j) + (1 - fr) * fz * at(i, j + 1) +
           fr * fz * at(i + 1, j + 1);
}

double GridSolution::value(const Vec& x) const
{
    if (x.size() != dim) throw Error(ErrorKind::InvalidInput, "point dimension mismatch");
    return interpolate(x.head(dim - 1).norm(), x(dim - 1));
}

BoundaryData boundary_from_field(FieldPtr f)
{
    return [f](double rho, double z) {
        Vec x = Vec::Zero(f->dim());
        x(0) = rho;
        x(f->dim() - 1) = z;
        return f->value(x);
    };
}

GridSolution solve_obstacle(int N, const BoundaryData& bc, const GridSpec& grid, const SolveOptions& opt)
{
    return run(N, GridMode::Axisymmetric, bc, grid, opt);
}

GridSolution solve_slab(const std::function<double(double)>& bc, double z0, double z1, int nz,
                        const SolveOptions& opt)
{
    GridSpec g;
    g.R = 0.0;
    g.nr = 1;
    g.z0 = z0;
    g.z1 = z1;
    g.nz = nz;
    return run(3, GridMode::Slab, [&](double, double z) { return bc(z); }, g, opt);
}

CoincidenceMask coincidence_mask(const GridSolution& sol, double eps)
{
    if (eps < 0) eps = 10.0 * sol.tol;
    CoincidenceMask m;
    m.nr = sol.grid.nr;
    m.nz = sol.grid.nz;
    m.eps = eps;
    m.mask.resize(sol.u.size());
    for (std::size_t k = 0; k < sol.u.size(); ++k) {
        m.mask[k] = sol.u[k] <= eps;
        m.count += m.mask[k];
    }
    for (int j = 0; j < m.nz; ++j) {
        int runs = 0;
        bool prev = false;
        for (int i = 0; i < m.nr; ++i) {
            const bool c = m.at(i, j);
            if (c && !prev) ++runs;
            prev = c;
        }
        if (runs > 1 || (runs == 1 && !m.at(0, j))) {
            m.columns_contiguous = false;
            m.noncontiguous_rows.push_back(j);
        }
    }
    return m;
}

namespace {

class GridField final : public Field {
public:
    explicit GridField(std::shared_ptr<const GridSolution> s) : s_(std::move(s)) {}
    int dim() const override { return s_->dim; }
    double value(const Vec& x) const override { return s_->value(x); }
    Vec gradient(const Vec& x) const override
    {
        const double h = s_->grid.hz();
        Vec g(x.size()), y = x;
        for (int i = 0; i < x.size(); ++i) {
            y(i) = x(i) + h;
            const double fp = s_->value(y);
            y(i) = x(i) - h;
            const double fm = s_->value(y);
            y(i) = x(i);
            g(i) = (fp - fm) / (2 * h);
        }
        return g;
    }
    bool axisymmetric() const override { return true; }
    std::string gradient_source() const override { return "finite-difference"; }

private:
    std::shared_ptr<const GridSolution> s_;
};

class ScaledField final : public Field {
public:
    ScaledField(FieldPtr f, double r) : f_(std::move(f)), r_(r) {}
    int dim() const override { return f_->dim(); }
    double value(const Vec& x) const override { return f_->value(r_ * x) / (r_ * r_); }
    Vec gradient(const Vec& x) const override { return f_->gradient(r_ * x) / r_; }
    Mat hessian(const Vec& x) const override { return f_->hessian(r_ * x); }
    std::vector<double> polar_breaks(const Vec& c, double t, const Vec& w) const override
    {
        return f_->polar_breaks(r_ * c, r_ * t, w);
    }
    std::vector<double> radial_breaks(const Vec& c) const override
    {
        auto b = f_->radial_breaks(r_ * c);
        for (double& t : b) t /= r_;
        return b;
    }
    bool axisymmetric() const override { return f_->axisymmetric(); }
    std::string gradient_source() const override { return f_->gradient_source(); }

private:
    FieldPtr f_;
    double r_;
};

} // namespace

FieldPtr grid_field(std::shared_ptr<const GridSolution> sol)
{
    return std::make_shared<GridField>(std::move(sol));
}

FieldPtr rescale(FieldPtr u, double r)
{
    if (!(r > 0)) throw Error(ErrorKind::InvalidInput, "rescale needs r > 0", {{"r", r}});
    return std::make_shared<ScaledField>(std::move(u), r);
}

FieldPtr rescale(std::shared_ptr<const GridSolution> sol, double r)
{
    return rescale(grid_field(std::move(sol)), r);
}

BlowdownEstimate blowdown_estimate(FieldPtr u, const std::vector<double>& radii, int nodes)
{
    const int N = u->dim();
    const int n = N - 1;
    BlowdownEstimate est;
    est.radii = radii;
    est.isotropic = u->axisymmetric();

    // sample points on S^{N-1} with quadrature weights
    std::vector<Vec> pts;
    std::vector<double> wts;
    if (est.isotropic) {
        const auto& g = quad::gauss_legendre(4 * nodes, 0.0, M_PI);
        for (std::size_t k = 0; k < g.x.size(); ++k) {
            Vec x = Vec::Zero(N);
            x(0) = std::sin(g.x[k]);
            x(n) = std::cos(g.x[k]);
            pts.push_back(x);
            wts.push_back(g.w[k] * std::pow(std::sin(g.x[k]), N - 2));
        }
    } else {
        const SphereRule rule = sphere_rule(N, uniform_counts(N, nodes));
        pts = rule.nodes;
        wts = rule.weights;
    }

    // basis: |x'|^2 (isotropic) or x_i x_j, i <= j < N
    std::vector<std::pair<int, int>> pairs;
    if (!est.isotropic)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
    const int m = est.isotropic ? 1 : static_cast<int>(pairs.size());
    if (static_cast<int>(pts.size()) < 3 * m)
        throw Error(ErrorKind::Precondition, "blow-down fit is underdetermined",
                    {{"samples", pts.size()}, {"basis", m}});

    Mat B(pts.size(), m);
    Vec sw(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        sw(k) = std::sqrt(wts[k]);
        if (est.isotropic) {
            B(k, 0) = pts[k].head(n).squaredNorm();
        } else {
            for (int c = 0; c < m; ++c) B(k, c) = pts[k](pairs[c].first) * pts[k](pairs[c].second);
        }
    }
    const Mat Bw = sw.asDiagonal() * B;
    const Eigen::ColPivHouseholderQR<Mat> qr(Bw);
    if (qr.rank() < m)
        throw Error(ErrorKind::Precondition, "blow-down fit is rank deficient", {{"rank", qr.rank()}});
    const double area = unit_sphere_area(N);

    for (double r : radii) {
        Vec y(pts.size());
        parallel_for(static_cast<int>(pts.size()), [&](int k) { y(k) = u->value(r * pts[k]) / (r * r); });
        const Vec c = qr.solve(sw.asDiagonal() * y);
        Mat Q = Mat::Zero(n, n);
        if (est.isotropic) {
            Q.diagonal().setConstant(c(0));
        } else {
            for (int k = 0; k < m; ++k) {
                auto [i, j] = pairs[k];
                if (i == j) Q(i, i) = c(k);
                else Q(i, j) = Q(j, i) = 0.5 * c(k);
            }
        }
        const Vec res = Bw * c - sw.asDiagonal() * y;
        est.Q.push_back(Q);
        est.residual.push_back(std::sqrt(res.squaredNorm() / area));
        est.trace.push_back(Q.trace());
    }
    est.trace_ok = !est.trace.empty() && std::abs(est.trace.back() - 0.5) <= 0.025;
    return est;
}

BlowdownEstimate blowdown_estimate(std::shared_ptr<const GridSolution> sol, const std::vector<double>& radii,
                                   int nodes)
{
    return blowdown_estimate(grid_field(std::move(sol)), radii, nodes);
}

} // namespace obstlab

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace obstlab::quad {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// n-point Gauss-Legendre rule on [a, b] (Golub-Welsch).
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);
// on [-1, 1] with weight (1 - x^2)^{lambda - 1/2}, lambda > 0
Rule gauss_gegenbauer(int n, double lambda);

constexpr int kMaxComponents = 24;

struct VecResult {
    std::array<double, kMaxComponents> value{};
    std::array<double, kMaxComponents> error{};
    int intervals = 0;
    bool converged = false;
};

namespace detail {

inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b;
    std::array<double, kMaxComponents> k, e;
};

template <class F>
void gk15(F& f, int m, double a, double b, Segment& s)
{
    const double c = 0.5 * (a + b), hl = 0.5 * (b - a);
    double buf1[kMaxComponents], buf2[kMaxComponents];
    std::array<double, kMaxComponents> g{};
    s.a = a;
    s.b = b;
    f(c, buf1);
    for (int i = 0; i < m; ++i) {
        s.k[i] = wgk[7] * buf1[i];
        g[i] = wg[3] * buf1[i];
    }
    for (int j = 0; j < 7; ++j) {
        const double dx = hl * xgk[j];
        f(c - dx, buf1);
        f(c + dx, buf2);
        for (int i = 0; i < m; ++i) {
            const double sum = buf1[i] + buf2[i];
            s.k[i] += wgk[j] * sum;
            if (j % 2 == 1) g[i] += wg[j / 2] * sum;
        }
    }
    for (int i = 0; i < m; ++i) {
        s.k[i] *= hl;
        s.e[i] = std::abs(s.k[i] - g[i] * hl);
    }
}

} // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) for m integrands sharing one
// subdivision. f(t, out) fills out[0..m). Component i is accepted once
// err_i <= max(rel_tol |I_i|, abs_tol[i]).
// Breakpoints (sorted, inside (a, b)) seed the initial partition so that
// narrow features the first panel cannot see are still resolved.
template <class F>
VecResult integrate(F&& f, int m, double a, double b, double rel_tol, const double* abs_tol,
                    int max_intervals = 400, const std::vector<double>& breaks = {})
{
    std::vector<detail::Segment> segs;
    segs.reserve(64);
    double lo = a;
    for (double p : breaks) {
        if (!(p > lo && p < b)) continue;
        segs.emplace_back();
        detail::gk15(f, m, lo, p, segs.back());
        lo = p;
    }
    segs.emplace_back();
    detail::gk15(f, m, lo, b, segs.back());
    VecResult r;
    for (;;) {
        r.value.fill(0.0);
        r.error.fill(0.0);
        for (const auto& s : segs)
            for (int i = 0; i < m; ++i) {
                r.value[i] += s.k[i];
                r.error[i] += s.e[i];
            }
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            const double lim = std::max(rel_tol * std::abs(r.value[i]), abs_tol ? abs_tol[i] : 0.0);
            worst = std::max(worst, lim > 0.0 ? r.error[i] / lim : (r.error[i] > 0.0 ? 1e300 : 0.0));
        }
        r.intervals = static_cast<int>(segs.size());
        if (worst <= 1.0) {
            r.converged = true;
            return r;
        }
        if (static_cast<int>(segs.size()) >= max_intervals) return r;
        // split the segment with the largest scaled error
        std::size_t pick = 0;
        double best = -1.0;
        for (std::size_t s = 0; s < segs.size(); ++s) {
            double score = 0.0;
            for (int i = 0; i < m; ++i) {
                const double lim =
                    std::max(rel_tol * std::abs(r.value[i]), abs_tol ? abs_tol[i] : 0.0);
                score = std::max(score, lim > 0.0 ? segs[s].e[i] / lim : segs[s].e[i]);
            }
            if (score > best) {
                best = score;
                pick = s;
            }
        }
        const double lo = segs[pick].a, hi = segs[pick].b, mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) return r;
        detail::gk15(f, m, lo, mid, segs[pick]);
        segs.emplace_back();
        detail::gk15(f, m, mid, hi, segs.back());
    }
}

} // namespace obstlab::quad

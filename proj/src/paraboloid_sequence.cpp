#include <cmath>
#include <map>
#include <mutex>
#include <random>

#include "obstlab/construct.hpp"
#include "obstlab/error.hpp"

namespace obstlab {

namespace {

struct SequenceCache {
    std::mutex mu;
    std::map<std::vector<double>, std::vector<EllipsoidSequenceTerm>> terms;
};

SequenceCache& cache()
{
    static SequenceCache c;
    return c;
}

// Terms for the paraboloid M with the same (b', b_N) and zero constant.
std::vector<EllipsoidSequenceTerm> terms_for(const BlowdownData& b)
{
    std::vector<double> key(b.b.data(), b.b.data() + b.b.size());
    key.push_back(b.bN);
    {
        std::lock_guard<std::mutex> lock(cache().mu);
        auto it = cache().terms.find(key);
        if (it != cache().terms.end()) return it->second;
    }
    std::vector<EllipsoidSequenceTerm> out;
    for (int n : sequence_schedule(b)) out.push_back(ellipsoid_sequence_term(b, n, 4));
    std::lock_guard<std::mutex> lock(cache().mu);
    cache().terms.emplace(key, out);
    return out;
}

bool nested(const Ellipsoid& inner, const Ellipsoid& outer)
{
    const int N = inner.dim();
    std::mt19937_64 rng(0x7e57ULL);
    std::normal_distribution<double> normal;
    for (int k = 0; k < 2 * N + 64; ++k) {
        Vec w = Vec::Zero(N);
        if (k < 2 * N) w(k / 2) = (k % 2) ? -1.0 : 1.0;
        else
            for (int i = 0; i < N; ++i) w(i) = normal(rng);
        w.normalize();
        const Vec x = inner.center() + (inner.semiaxes().array() * w.array()).matrix();
        if (outer.level(x) > 1.0 + 1e-12) return false;
    }
    return true;
}

} // namespace

PotentialValue paraboloid_potential(const Paraboloid& P, const Vec& x, double tol)
{
    if (P.dim() < 6)
        throw Error(ErrorKind::UnsupportedDimension, "paraboloid potential needs N >= 6", {{"N", P.dim()}});
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tol must be positive");
    if (x.size() != P.dim() || !x.allFinite()) throw Error(ErrorKind::InvalidInput, "bad evaluation point");
    BlowdownData b = blowdown_of(P);
    b.b *= 0.5 / b.b.sum(); // remove quadrature round-off from the trace
    const double vertexM = -b.bN1 / b.bN + P.vertex_shift();
    b.bN1 = 0.0;
    // P = M + t e^N, so V_P(x) = V_M(x - t e^N)
    const double t = vertexM - P.vertex_shift();
    Vec y = x;
    y(P.dim() - 1) -= t;

    const auto terms = terms_for(b);
    PotentialValue out;
    out.method = method_name(PotentialMethod::SequenceExtrapolation);
    // Values at exterior points converge like n^{5-N}, so the extrapolation
    // is polynomial in 1/n rather than 1/n^2.
    constexpr int levels = 3;
    std::vector<int> ns;
    std::vector<double> v, r;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        ns.push_back(terms[k].n);
        v.push_back(ellipsoid_potential(terms[k].E, y));
        if (k > 0) {
            if (v[k] < v[k - 1]) out.from_below = false;
            if (!nested(terms[k - 1].E, terms[k].E)) out.nested = false;
        }
        if (static_cast<int>(k) >= levels) r.push_back(richardson_limit(ns, v, levels));
        if (r.size() >= 2) {
            out.bracket = std::abs(r.back() - r[r.size() - 2]);
            if (out.bracket < tol) {
                out.value = r.back();
                out.n_terms = static_cast<int>(k + 1);
                return out;
            }
        }
    }
    throw Error(ErrorKind::ToleranceNotMet, "sequence extrapolation did not reach tolerance",
                {{"last_bracket", out.bracket}, {"tol", tol}, {"last_value", r.empty() ? 0.0 : r.back()}});
}

} // namespace obstlab

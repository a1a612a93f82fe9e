#pragma once

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace obstlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Volume of the unit ball in R^n.
double unit_ball_volume(int n);
// Surface measure of the unit sphere S^{n-1} in R^n.
double unit_sphere_area(int n);
// alpha_N = 1 / (N (N-2) |B_1|)
double newton_constant(int N);

// Threads requested through OBSTLAB_THREADS (default 1).
int thread_count();

// f(i) for i in [0, n), strided over thread_count() workers. Callers write
// into per-index slots so results do not depend on the thread count.
template <class F>
void parallel_for(int n, F&& f)
{
    const int T = std::min(thread_count(), n);
    if (T <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::exception_ptr> failed(T);
    {
        std::vector<std::jthread> pool;
        pool.reserve(T);
        for (int t = 0; t < T; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (int i = t; i < n; i += T) f(i);
                } catch (...) {
                    failed[t] = std::current_exception();
                }
            });
    }
    for (auto& e : failed)
        if (e) std::rethrow_exception(e);
}

} // namespace obstlab

#include "obstlab/types.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace obstlab {

double unit_ball_volume(int n)
{
    return std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

double unit_sphere_area(int n)
{
    return n * unit_ball_volume(n);
}

double newton_constant(int N)
{
    return 1.0 / (N * (N - 2) * unit_ball_volume(N));
}

int thread_count()
{
    const char* env = std::getenv("OBSTLAB_THREADS");
    if (!env) return 1;
    try {
        int n = std::stoi(env);
        return n > 0 ? n : 1;
    } catch (...) {
        return 1;
    }
}

} // namespace obstlab

#include "obstlab/presets.hpp"

#include "obstlab/error.hpp"

namespace obstlab::presets {

BlowdownData blowdown(const std::string& name, int N)
{
    if (name == "isotropic") return BlowdownData::isotropic(N, 1.0, 0.0);
    if (name == "anisotropic") {
        if (N != 6)
            throw Error(ErrorKind::InvalidInput, "the anisotropic preset is defined for N = 6", {{"N", N}});
        BlowdownData b;
        b.dim = 6;
        b.b = (Vec(5) << 0.05, 0.05, 0.1, 0.1, 0.2).finished();
        b.bN = 1.0;
        b.bN1 = 0.0;
        b.validate();
        return b;
    }
    throw Error(ErrorKind::InvalidInput, "unknown preset", {{"preset", name}});
}

std::vector<std::string> blowdown_names()
{
    return {"isotropic", "anisotropic"};
}

GridSpec solve_box(const Paraboloid& P, double h, double shift)
{
    const double v = -P.vertex_shift() - shift;
    return GridSpec::from_spacing(2.0, v - 2.0, v + 2.0, h);
}

std::vector<Bump> hele_shaw_bumps(const Paraboloid& P)
{
    const double v = -P.vertex_shift();
    return {{0.0, v, 0.5, 0.8, 0.6},
            {0.0, v + 0.3, 0.5, 0.8, 0.6},
            {0.2, v - 0.2, 0.4, 1.0, 0.5},
            {-0.3, v + 0.1, 0.6, 1.2, 0.8},
            {0.5, v + 0.6, 0.3, 1.5, 0.7}};
}

} // namespace obstlab::presets

#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "obstlab/error.hpp"
#include "obstlab/io.hpp"
#include "obstlab/solver.hpp"

using namespace obstlab;
using io::json;

TEST_CASE("numbers round-trip through the shortest representation")
{
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 6.02214076e23, -2.5})
        CHECK(std::stod(io::format_number(v)) == v);
    CHECK(io::format_number(0.125) == "0.125");
}

TEST_CASE("CSV headers carry unit and tolerance")
{
    io::CsvTable t({{"r", "length"}, {"F1", "energy", 1e-9}});
    t.row({1.0, -0.5});
    std::ostringstream os;
    t.write(os);
    CHECK(os.str() == "r[length;tol=0],F1[energy;tol=1e-09]\n1,-0.5\n");
    CHECK_THROWS_AS(t.row({1.0}), Error);
}

TEST_CASE("body parsing reports the failing path")
{
    const auto B = io::body_from_json(json::parse(R"({"kind":"ball","center":[0,0,0],"radius":2})"));
    CHECK(std::get<Ellipsoid>(B).semiaxes()(1) == 2.0);
    try {
        io::body_from_json(json::parse(R"({"kind":"ellipsoid","semiaxes":[1,"x",2]})"));
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.details().value("path", "") == "/semiaxes/1");
    }
    CHECK_THROWS_AS(io::body_from_json(json::parse(R"({"kind":"cube"})")), Error);
    const auto P = io::body_from_json(io::to_json(Body(Paraboloid(Vec::Ones(5), 2.0))));
    CHECK(std::get<Paraboloid>(P).vertex_shift() == 2.0);
}

TEST_CASE("blow-down parsing")
{
    const BlowdownData b = io::blowdown_from_json(json::parse(R"({"b":[0.1,0.1,0.1,0.1,0.1],"bN":1})"));
    CHECK(b.dim == 6);
    CHECK_THROWS_AS(io::blowdown_from_json(json::parse(R"({"b":[0.2,0.1,0.1,0.1,0.1],"bN":1})")), Error);
}

TEST_CASE("grid files round-trip")
{
    const GridSolution s = solve_obstacle(6, [](double rho, double z) { return 1.0 + rho * rho + z * z; },
                                          GridSpec::from_spacing(1, -1, 1, 0.125));
    const auto dir = std::filesystem::temp_directory_path() / "obstlab_io_test";
    std::filesystem::create_directories(dir);
    io::write_grid(s, (dir / "g").string());
    const GridSolution r = io::read_grid((dir / "g").string());
    CHECK(r.u == s.u);
    CHECK(r.grid.nr == s.grid.nr);
    CHECK(r.dim == 6);
    std::filesystem::remove_all(dir);
}

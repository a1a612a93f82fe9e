#include "obstlab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

#include "obstlab/error.hpp"

namespace obstlab::io {

namespace {

json vec(const Vec& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json number(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

Vec read_vec(const json& j, const std::string& path)
{
    if (!j.is_array() || j.empty())
        throw Error(ErrorKind::InvalidInput, "expected a nonempty number array", {{"path", path}});
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw Error(ErrorKind::InvalidInput, "expected a number", {{"path", path + "/" + std::to_string(i)}});
        v(i) = j[i].get<double>();
    }
    return v;
}

const json& field(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key))
        throw Error(ErrorKind::InvalidInput, "missing field", {{"path", path + "/" + key}});
    return j.at(key);
}

double read_num(const json& j, const std::string& key, const std::string& path)
{
    const json& v = field(j, key, path);
    if (!v.is_number()) throw Error(ErrorKind::InvalidInput, "expected a number", {{"path", path + "/" + key}});
    return v.get<double>();
}

int read_dim(const json& j, int fallback, const std::string& path)
{
    if (!j.contains("dim")) return fallback;
    const json& v = j.at("dim");
    if (!v.is_number_integer()) throw Error(ErrorKind::InvalidInput, "dim must be an integer", {{"path", path + "/dim"}});
    return v.get<int>();
}

} // namespace

json to_json(const Ellipsoid& E)
{
    return {{"kind", "ellipsoid"}, {"dim", E.dim()}, {"semiaxes", vec(E.semiaxes())}, {"center", vec(E.center())},
            {"degenerate", E.degenerate()}};
}

json to_json(const Paraboloid& P)
{
    return {{"kind", "paraboloid"},
            {"dim", P.dim()},
            {"sectional_semiaxes", vec(P.sectional_semiaxes())},
            {"vertex_shift", P.vertex_shift()},
            {"axis", P.dim()},
            {"gamma", P.enclosing_gamma()}};
}

json to_json(const EnvelopeSet& S)
{
    json j = {{"kind", "envelope"}, {"dim", S.dim()}, {"shift", S.shift()}};
    if (S.kind() == EnvelopeKind::Growth) {
        j["envelope"] = "growth";
        j["delta"] = S.delta();
    } else {
        j["envelope"] = "widened";
        j["gamma"] = S.gamma();
        j["mu"] = S.mu();
    }
    return j;
}

json to_json(const Body& B)
{
    return std::visit([](const auto& b) { return to_json(b); }, B);
}

json to_json(const BlowdownData& b)
{
    return {{"dim", b.dim}, {"b", vec(b.b)}, {"bN", b.bN}, {"bN1", b.bN1}, {"c_p", b.c_p()}};
}

json to_json(const PotentialValue& v)
{
    json j = {{"potential", v.value}, {"method", v.method}};
    if (v.stderr_ >= 0) j["stderr"] = v.stderr_;
    if (v.n_terms > 0) {
        j["n_terms"] = v.n_terms;
        j["bracket"] = v.bracket;
        j["nested"] = v.nested;
        j["from_below"] = v.from_below;
    }
    return j;
}

json to_json(const ConstructionReport& r)
{
    json terms = json::array();
    for (const auto& t : r.terms)
        terms.push_back({{"n", t.n},
                         {"semiaxes", vec(t.E.semiaxes())},
                         {"tau", t.tau},
                         {"axis_ratio", t.axis_ratio()},
                         {"aperture", vec(t.aperture())},
                         {"level_constant", t.level_constant()},
                         {"identity_error", t.identity_error},
                         {"fit_iterations", t.fit_iterations},
                         {"fit_residual", t.fit_residual}});
    return {{"terms", terms},
            {"aperture_extrapolated", vec(r.aperture_extrapolated)},
            {"level_extrapolated", r.level_extrapolated},
            {"semiaxes_extrapolated", vec(r.semiaxes_extrapolated)},
            {"vertex_extrapolated", r.vertex_extrapolated},
            {"extrapolation_gap", r.extrapolation_gap},
            {"cauchy", r.cauchy},
            {"cauchy_ratio", r.cauchy_ratio},
            {"full_sequence_converges", r.full_sequence_converges}};
}

json to_json(const FrequencyReport& r)
{
    json vals = json::array();
    for (const auto& v : r.values)
        vals.push_back({{"r", v.r}, {"F1", v.F1}, {"dirichlet", v.dirichlet}, {"trace", v.trace}, {"error", v.error}});
    return {{"values", vals},
            {"violations", r.violations},
            {"max_violation", r.max_violation},
            {"positive", r.positive},
            {"max_positive", r.max_positive},
            {"gradient_source", r.gradient_source}};
}

json to_json(const ACFValue& a)
{
    return {{"r", a.r}, {"phi", a.phi}, {"I_plus", a.I_plus}, {"I_minus", a.I_minus}, {"error", a.error}};
}

json to_json(const DoublingValue& d)
{
    return {{"r", d.r}, {"f_r", d.f_r}, {"f_2r", d.f_2r}, {"log2_ratio", number(d.log2_ratio)},
            {"degenerate", d.degenerate}};
}

json to_json(const EnvelopeReport& r)
{
    json v = json::array();
    for (const auto& n : r.violations) v.push_back({{"rho", n.rho}, {"height", n.height}, {"i", n.i}, {"j", n.j}});
    return {{"delta", r.delta},
            {"a_est", r.a_est},
            {"violation_count", r.violation_count},
            {"violations", v},
            {"checked", r.checked},
            {"below_max_rho", r.below_max_rho},
            {"below_bounded", r.below_bounded}};
}

json to_json(const DecayTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"k", r.k}, {"edge", r.edge_value}, {"off_axis", r.off_axis}});
    return {{"gamma", t.gamma},
            {"mu", t.mu},
            {"rows", rows},
            {"edge_decreasing", t.edge_decreasing},
            {"off_axis_decreasing", t.off_axis_decreasing}};
}

json to_json(const SubquadraticTable& t)
{
    json rows = json::array();
    for (const auto& r : t.rows) rows.push_back({{"radius", r.radius}, {"max_ratio", r.max_ratio}, {"argmax", vec(r.argmax)}});
    return {{"rows", rows}, {"decreasing", t.decreasing}};
}

json to_json(const ComparisonReport& r)
{
    json rows = json::array();
    for (const auto& c : r.rows)
        rows.push_back({{"lambda", c.lambda},
                        {"max_gap", c.max_gap},
                        {"rho", c.rho},
                        {"z", c.z},
                        {"tested", c.tested},
                        {"regime", c.tested ? "tested" : "untested"},
                        {"pass", c.pass}});
    return {{"lambda_bar", r.lambda_bar},
            {"h", r.h},
            {"tolerance", r.tolerance},
            {"gamma", r.gamma},
            {"mu", r.mu},
            {"rows", rows},
            {"symdiff_fraction", r.symdiff_fraction},
            {"symdiff_ok", r.symdiff_ok},
            {"verdict", r.verdict}};
}

json to_json(const std::vector<HeleShawRow>& rows)
{
    json a = json::array();
    for (const auto& r : rows)
        a.push_back({{"t0", r.bump.t0},
                     {"z0", r.bump.z0},
                     {"st", r.bump.st},
                     {"sr", r.bump.sr},
                     {"sz", r.bump.sz},
                     {"n", r.n},
                     {"coarse", r.coarse},
                     {"fine", r.fine},
                     {"ratio", number(r.ratio)}});
    return a;
}

json grid_metadata(const GridSolution& s)
{
    json hist = json::array();
    for (auto [k, v] : s.stats.history) hist.push_back({k, v});
    return {{"dim", s.dim},
            {"mode", s.mode == GridMode::Axisymmetric ? "axisymmetric" : "slab"},
            {"R", s.grid.R},
            {"z0", s.grid.z0},
            {"z1", s.grid.z1},
            {"nr", s.grid.nr},
            {"nz", s.grid.nz},
            {"h_rho", s.grid.hr()},
            {"h_z", s.grid.hz()},
            {"tol", s.tol},
            {"boundary", s.boundary},
            {"layout", "float64 little-endian, index j * nr + i"},
            {"stats",
             {{"sweeps", s.stats.sweeps},
              {"final_update", s.stats.final_update},
              {"residual", s.stats.residual},
              {"omega", s.stats.omega},
              {"history", hist}}}};
}

Body body_from_json(const json& j)
{
    const std::string kind = field(j, "kind", "").get<std::string>();
    if (kind == "ball") {
        const double R = j.contains("radius") ? read_num(j, "radius", "") : 1.0;
        const int N = read_dim(j, j.contains("center") && j.at("center").is_array() ? int(j.at("center").size()) : 0, "");
        Ellipsoid E = Ellipsoid::ball(N, R);
        if (j.contains("center")) E = Ellipsoid(E.semiaxes(), read_vec(j.at("center"), "/center"));
        return E;
    }
    if (kind == "ellipsoid") {
        const Vec a = read_vec(field(j, "semiaxes", ""), "/semiaxes");
        const Vec c = j.contains("center") ? read_vec(j.at("center"), "/center") : Vec::Zero(a.size());
        if (read_dim(j, static_cast<int>(a.size()), "") != a.size())
            throw Error(ErrorKind::InvalidInput, "dim does not match semiaxes", {{"path", "/dim"}});
        return Ellipsoid(a, c);
    }
    if (kind == "paraboloid") {
        const Vec A = read_vec(field(j, "sectional_semiaxes", ""), "/sectional_semiaxes");
        const double aN = j.contains("vertex_shift") ? read_num(j, "vertex_shift", "") : 0.0;
        if (read_dim(j, static_cast<int>(A.size()) + 1, "") != A.size() + 1)
            throw Error(ErrorKind::InvalidInput, "dim does not match sectional_semiaxes", {{"path", "/dim"}});
        return Paraboloid(A, aN);
    }
    if (kind == "envelope") {
        const int N = read_dim(j, 0, "");
        const std::string e = field(j, "envelope", "").get<std::string>();
        const double shift = j.contains("shift") ? read_num(j, "shift", "") : 0.0;
        if (e == "growth") return EnvelopeSet::growth(N, read_num(j, "delta", ""), shift);
        if (e == "widened")
            return EnvelopeSet::widened(N, read_num(j, "gamma", ""), read_num(j, "mu", ""), shift);
        throw Error(ErrorKind::InvalidInput, "unknown envelope kind", {{"path", "/envelope"}, {"value", e}});
    }
    throw Error(ErrorKind::InvalidInput, "unknown body kind", {{"path", "/kind"}, {"value", kind}});
}

BlowdownData blowdown_from_json(const json& j)
{
    BlowdownData b;
    if (j.contains("isotropic")) {
        const int N = read_dim(j, 0, "");
        b = BlowdownData::isotropic(N, j.contains("bN") ? read_num(j, "bN", "") : 1.0,
                                    j.contains("bN1") ? read_num(j, "bN1", "") : 0.0);
    } else {
        b.b = read_vec(field(j, "b", ""), "/b");
        b.dim = read_dim(j, static_cast<int>(b.b.size()) + 1, "");
        b.bN = read_num(j, "bN", "");
        b.bN1 = j.contains("bN1") ? read_num(j, "bN1", "") : 0.0;
        if (b.dim != b.b.size() + 1)
            throw Error(ErrorKind::InvalidInput, "dim does not match b", {{"path", "/dim"}});
    }
    b.validate();
    return b;
}

std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void CsvTable::row(const std::vector<double>& values)
{
    if (values.size() != cols_.size())
        throw Error(ErrorKind::InvalidInput, "csv row width mismatch", {{"expected", cols_.size()}, {"got", values.size()}});
    rows_.push_back(values);
}

void CsvTable::write(std::ostream& os) const
{
    for (std::size_t c = 0; c < cols_.size(); ++c) {
        if (c) os << ',';
        os << cols_[c].name << '[' << cols_[c].unit << ";tol=" << format_number(cols_[c].tol) << ']';
    }
    os << '\n';
    for (const auto& r : rows_) {
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c) os << ',';
            os << format_number(r[c]);
        }
        os << '\n';
    }
}

void CsvTable::save(const std::string& path) const
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot open output file", {{"path", path}});
    write(f);
}

void write_grid(const GridSolution& s, const std::string& prefix)
{
    {
        std::ofstream f(prefix + ".bin", std::ios::binary);
        if (!f) throw Error(ErrorKind::InvalidInput, "cannot open output file", {{"path", prefix + ".bin"}});
        f.write(reinterpret_cast<const char*>(s.u.data()), static_cast<std::streamsize>(s.u.size() * sizeof(double)));
    }
    std::ofstream f(prefix + ".json", std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot open output file", {{"path", prefix + ".json"}});
    f << grid_metadata(s).dump(2) << '\n';
}

GridSolution read_grid(const std::string& prefix)
{
    std::ifstream m(prefix + ".json");
    if (!m) throw Error(ErrorKind::InvalidInput, "cannot open grid metadata", {{"path", prefix + ".json"}});
    const json j = json::parse(m);
    GridSolution s;
    s.dim = j.at("dim").get<int>();
    s.mode = j.at("mode").get<std::string>() == "slab" ? GridMode::Slab : GridMode::Axisymmetric;
    s.grid.R = j.at("R").get<double>();
    s.grid.z0 = j.at("z0").get<double>();
    s.grid.z1 = j.at("z1").get<double>();
    s.grid.nr = j.at("nr").get<int>();
    s.grid.nz = j.at("nz").get<int>();
    s.tol = j.at("tol").get<double>();
    s.boundary = j.at("boundary");
    const auto& st = j.at("stats");
    s.stats.sweeps = st.at("sweeps").get<long>();
    s.stats.final_update = st.at("final_update").get<double>();
    s.stats.residual = st.at("residual").get<double>();
    s.stats.omega = st.at("omega").get<double>();
    for (const auto& h : st.at("history")) s.stats.history.emplace_back(h[0].get<long>(), h[1].get<double>());
    s.u.resize(static_cast<std::size_t>(s.grid.nr) * s.grid.nz);
    std::ifstream f(prefix + ".bin", std::ios::binary);
    if (!f) throw Error(ErrorKind::InvalidInput, "cannot open grid data", {{"path", prefix + ".bin"}});
    f.read(reinterpret_cast<char*>(s.u.data()), static_cast<std::streamsize>(s.u.size() * sizeof(double)));
    if (f.gcount() != static_cast<std::streamsize>(s.u.size() * sizeof(double)))
        throw Error(ErrorKind::InvalidInput, "grid data truncated", {{"path", prefix + ".bin"}});
    return s;
}

} // namespace obstlab::io

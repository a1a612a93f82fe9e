// obstlab command-line front end
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "obstlab/construct.hpp"
#include "obstlab/diagnostics.hpp"
#include "obstlab/error.hpp"
#include "obstlab/io.hpp"
#include "obstlab/presets.hpp"
#include "obstlab/solver.hpp"

using namespace obstlab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kModule = 3 };

struct UsageError : std::runtime_error {
    std::string path;
    UsageError(const std::string& what, std::string p) : std::runtime_error(what), path(std::move(p)) {}
};

struct RunConfig {
    std::string command;
    int N = 6;
    std::string preset = "isotropic";
    std::optional<json> body;
    std::optional<json> blowdown;
    std::vector<double> at;
    std::string method = "closed-form";
    double tol = 1e-8;
    std::optional<std::uint64_t> seed;
    long samples = 1000000;
    bool monte_carlo = false;
    std::string out;
    std::string suite = "all";
    // grid
    double h = 1.0 / 32;
    std::optional<double> R, z0, z1;
    std::string omega = "auto";
    double shift = 0.0;
    std::string boundary = "paraboloid-solution";
    std::vector<double> poly; // a rho^2 + b z^2 + c z + d
    std::string from;
    bool slices = false;
    // diagnostics
    std::vector<double> radii;
    double speed = 1.0;
    int cells = 8;
};

// ---- config ----------------------------------------------------------------

template <class T>
T get_as(const json& j, const std::string& key, const char* type)
{
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw UsageError(std::string("expected ") + type, "/" + key);
    }
}

void apply_config(RunConfig& c, const json& j)
{
    if (!j.is_object()) throw UsageError("config must be a JSON object", "/");
    static const std::vector<std::string> known = {
        "N", "preset", "body", "blowdown", "at", "method", "tol", "seed", "samples", "monte_carlo", "out", "suite",
        "h", "R", "z0", "z1", "omega", "shift", "boundary", "poly", "from", "slices", "radii", "speed", "cells"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw UsageError("unknown config field", "/" + it.key());
    if (j.contains("N")) c.N = get_as<int>(j, "N", "integer");
    if (j.contains("preset")) c.preset = get_as<std::string>(j, "preset", "string");
    if (j.contains("body")) c.body = j.at("body");
    if (j.contains("blowdown")) c.blowdown = j.at("blowdown");
    if (j.contains("at")) c.at = get_as<std::vector<double>>(j, "at", "number array");
    if (j.contains("method")) c.method = get_as<std::string>(j, "method", "string");
    if (j.contains("tol")) c.tol = get_as<double>(j, "tol", "number");
    if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j, "seed", "unsigned integer");
    if (j.contains("samples")) c.samples = get_as<long>(j, "samples", "integer");
    if (j.contains("monte_carlo")) c.monte_carlo = get_as<bool>(j, "monte_carlo", "boolean");
    if (j.contains("out")) c.out = get_as<std::string>(j, "out", "string");
    if (j.contains("suite")) c.suite = get_as<std::string>(j, "suite", "string");
    if (j.contains("h")) c.h = get_as<double>(j, "h", "number");
    if (j.contains("R")) c.R = get_as<double>(j, "R", "number");
    if (j.contains("z0")) c.z0 = get_as<double>(j, "z0", "number");
    if (j.contains("z1")) c.z1 = get_as<double>(j, "z1", "number");
    if (j.contains("omega")) {
        const json& w = j.at("omega");
        c.omega = w.is_number() ? io::format_number(w.get<double>()) : get_as<std::string>(j, "omega", "number or \"auto\"");
    }
    if (j.contains("shift")) c.shift = get_as<double>(j, "shift", "number");
    if (j.contains("boundary")) c.boundary = get_as<std::string>(j, "boundary", "string");
    if (j.contains("poly")) c.poly = get_as<std::vector<double>>(j, "poly", "number array");
    if (j.contains("from")) c.from = get_as<std::string>(j, "from", "string");
    if (j.contains("slices")) c.slices = get_as<bool>(j, "slices", "boolean");
    if (j.contains("radii")) c.radii = get_as<std::vector<double>>(j, "radii", "number array");
    if (j.contains("speed")) c.speed = get_as<double>(j, "speed", "number");
    if (j.contains("cells")) c.cells = get_as<int>(j, "cells", "integer");
}

json read_json_file(const std::string& path, const std::string& field)
{
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read file " + path, field);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed JSON: ") + e.what(), field);
    }
}

void validate(const RunConfig& c)
{
    if (c.N < 3) throw UsageError("N must be at least 3", "/N");
    if (!(c.tol > 0)) throw UsageError("tolerances must be positive", "/tol");
    if (!(c.h > 0)) throw UsageError("grid spacing must be positive", "/h");
    if (!(c.speed > 0)) throw UsageError("speed must be positive", "/speed");
    if (c.cells < 1) throw UsageError("cells must be positive", "/cells");
    if (c.samples < 1000) throw UsageError("at least 1000 samples are required", "/samples");
    const bool mc = c.monte_carlo || (c.command == "potential" && c.method == "monte-carlo");
    if (mc && !c.seed) throw UsageError("a seed is required when Monte-Carlo sampling is enabled", "/seed");
    if (c.command == "potential") {
        if (c.method != "closed-form" && c.method != "sequence" && c.method != "monte-carlo")
            throw UsageError("method must be closed-form, sequence or monte-carlo", "/method");
        if (c.at.empty()) throw UsageError("an evaluation point is required", "/at");
    }
    if (c.command == "verify") {
        static const std::vector<std::string> suites = {"frequency", "acf", "envelope", "decay",
                                                        "compare", "heleshaw", "all"};
        if (std::find(suites.begin(), suites.end(), c.suite) == suites.end())
            throw UsageError("unknown suite", "/suite");
    }
    if (c.command == "solve") {
        if (c.boundary != "paraboloid-solution" && c.boundary != "polynomial" && c.boundary != "file")
            throw UsageError("boundary must be paraboloid-solution, polynomial or file", "/boundary");
        if (c.boundary == "polynomial" && c.poly.size() != 4)
            throw UsageError("polynomial boundary needs four coefficients a,b,c,d", "/poly");
        if (c.boundary == "file" && c.from.empty()) throw UsageError("file boundary needs a grid prefix", "/from");
    }
    if (c.omega != "auto") {
        double w = 0;
        std::istringstream is(c.omega);
        if (!(is >> w) || !(w > 0 && w < 2)) throw UsageError("omega must be \"auto\" or lie in (0, 2)", "/omega");
    }
}

// ---- output ----------------------------------------------------------------

struct Output {
    std::string dir;
    void table(const std::string& name, const io::CsvTable& t) const
    {
        if (dir.empty()) return;
        t.save((fs::path(dir) / (name + ".csv")).string());
    }
    void document(const std::string& name, const json& j) const
    {
        if (dir.empty()) return;
        std::ofstream f(fs::path(dir) / (name + ".json"), std::ios::binary);
        f << j.dump(2) << '\n';
    }
};

BlowdownData blowdown_of(const RunConfig& c)
{
    if (c.blowdown) {
        try {
            return io::blowdown_from_json(*c.blowdown);
        } catch (const Error& e) {
            throw UsageError(e.what(), "/blowdown" + e.details().value("path", std::string()));
        }
    }
    try {
        return presets::blowdown(c.preset, c.N);
    } catch (const Error& e) {
        throw UsageError(e.what(), "/preset");
    }
}

ParaboloidSolution solution_of(const RunConfig& c, ConstructionReport* rep = nullptr)
{
    ConstructOptions o;
    o.run_sequence = rep != nullptr;
    return construct_paraboloid(blowdown_of(c), o, rep);
}

Vec point_of(const RunConfig& c, int N)
{
    if (static_cast<int>(c.at.size()) != N) throw UsageError("point dimension does not match the body", "/at");
    return Eigen::Map<const Vec>(c.at.data(), N);
}

// ---- subcommands -----------------------------------------------------------

int cmd_potential(const RunConfig& c, const Output& out)
{
    Body body;
    if (c.body) {
        try {
            body = io::body_from_json(*c.body);
        } catch (const Error& e) {
            throw UsageError(e.what(), "/body" + e.details().value("path", std::string()));
        }
    } else if (c.preset == "ball") {
        body = Ellipsoid::ball(c.N, 1.0);
    } else if (c.preset == "ellipsoid") {
        body = Ellipsoid(Vec::LinSpaced(c.N, 1.0, c.N));
    } else {
        body = solution_of(c).paraboloid();
    }
    const Vec x = point_of(c, body_dim(body));
    PotentialValue v;
    if (const auto* E = std::get_if<Ellipsoid>(&body)) {
        if (c.method == "monte-carlo") {
            const Box box{E->center() - E->semiaxes(), E->center() + E->semiaxes()};
            auto ev = PotentialEvaluator::montecarlo([E](const Vec& y) { return E->contains(y); }, box, E->dim(),
                                                     c.samples, *c.seed);
            v = ev.evaluate(x);
        } else {
            v = PotentialEvaluator::ellipsoid(*E).evaluate(x);
        }
    } else if (const auto* P = std::get_if<Paraboloid>(&body)) {
        if (c.method == "monte-carlo") {
            const SlabResult r = paraboloid_montecarlo(*P, x, c.samples, *c.seed, c.tol);
            v.value = r.estimate;
            v.stderr_ = r.stderr_;
            v.method = method_name(PotentialMethod::MonteCarlo);
            json j = io::to_json(v);
            j["tail_bound"] = r.tail_bound;
            j["height"] = r.height;
            std::cout << j.dump() << '\n';
            out.document("potential", j);
            return kOk;
        }
        const auto m = c.method == "sequence" ? PotentialMethod::SequenceExtrapolation : PotentialMethod::ClosedForm;
        v = PotentialEvaluator::paraboloid(*P, m, c.tol).evaluate(x);
    } else {
        throw UsageError("envelope sets have infinite potential", "/body/kind");
    }
    const json j = io::to_json(v);
    std::cout << j.dump() << '\n';
    out.document("potential", j);
    return kOk;
}

int cmd_construct(const RunConfig& c, const Output& out)
{
    ConstructionReport rep;
    const ParaboloidSolution s = solution_of(c, &rep);
    const int N = s.dim();
    std::vector<io::CsvTable::Column> cols{{"n", "1"}};
    for (int j = 0; j < N; ++j) cols.push_back({"B" + std::to_string(j + 1), "length"});
    cols.push_back({"tau_over_BN", "1"});
    cols.push_back({"identity_error", "potential", 1e-6});
    cols.push_back({"fit_residual", "1", 1e-13});
    io::CsvTable t(cols);
    for (const auto& term : rep.terms) {
        std::vector<double> row{double(term.n)};
        for (int j = 0; j < N; ++j) row.push_back(term.E.semiaxes()(j));
        row.push_back(term.axis_ratio());
        row.push_back(term.identity_error);
        row.push_back(term.fit_residual);
        t.row(row);
    }
    out.table("construct_sequence", t);
    const json j = {{"blowdown", io::to_json(s.blowdown())},
                    {"paraboloid", io::to_json(s.paraboloid())},
                    {"c_P", s.c_P()},
                    {"report", io::to_json(rep)}};
    out.document("construct", j);
    std::cout << j.dump(2) << '\n';
    return kOk;
}

int cmd_solve(const RunConfig& c, const Output& out)
{
    SolveOptions o;
    o.auto_omega = c.omega == "auto";
    if (!o.auto_omega) o.omega = std::stod(c.omega);
    BoundaryData bc;
    GridSpec g;
    std::optional<double> vertex; // expected lowest coincidence point on the axis
    std::optional<GridSolution> src;
    if (c.boundary == "paraboloid-solution") {
        const ParaboloidSolution s = solution_of(c);
        if (!s.paraboloid().isotropic()) throw UsageError("the axisymmetric solver needs isotropic data", "/preset");
        const ParaboloidSolution sh = s.shifted(c.shift);
        bc = boundary_from_field(paraboloid_field(sh));
        g = presets::solve_box(s.paraboloid(), c.h, c.shift);
        vertex = -s.paraboloid().vertex_shift() - c.shift;
        o.boundary = {{"source", "paraboloid-solution"}, {"paraboloid", io::to_json(s.paraboloid())}, {"shift", c.shift}};
    } else if (c.boundary == "polynomial") {
        const auto p = c.poly;
        bc = [p](double rho, double z) { return p[0] * rho * rho + p[1] * z * z + p[2] * z + p[3]; };
        g = GridSpec::from_spacing(1.0, -1.0, 1.0, c.h);
        o.boundary = {{"source", "polynomial"}, {"coefficients", p}};
    } else {
        src = io::read_grid(c.from);
        auto shared = std::make_shared<GridSolution>(*src);
        bc = [shared](double rho, double z) { return shared->interpolate(rho, z); };
        g = GridSpec::from_spacing(src->grid.R, src->grid.z0, src->grid.z1, c.h);
        o.boundary = {{"source", "file"}, {"from", c.from}};
    }
    if (c.R) g = GridSpec::from_spacing(*c.R, g.z0, g.z1, c.h);
    if (c.z0 || c.z1) g = GridSpec::from_spacing(g.R, c.z0.value_or(g.z0), c.z1.value_or(g.z1), c.h);
    o.tol = std::min(1e-10, c.tol);
    const GridSolution s = solve_obstacle(c.N, bc, g, o);
    const CoincidenceMask m = coincidence_mask(s);
    json meta = io::grid_metadata(s);
    meta["coincidence"] = {{"eps", m.eps}, {"count", m.count}, {"columns_contiguous", m.columns_contiguous}};
    if (vertex) {
        // normalization of the exact solution: lowest coincident node on the axis sits at the vertex, O(h) on grids
        std::optional<double> low;
        for (int j = 0; j < g.nz && !low; ++j)
            if (m.mask[std::size_t(j) * g.nr]) low = s.z(j);
        meta["coincidence"]["axis_vertex"] = {{"expected", *vertex}, {"observed", low ? json(*low) : json(nullptr)}};
    }
    if (!out.dir.empty()) io::write_grid(s, (fs::path(out.dir) / "grid").string());
    if (c.slices) {
        io::CsvTable axis({{"z", "length"}, {"u_axis", "u", s.tol}});
        for (int j = 0; j < g.nz; ++j) axis.row({s.z(j), s.at(0, j)});
        out.table("slice_axis", axis);
        io::CsvTable mid({{"rho", "length"}, {"u_mid", "u", s.tol}});
        const int jm = g.nz / 2;
        for (int i = 0; i < g.nr; ++i) mid.row({s.rho(i), s.at(i, jm)});
        out.table("slice_mid", mid);
    }
    std::cout << meta.dump(2) << '\n';
    return kOk;
}

io::CsvTable frequency_table(const FrequencyReport& r)
{
    io::CsvTable t({{"r", "length"}, {"F1", "energy"}, {"dirichlet", "energy"}, {"trace", "energy"},
                    {"quad_error", "energy"}});
    for (const auto& v : r.values) t.row({v.r, v.F1, v.dirichlet, v.trace, v.error});
    return t;
}

int cmd_frequency(const RunConfig& c, const Output& out)
{
    const ParaboloidSolution s = solution_of(c);
    const std::vector<double> radii = c.radii.empty() ? std::vector<double>{0.25, 0.5, 1, 2, 4} : c.radii;
    const FrequencyReport r = frequency_report(paraboloid_field(s), blowdown_field(s.blowdown()), radii);
    out.table("frequency", frequency_table(r));
    const json j = io::to_json(r);
    out.document("frequency", j);
    std::cout << j.dump(2) << '\n';
    return r.monotone() && r.nonpositive() ? kOk : kFailed;
}

int cmd_heleshaw(const RunConfig& c, const Output& out)
{
    const ParaboloidSolution s = solution_of(c);
    if (!s.paraboloid().isotropic()) throw UsageError("Hele-Shaw test functions need isotropic data", "/preset");
    const auto rows = hele_shaw_residual(s, c.speed, presets::hele_shaw_bumps(s.paraboloid()), c.cells);
    io::CsvTable t({{"bump", "1"}, {"residual_h", "weak", 0}, {"residual_h2", "weak", 0}, {"ratio", "1", 3}});
    bool ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        t.row({double(k), rows[k].coarse, rows[k].fine, rows[k].ratio});
        ok = ok && rows[k].ratio >= 3.0;
    }
    out.table("heleshaw", t);
    const json j = {{"rows", io::to_json(rows)}, {"pass", ok}};
    out.document("heleshaw", j);
    std::cout << j.dump(2) << '\n';
    return ok ? kOk : kFailed;
}

// ---- verify ----------------------------------------------------------------

struct Verdict {
    json items = json::array();
    bool ok = true;
    void add(const std::string& suite, const std::string& invariant, bool pass, json detail = {})
    {
        items.push_back({{"suite", suite}, {"invariant", invariant}, {"pass", pass}, {"detail", detail}});
        ok = ok && pass;
    }
    void skip(const std::string& suite, const std::string& reason)
    {
        items.push_back({{"suite", suite}, {"invariant", "*"}, {"pass", nullptr}, {"skipped", reason}});
    }
};

void suite_frequency(const ParaboloidSolution& s, Verdict& v, const Output& out)
{
    const FieldPtr u = paraboloid_field(s), p = blowdown_field(s.blowdown());
    const FrequencyReport r = frequency_report(u, p, {0.25, 0.5, 1, 2, 4});
    out.table("frequency", frequency_table(r));
    v.add("frequency", "F1 nondecreasing", r.monotone(), {{"violations", r.violations}});
    v.add("frequency", "F1 <= 0 + tol_quad", r.nonpositive(), {{"positive", r.positive}});

    const int N = s.dim();
    Mat Q = Mat::Zero(N, N);
    Q(0, 0) = 0.3;
    Q(1, 1) = -0.3;
    if (N > 3) Q(0, 2) = Q(2, 0) = 0.2;
    const FrequencyValue a = frequency_F1(u, p, 1.0);
    const FrequencyValue b = frequency_F1(sum_field(u, quadratic_field(Q, Vec::Zero(N), 0.0)), p, 1.0);
    const double diff = std::abs(a.F1 - b.F1);
    v.add("frequency", "F1 invariant under harmonic x'-quadratics", diff <= a.error + b.error + 1e-9,
          {{"difference", diff}});

    io::CsvTable t({{"r", "length"}, {"f_r", "u"}, {"f_2r", "u"}, {"log2_ratio", "1", 0.1}});
    bool ok = true;
    for (double r : {16.0, 32.0}) {
        const DoublingValue d = doubling_f(u, p, r, 4);
        t.row({d.r, d.f_r, d.f_2r, d.log2_ratio});
        ok = ok && !d.degenerate && d.log2_ratio <= 1.1;
    }
    out.table("doubling", t);
    v.add("frequency", "doubling log2 ratio <= 1 + delta at large r", ok);
}

void suite_acf(const ParaboloidSolution& s, Verdict& v, const Output& out)
{
    const int N = s.dim();
    if (!paraboloid_field(s)->axisymmetric()) return v.skip("acf", "quadrature layout assumes isotropic data");
    Vec e = Vec::Zero(N);
    e(0) = 1.0;
    const FieldPtr h = directional_derivative(paraboloid_field(s), e);
    io::CsvTable t({{"r", "length"}, {"phi", "acf"}, {"I_plus", "acf"}, {"I_minus", "acf"}, {"quad_error", "acf"}});
    bool ok = true;
    ACFValue prev;
    for (double r : {0.5, 1.0, 2.0}) {
        const ACFValue a = acf(h, r, Vec::Zero(N), acf_options(N, 0));
        t.row({a.r, a.phi, a.I_plus, a.I_minus, a.error});
        if (prev.r > 0) ok = ok && a.phi >= prev.phi - (a.error + prev.error + 1e-12);
        prev = a;
    }
    out.table("acf", t);
    v.add("acf", "phi nondecreasing in r", ok);
}

void suite_envelope(const ParaboloidSolution& s, double h, Verdict& v, const Output& out)
{
    const Paraboloid& P = s.paraboloid();
    if (!P.isotropic()) return v.skip("envelope", "the axisymmetric solver needs isotropic data");
    const GridSpec g = presets::solve_box(P, h);
    SolveOptions o;
    o.auto_omega = true;
    const GridSolution u = solve_obstacle(s.dim(), boundary_from_field(paraboloid_field(s)), g, o);
    const CoincidenceMask m = coincidence_mask(u);
    const EnvelopeReport r = growth_envelope_check(m, g, 0.1, P.vertex_shift());
    v.add("envelope", "coincidence rows contiguous from the axis", m.columns_contiguous,
          {{"noncontiguous_rows", m.noncontiguous_rows.size()}});

    // algebraic crossover on an exact paraboloid mask |x'|^2 <= gamma^2 y
    const double gamma = 1.1, delta = 0.5;
    const GridSpec sg = GridSpec::from_spacing(3.0, 0.0, 6.0, 1.0 / 32);
    CoincidenceMask pm;
    pm.nr = sg.nr;
    pm.nz = sg.nz;
    pm.mask.resize(std::size_t(sg.nr) * sg.nz);
    for (int j = 0; j < sg.nz; ++j)
        for (int i = 0; i < sg.nr; ++i) {
            const double rho = i * sg.hr(), y = sg.z0 + j * sg.hz();
            pm.mask[std::size_t(j) * sg.nr + i] = rho * rho <= gamma * gamma * y;
        }
    const EnvelopeReport pr = growth_envelope_check(pm, sg, delta);
    const double bound = std::pow(gamma, 2.0 / delta);
    v.add("envelope", "paraboloid mask inside the envelope above gamma^{2/delta}", pr.a_est <= bound,
          {{"a_est", pr.a_est}, {"bound", bound}});

    io::CsvTable t({{"case", "1"}, {"delta", "1"}, {"a_est", "length"}, {"violations", "1"}, {"below_max_rho", "length"}});
    t.row({0, r.delta, r.a_est, double(r.violation_count), r.below_max_rho});
    t.row({1, pr.delta, pr.a_est, double(pr.violation_count), pr.below_max_rho});
    out.table("envelope", t);
}

void suite_decay(const ParaboloidSolution& s, Verdict& v, const Output& out)
{
    const Paraboloid& P = s.paraboloid();
    const DecayTable d = potential_decay_scan(P, P.enclosing_gamma(), 7.0 / 20.0, {1e2, 1e3, 1e4});
    io::CsvTable t({{"k", "length"}, {"V_edge", "potential"}, {"V_off_axis", "potential"}});
    for (const auto& r : d.rows) t.row({r.k, r.edge_value, r.off_axis});
    out.table("decay", t);
    v.add("decay", "V_P outside P^mu strictly decreasing", d.edge_decreasing && d.off_axis_decreasing);

    const SubquadraticTable q = subquadratic_check(PotentialEvaluator::paraboloid(P), {1e2, 1e3, 1e4});
    io::CsvTable tq({{"radius", "length"}, {"max_V_over_r2", "1"}});
    for (const auto& r : q.rows) tq.row({r.radius, r.max_ratio});
    out.table("subquadratic", tq);
    v.add("decay", "V/|x|^2 strictly decreasing", q.decreasing && q.rows.front().max_ratio > 0);
}

void suite_compare(const ParaboloidSolution& s, double h, Verdict& v, const Output& out)
{
    const Paraboloid& P = s.paraboloid();
    if (!P.isotropic()) return v.skip("compare", "the axisymmetric solver needs isotropic data");
    const double Lambda = 0.5;
    const ParaboloidSolution sh = s.shifted(Lambda);
    SolveOptions o;
    o.auto_omega = true;
    const GridSolution u = solve_obstacle(s.dim(), boundary_from_field(paraboloid_field(sh)),
                                          presets::solve_box(P, h, Lambda), o);
    Expansion e;
    e.l = Vec::Zero(s.dim());
    e.l(s.dim() - 1) = -s.blowdown().bN;
    e.c = sh.c_P();
    e.c_P = s.c_P();
    CompareOptions co;
    co.strict = false;
    const ComparisonReport r = compare_and_slide(u, s.blowdown(), e, P, co);
    io::CsvTable t({{"lambda", "length"}, {"max_gap", "u", r.tolerance}, {"tested", "1"}});
    for (const auto& row : r.rows) t.row({row.lambda, row.max_gap, row.tested ? 1.0 : 0.0});
    out.table("compare", t);
    out.document("compare", io::to_json(r));
    bool ordered = true;
    for (const auto& row : r.rows)
        if (row.tested) ordered = ordered && row.max_gap <= r.tolerance;
    v.add("compare", "ordering u_{P_lambda} <= u + C h^2 down to lambda_bar", ordered, {{"lambda_bar", r.lambda_bar}});
    v.add("compare", "coincidence sets agree within 5h at lambda_bar", r.symdiff_ok,
          {{"symdiff_fraction", r.symdiff_fraction}, {"bound", 5 * r.h}});
}

void suite_heleshaw(const ParaboloidSolution& s, Verdict& v, const Output& out)
{
    if (!s.paraboloid().isotropic()) return v.skip("heleshaw", "axisymmetric test functions need isotropic data");
    const auto rows = hele_shaw_residual(s, 1.0, presets::hele_shaw_bumps(s.paraboloid()), 8);
    io::CsvTable t({{"bump", "1"}, {"residual_h", "weak"}, {"residual_h2", "weak"}, {"ratio", "1", 3}});
    bool ok = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        t.row({double(k), rows[k].coarse, rows[k].fine, rows[k].ratio});
        ok = ok && rows[k].ratio >= 3.0;
    }
    out.table("heleshaw", t);
    v.add("heleshaw", "weak residual reduces >= 3x per refinement", ok);
}

int cmd_verify(const RunConfig& c, const Output& out)
{
    const ParaboloidSolution s = solution_of(c);
    if (s.dim() < 6) throw UsageError("the verification suites need N >= 6", "/N");
    Verdict v;
    const auto want = [&](const char* name) { return c.suite == "all" || c.suite == name; };
    if (want("frequency")) suite_frequency(s, v, out);
    if (want("acf")) suite_acf(s, v, out);
    if (want("envelope")) suite_envelope(s, c.h, v, out);
    if (want("decay")) suite_decay(s, v, out);
    if (want("compare")) suite_compare(s, c.h, v, out);
    if (want("heleshaw")) suite_heleshaw(s, v, out);
    if (c.monte_carlo) {
        Vec x = Vec::Zero(s.dim());
        x(0) = 3.0;
        x(s.dim() - 1) = -s.paraboloid().vertex_shift() + 0.2;
        const SlabResult mc = paraboloid_montecarlo(s.paraboloid(), x, c.samples, *c.seed, 1e-3);
        const double exact = s.potential().value(x);
        const double dev = std::abs(mc.estimate - exact);
        v.add("monte-carlo", "closed form within 3 stderr + tail bound", dev <= 3 * mc.stderr_ + mc.tail_bound,
              {{"estimate", mc.estimate}, {"stderr", mc.stderr_}, {"closed_form", exact}});
    }
    const json j = {{"suite", c.suite}, {"preset", c.preset}, {"N", s.dim()}, {"verdicts", v.items}, {"pass", v.ok}};
    out.document("verdict", j);
    std::cout << j.dump(2) << '\n';
    return v.ok ? kOk : kFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"obstlab: obstacle-problem potentials, paraboloid solutions and diagnostics"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);
    app.footer("Environment: OBSTLAB_THREADS sets the worker count (default 1).\n"
               "Exit status: 0 pass, 1 invariant failed, 2 usage error, 3 module error.");

    RunConfig cli;
    std::string config_path;
    std::string at_text;
    std::optional<std::uint64_t> seed;
    std::optional<int> N;
    std::optional<double> tol;
    std::optional<std::string> preset, out, suite, method;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", config_path, "JSON run configuration (flags override it)");
        s->add_option("--N", N, "ambient dimension (default 6)");
        s->add_option("--preset", preset, "isotropic | anisotropic (potential also: ball | ellipsoid)");
        s->add_option("--tol", tol, "tolerance (default 1e-8)");
        s->add_option("--seed", seed, "RNG seed, required whenever Monte-Carlo sampling runs");
        s->add_option("--out", out, "output directory for CSV/JSON artifacts");
    };
    std::string body_path;
    auto* pot = app.add_subcommand("potential", "evaluate a Newtonian potential");
    common(pot);
    pot->add_option("--body", body_path, "body JSON file");
    pot->add_option("--at", at_text, "comma-separated point")->required();
    pot->add_option("--method", method, "closed-form | sequence | monte-carlo");
    pot->add_option("--samples", cli.samples, "Monte-Carlo samples (default 1e6)");

    auto* con = app.add_subcommand("construct", "paraboloid solution from blow-down data");
    common(con);
    std::string blowdown_path;
    con->add_option("--blowdown", blowdown_path, "blow-down JSON file");

    auto* sol = app.add_subcommand("solve", "axisymmetric projected SOR solve");
    common(sol);
    std::optional<std::string> omega;
    sol->add_option("--h", cli.h, "grid spacing (default 1/32)");
    sol->add_option("--R", cli.R, "radial extent");
    sol->add_option("--z0", cli.z0, "lower x_N");
    sol->add_option("--z1", cli.z1, "upper x_N");
    sol->add_option("--omega", omega, "relaxation factor or auto (default auto)");
    sol->add_option("--shift", cli.shift, "boundary data u_P(x + shift e^N)");
    sol->add_option("--boundary", cli.boundary, "paraboloid-solution | polynomial | file");
    std::string poly_text;
    sol->add_option("--poly", poly_text, "a,b,c,d for a rho^2 + b z^2 + c z + d");
    sol->add_option("--from", cli.from, "grid prefix for file boundary data");
    sol->add_flag("--slices", cli.slices, "write CSV slices");

    auto* fr = app.add_subcommand("frequency", "frequency functional F1 on the paraboloid solution");
    common(fr);
    fr->add_option("--radii", cli.radii, "radii (default 0.25 0.5 1 2 4)");

    auto* ver = app.add_subcommand("verify", "run a verification suite");
    common(ver);
    ver->add_option("--suite", suite, "frequency | acf | envelope | decay | compare | heleshaw | all");
    ver->add_option("--h", cli.h, "grid spacing for solver-backed suites (default 1/32)");
    ver->add_flag("--monte-carlo", cli.monte_carlo, "add a Monte-Carlo cross-check (needs --seed)");
    ver->add_option("--samples", cli.samples, "Monte-Carlo samples");

    auto* hs = app.add_subcommand("heleshaw", "Hele-Shaw traveling-wave weak residuals");
    common(hs);
    hs->add_option("--speed", cli.speed, "wave speed c (default 1)");
    hs->add_option("--cells", cli.cells, "coarse cells per axis (default 8)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    CLI::App* sub = app.get_subcommands().front();
    RunConfig c;
    try {
        if (!config_path.empty()) apply_config(c, read_json_file(config_path, "--config"));
        c.command = sub->get_name();
        auto given = [&](const char* flag) {
            const CLI::Option* opt = sub->get_option_no_throw(flag);
            return opt != nullptr && opt->count() > 0;
        };
        if (N) c.N = *N;
        if (tol) c.tol = *tol;
        if (seed) c.seed = seed;
        if (preset) c.preset = *preset;
        if (out) c.out = *out;
        if (suite) c.suite = *suite;
        if (method) c.method = *method;
        if (omega) c.omega = *omega;
        if (given("--samples")) c.samples = cli.samples;
        if (given("--h")) c.h = cli.h;
        if (given("--R")) c.R = cli.R;
        if (given("--z0")) c.z0 = cli.z0;
        if (given("--z1")) c.z1 = cli.z1;
        if (given("--shift")) c.shift = cli.shift;
        if (given("--boundary")) c.boundary = cli.boundary;
        if (given("--from")) c.from = cli.from;
        if (given("--slices")) c.slices = true;
        if (given("--radii")) c.radii = cli.radii;
        if (given("--monte-carlo")) c.monte_carlo = true;
        if (given("--speed")) c.speed = cli.speed;
        if (given("--cells")) c.cells = cli.cells;
        if (!body_path.empty()) c.body = read_json_file(body_path, "--body");
        if (!blowdown_path.empty()) c.blowdown = read_json_file(blowdown_path, "--blowdown");
        auto parse_list = [](const std::string& text, const std::string& field) {
            std::vector<double> v;
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    std::size_t used = 0;
                    v.push_back(std::stod(item, &used));
                    if (used != item.size()) throw std::invalid_argument(item);
                } catch (const std::exception&) {
                    throw UsageError("malformed number list", field);
                }
            }
            return v;
        };
        if (!at_text.empty()) c.at = parse_list(at_text, "/at");
        if (!poly_text.empty()) c.poly = parse_list(poly_text, "/poly");
        if (c.body && !N) c.N = c.body->value("dim", c.N);
        validate(c);
        if (!c.out.empty()) fs::create_directories(c.out);
    } catch (const UsageError& e) {
        std::cerr << json{{"error", "usage"}, {"message", e.what()}, {"path", e.path}}.dump() << '\n';
        return kUsage;
    }

    const Output o{c.out};
    try {
        if (c.command == "potential") return cmd_potential(c, o);
        if (c.command == "construct") return cmd_construct(c, o);
        if (c.command == "solve") return cmd_solve(c, o);
        if (c.command == "frequency") return cmd_frequency(c, o);
        if (c.command == "verify") return cmd_verify(c, o);
        if (c.command == "heleshaw") return cmd_heleshaw(c, o);
    } catch (const UsageError& e) {
        std::cerr << json{{"error", "usage"}, {"message", e.what()}, {"path", e.path}}.dump() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << e.to_json().dump() << '\n';
        return kModule;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
        return kModule;
    }
    return kUsage;
}

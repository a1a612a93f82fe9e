#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "obstlab/construct.hpp"
#include "obstlab/diagnostics.hpp"
#include "obstlab/geometry.hpp"
#include "obstlab/solver.hpp"

namespace obstlab::io {

using json = nlohmann::json;

json to_json(const Ellipsoid& E);
json to_json(const Paraboloid& P);
json to_json(const EnvelopeSet& S);
json to_json(const Body& B);
json to_json(const BlowdownData& b);
json to_json(const PotentialValue& v);
json to_json(const ConstructionReport& r);
json to_json(const FrequencyReport& r);
json to_json(const ACFValue& a);
json to_json(const DoublingValue& d);
json to_json(const EnvelopeReport& r);
json to_json(const DecayTable& t);
json to_json(const SubquadraticTable& t);
json to_json(const ComparisonReport& r);
json to_json(const std::vector<HeleShawRow>& rows);
json grid_metadata(const GridSolution& s);

// {"kind": "ellipsoid" | "ball" | "paraboloid" | "envelope", ...}; errors name the offending path
Body body_from_json(const json& j);
BlowdownData blowdown_from_json(const json& j);

// Plot-ready CSV; every column header reads name[unit;tol=...].
class CsvTable {
public:
    struct Column {
        std::string name;
        std::string unit = "1";
        double tol = 0.0; // 0: exact / not applicable
    };
    explicit CsvTable(std::vector<Column> cols) : cols_(std::move(cols)) {}
    void row(const std::vector<double>& values);
    void write(std::ostream& os) const;
    void save(const std::string& path) const;
    std::size_t size() const { return rows_.size(); }

private:
    std::vector<Column> cols_;
    std::vector<std::vector<double>> rows_;
};

// Shortest round-trip decimal form, stable across runs.
std::string format_number(double v);

// <prefix>.bin holds nr*nz little-endian doubles (row j = z index); <prefix>.json the metadata.
void write_grid(const GridSolution& s, const std::string& prefix);
GridSolution read_grid(const std::string& prefix);

} // namespace obstlab::io

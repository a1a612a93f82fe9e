#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace obstlab {

enum class ErrorKind {
    InvalidInput,
    UnsupportedDimension,
    ToleranceNotMet,
    EmptySection,
    Precondition,
    FitFailed,
    ConstructionFailed,
    IterationBudget,
    Domain,
    DegenerateSampler,
    ComparisonFailed,
};

const char* kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(what), kind_(kind), details_(std::move(details)) {}

    ErrorKind kind() const { return kind_; }
    const nlohmann::json& details() const { return details_; }

    // {"error": kind, "message": ..., "details": {...}}
    nlohmann::json to_json() const;

private:
    ErrorKind kind_;
    nlohmann::json details_;
};

} // namespace obstlab

#include "obstlab/error.hpp"

namespace obstlab {

const char* kind_name(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::UnsupportedDimension: return "unsupported-dimension";
    case ErrorKind::ToleranceNotMet: return "tolerance-not-met";
    case ErrorKind::EmptySection: return "empty-section";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::FitFailed: return "fit-failed";
    case ErrorKind::ConstructionFailed: return "construction-failed";
    case ErrorKind::IterationBudget: return "iteration-budget";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::DegenerateSampler: return "degenerate-sampler";
    case ErrorKind::ComparisonFailed: return "comparison-failed";
    }
    return "unknown";
}

nlohmann::json Error::to_json() const
{
    return {{"error", kind_name(kind_)}, {"message", what()}, {"details", details_}};
}

} // namespace obstlab

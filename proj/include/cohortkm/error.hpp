#pragma once

#include <stdexcept>
#include <string>

namespace cohortkm {

/// Base class for every error raised by the library. `kind()` is a stable
/// identifier (e.g. "MalformedRow") that callers and tests can match on.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define COHORTKM_DEFINE_ERROR(Name)                                         \
    class Name : public Error {                                             \
    public:                                                                 \
        explicit Name(const std::string& message) : Error(#Name, message) {} \
    }

// dataset
COHORTKM_DEFINE_ERROR(MalformedRow);
COHORTKM_DEFINE_ERROR(UnknownCategory);
COHORTKM_DEFINE_ERROR(DuplicateSerial);
COHORTKM_DEFINE_ERROR(EmptyCohort);
COHORTKM_DEFINE_ERROR(InvalidSpec);
COHORTKM_DEFINE_ERROR(InvalidBounds);
// preprocess
COHORTKM_DEFINE_ERROR(DegenerateFeature);
COHORTKM_DEFINE_ERROR(UnknownFeature);
// kmeans
COHORTKM_DEFINE_ERROR(TooFewPoints);
COHORTKM_DEFINE_ERROR(InvalidConfig);
// pca
COHORTKM_DEFINE_ERROR(TooFewRows);
COHORTKM_DEFINE_ERROR(NotSymmetric);
COHORTKM_DEFINE_ERROR(NoConvergence);
COHORTKM_DEFINE_ERROR(ZeroVariance);
COHORTKM_DEFINE_ERROR(BadDimension);
// metrics
COHORTKM_DEFINE_ERROR(SingleCluster);
COHORTKM_DEFINE_ERROR(BadClusterCount);
COHORTKM_DEFINE_ERROR(LengthMismatch);
// guidance
COHORTKM_DEFINE_ERROR(EmptyCluster);
COHORTKM_DEFINE_ERROR(InvalidRules);
// viz
COHORTKM_DEFINE_ERROR(BadShape);
COHORTKM_DEFINE_ERROR(EmptyInput);
// cli
COHORTKM_DEFINE_ERROR(IoError);

#undef COHORTKM_DEFINE_ERROR

}  // namespace cohortkm

#pragma once
#include <stdexcept>
#include <string>

namespace bdspec {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepUnderflow : NumericalError {
    double r;
    StepUnderflow(const std::string& what, double r_at) : NumericalError(what), r(r_at) {}
};

struct PoleAtLambda : NumericalError {
    int mode;
    PoleAtLambda(const std::string& what, int n) : NumericalError(what), mode(n) {}
};

struct WindowTruncated : NumericalError {
    using NumericalError::NumericalError;
};
struct NearDirichletEigenvalue : NumericalError {
    using NumericalError::NumericalError;
};
struct SingularBlock : NumericalError {
    using NumericalError::NumericalError;
};
struct NonMonotoneTail : NumericalError {
    using NumericalError::NumericalError;
};
struct InsufficientTail : NumericalError {
    using NumericalError::NumericalError;
};
struct EstimateOutOfBranch : NumericalError {
    using NumericalError::NumericalError;
};
struct QuadratureFailure : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace bdspec

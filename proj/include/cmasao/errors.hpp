#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace cmasao {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidDimensionError : Error {
    using Error::Error;
};

struct InvalidBoxError : Error {
    using Error::Error;
};

struct IncompleteGenerationError : Error {
    using Error::Error;
};

/// The objective returned a non-finite value; carries the offending point.
struct EvaluationError : Error {
    EvaluationError(const std::string& msg, Eigen::VectorXd x)
        : Error(msg), point(std::move(x)) {}
    Eigen::VectorXd point;
};

struct InvalidMatrixError : Error {
    using Error::Error;
};

struct EmptyTrainingSetError : Error {
    using Error::Error;
};

struct InsufficientPointsError : Error {
    using Error::Error;
};

struct InsufficientTestPointsError : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct DegenerateBoxError : Error {
    using Error::Error;
};

struct InvalidBudgetError : Error {
    using Error::Error;
};

struct UndefinedSpeedupError : Error {
    using Error::Error;
};

} // namespace cmasao

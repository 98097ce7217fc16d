#pragma once

#include <stdexcept>
#include <string>

namespace warpsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument values (n = 0, negative Dirichlet parameter, alpha outside (0,1), ...).
struct InvalidParameterError : Error {
    using Error::Error;
};

// Evaluation point outside the function's domain.
struct DomainError : Error {
    using Error::Error;
};

// A grid function that is not a valid element of the space an operation needs
// (non-positive derivative, non-finite values).
struct InvalidElementError : Error {
    using Error::Error;
};

// A sampler could not produce a valid draw; carries a diagnostic message.
struct SamplingError : Error {
    using Error::Error;
};

// Parameter outside the supported range of an exact oracle (e.g. n > 128).
struct UnsupportedParameterError : Error {
    using Error::Error;
};

// Quadrature failed to reach the requested accuracy; carries the achieved estimate.
struct AccuracyError : Error {
    AccuracyError(const std::string& msg, double achieved_estimate, double achieved_error)
        : Error(msg), estimate(achieved_estimate), error(achieved_error) {}
    double estimate;
    double error;
};

struct InsufficientSampleError : Error {
    using Error::Error;
};

struct DegenerateWarpError : Error {
    using Error::Error;
};

struct DegenerateEstimateError : Error {
    using Error::Error;
};

struct IngestionError : Error {
    using Error::Error;
};

}  // namespace warpsim

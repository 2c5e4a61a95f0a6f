#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pbglaser {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A series or iteration did not converge within its budget.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& what, double partial)
        : Error(what), partial_(partial) {}

    double partial() const noexcept { return partial_; }

private:
    double partial_;
};

/// The linear system has no unique solution for the given parameters.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// The Fock truncation is too small for the requested tail tolerance.
class TruncationError : public Error {
public:
    TruncationError(const std::string& what, std::size_t suggested)
        : Error(what), suggested_(suggested) {}

    /// Truncation that is likely to satisfy the tail condition.
    std::size_t suggested() const noexcept { return suggested_; }

private:
    std::size_t suggested_;
};

/// Time step too large for the explicit integrator.
class StepSizeError : public Error {
public:
    using Error::Error;
};

/// Requested problem size exceeds a configured resource cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// The stationary state of a superoperator is not unique.
class DegenerateNullSpaceError : public Error {
public:
    using Error::Error;
};

/// The correlation function has not decayed at the end of the time horizon.
class HorizonError : public Error {
public:
    HorizonError(const std::string& what, double ratio)
        : Error(what), ratio_(ratio) {}

    /// |g(T)| / |g(0)| at the horizon.
    double ratio() const noexcept { return ratio_; }

private:
    double ratio_;
};

}  // namespace pbglaser

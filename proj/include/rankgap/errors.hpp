#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace rankgap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

// Raised at (or numerically on top of) a pole; carries its location and,
// for the transform poles, the integer index k.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, std::complex<double> where,
                     std::optional<int> index = std::nullopt)
        : Error(what), location(where), pole_index(index) {}
    std::complex<double> location;
    std::optional<int> pole_index;
};

class SimulationError : public Error {
public:
    SimulationError(const std::string& what, std::uint64_t step_index)
        : Error(what), step(step_index) {}
    std::uint64_t step;
};

}  // namespace rankgap

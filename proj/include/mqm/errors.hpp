#pragma once

#include <stdexcept>
#include <string>

namespace mqm {

// Bad input: parameters outside their domain, malformed configuration.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Unknown name (preset, stage). Reported like a validation error.
class LookupError : public ValidationError {
public:
    explicit LookupError(const std::string& what) : ValidationError(what) {}
};

// A computation that could not be completed to the requested accuracy.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

class DegenerateStateError : public NumericalError {
public:
    explicit DegenerateStateError(const std::string& what) : NumericalError(what) {}
};

class InvalidCovarianceError : public NumericalError {
public:
    explicit InvalidCovarianceError(const std::string& what) : NumericalError(what) {}
};

class FactorizationError : public NumericalError {
public:
    explicit FactorizationError(const std::string& what) : NumericalError(what) {}
};

} // namespace mqm

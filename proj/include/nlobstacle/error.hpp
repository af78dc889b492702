#pragma once

#include <stdexcept>
#include <string>

namespace nlobs {

/// Invalid user or catalog configuration (bad parameter, unknown key, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Grid functions or operators defined on different grids.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Kernel assembly requested for a parameter set it cannot represent (s = 1).
class AssemblyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// An iterative computation stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlobs

#pragma once

#include <stdexcept>
#include <string>

namespace gtetrad {

// Every failure surfaced by the library maps to one of two process exit
// codes: 2 for problems with inputs or configuration, 3 for numerical or
// identification failures detected during computation.
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

class Error : public std::runtime_error {
public:
    Error(std::string message, int exit_code)
        : std::runtime_error(std::move(message)), exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

// Bad run configuration: unknown option values, missing columns, level out
// of the supported range, unknown presets.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message)
        : Error(std::move(message), kExitConfig) {}
};

// Malformed input files (CSV cells that do not parse, structural problems).
class ParseError : public Error {
public:
    explicit ParseError(std::string message)
        : Error(std::move(message), kExitConfig) {}
};

// Inputs that parse but violate a documented precondition or invariant
// (constant columns, zero-sum violations, mismatched anchor sets).
class ValidationError : public Error {
public:
    explicit ValidationError(std::string message)
        : Error(std::move(message), kExitConfig) {}
};

// Numerical breakdown during an otherwise valid computation: singular
// matrices, ill-conditioned solves, non-convergent quadrature.
class NumericalError : public Error {
public:
    explicit NumericalError(std::string message)
        : Error(std::move(message), kExitNumerical) {}
};

// A special numerical failure: the instrument carries (numerically) no
// information about the bridge basis, so the bridge is not identified.
class IdentificationError : public NumericalError {
public:
    explicit IdentificationError(std::string message)
        : NumericalError(std::move(message)) {}
};

}  // namespace gtetrad

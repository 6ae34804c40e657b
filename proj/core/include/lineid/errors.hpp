#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lineid {

enum class ErrorCategory { Config, Numerical, Io, NoSolution };

/// Machine-readable category name, used in CLI diagnostics.
const char* to_string(ErrorCategory c);

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// Invalid or unparsable configuration. Carries every violation found.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> violations);

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

/// NaN/inf or an impossible numerical state during a run.
class NumericalFault : public Error {
public:
    NumericalFault(const std::string& what, double last_good_t);

    double last_good_t() const noexcept { return last_good_t_; }

private:
    double last_good_t_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

/// Rank-deficient or ill-conditioned least-squares system.
class NoSolutionError : public Error {
public:
    explicit NoSolutionError(const std::string& what) : Error(ErrorCategory::NoSolution, what) {}
};

}  // namespace lineid

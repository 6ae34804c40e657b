#include "lineid/errors.hpp"

namespace lineid {

namespace {

std::string join_violations(const std::vector<std::string>& v) {
    std::string out = "invalid configuration";
    for (const auto& s : v) {
        out += "\n  - ";
        out += s;
    }
    return out;
}

}  // namespace

const char* to_string(ErrorCategory c) {
    switch (c) {
        case ErrorCategory::Config: return "config";
        case ErrorCategory::Numerical: return "numerical";
        case ErrorCategory::Io: return "io";
        case ErrorCategory::NoSolution: return "no_solution";
    }
    return "unknown";
}

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorCategory::Config, join_violations(violations)), violations_(std::move(violations)) {}

NumericalFault::NumericalFault(const std::string& what, double last_good_t)
    : Error(ErrorCategory::Numerical, what + " (last good t=" + std::to_string(last_good_t) + " s)"),
      last_good_t_(last_good_t) {}

}  // namespace lineid

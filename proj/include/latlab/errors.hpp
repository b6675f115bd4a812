#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace latlab {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Mismatched dimensions or an otherwise violated call contract.
struct ContractViolation : Error {
    using Error::Error;
};

/// A configured size cap would be exceeded (state space, dense solver, ...).
struct CapExceeded : Error {
    using Error::Error;
};

/// Iterative solver failed to converge; carries the best residuals seen.
struct ConvergenceFailure : Error {
    std::vector<double> best_residuals;
    ConvergenceFailure(const std::string& what, std::vector<double> residuals)
        : Error(what), best_residuals(std::move(residuals)) {}
};

/// Invalid experiment configuration; `path` names the offending field.
struct ConfigError : Error {
    std::string path;
    ConfigError(std::string path_, const std::string& what)
        : Error(path_ + ": " + what), path(std::move(path_)) {}
};

} // namespace latlab

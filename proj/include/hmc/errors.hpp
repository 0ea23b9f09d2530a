#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hmc {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Inconsistent mesh connectivity (duplicate cells, non-manifold facets, ...).
class TopologyError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Operation requested in a state that cannot support it (missing history, ...).
class StateError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Boundary facet that cannot be assigned to any wall of the bounding box.
class TaggingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Two strong constraints demanding different values for one unknown.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// Iteration cap reached; carries the convergence measure of every iteration.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::vector<double> history = {})
        : Error(what), history_(std::move(history)) {}
    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Failure inside a simulation step, labeled with the step index and stage.
class StageError : public Error {
public:
    StageError(int step, const std::string& stage, const std::string& what)
        : Error("step " + std::to_string(step) + ", stage " + stage + ": " + what), step_(step), stage_(stage) {}
    int step() const noexcept { return step_; }
    const std::string& stage() const noexcept { return stage_; }

private:
    int step_;
    std::string stage_;
};

} // namespace hmc

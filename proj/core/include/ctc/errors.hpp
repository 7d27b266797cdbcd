#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ctc {

/// Closest-point query with no unique answer (e.g. the center of a circle).
class ProjectionAmbiguousError : public std::runtime_error {
public:
    ProjectionAmbiguousError(const std::string& what, std::vector<double> candidates)
        : std::runtime_error(what), candidates_(std::move(candidates)) {}

    const std::vector<double>& candidates() const { return candidates_; }

private:
    std::vector<double> candidates_;
};

/// Vertical-tangent arc reached without a configured yaw-reference override.
class FrameDegenerateError : public std::runtime_error {
public:
    FrameDegenerateError(const std::string& what, double s) : std::runtime_error(what), s_(s) {}
    double s() const { return s_; }

private:
    double s_;
};

/// Input matrix of the chain dynamics is numerically singular at this state.
class SingularDecouplingError : public std::runtime_error {
public:
    SingularDecouplingError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

/// Output inversion asked for an attitude outside |theta|,|psi| < pi/2.
class OutOfDomainError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Non-finite value produced while integrating.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, int component)
        : std::runtime_error(what), component_(component) {}
    int component() const { return component_; }

private:
    int component_;
};

/// Scenario file problem; carries the offending line when known.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what, int line = 0)
        : std::runtime_error(what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace ctc

#pragma once
#include <stdexcept>
#include <string>

namespace lps {

// Base for all library errors; CLI maps subclasses onto exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input is outside the hypotheses the construction needs (exit code 2).
struct HypothesisError : Error {
    using Error::Error;
};

struct EmptyGammaError : HypothesisError {
    using HypothesisError::HypothesisError;
};

struct NoExteriorComponentError : HypothesisError {
    using HypothesisError::HypothesisError;
};

struct NoRegularBoundaryPointError : HypothesisError {
    using HypothesisError::HypothesisError;
};

// Numerical resources insufficient for a certified answer (exit code 4).
struct ResolutionTooCoarseError : Error {
    using Error::Error;
};

// Internal consistency failure: the region graph must be connected.
struct DisconnectedAdjacencyError : Error {
    using Error::Error;
};

struct StepSizeUnderflowError : Error {
    using Error::Error;
};

struct NoConvergenceToCycleError : Error {
    using Error::Error;
};

struct EmptyInputError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

// Expression parser failure; carries a 0-based character offset.
struct ParseError : Error {
    ParseError(const std::string& msg, std::size_t pos)
        : Error(msg + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    std::size_t position;
};

}  // namespace lps

#pragma once

#include <stdexcept>
#include <string>

namespace pipesched {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input document (JSON syntax, missing keys, wrong types).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input that violates an instance invariant.
// `path` points at the offending field, e.g. "lines[0].volume".
struct ValidationError : Error {
    std::string path;
    ValidationError(std::string p, const std::string& msg)
        : Error(p + ": " + msg), path(std::move(p)) {}
};

struct ModelSizeError : Error {
    using Error::Error;
};

struct SolverLaunchError : Error {
    using Error::Error;
};

struct SolutionParseError : Error {
    long line_number = -1;
    SolutionParseError(long line, const std::string& msg)
        : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
};

// The solver returned an assignment that violates the model it was given.
struct InconsistentSolution : Error {
    using Error::Error;
};

// A binary variable came back non-integral beyond tolerance.
struct DegenerateSolution : Error {
    using Error::Error;
};

struct SearchSpaceTooLarge : Error {
    using Error::Error;
};

}  // namespace pipesched

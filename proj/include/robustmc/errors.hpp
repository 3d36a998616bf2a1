#pragma once

#include <stdexcept>
#include <string>

namespace robustmc {

/// Bad matrix/observation shapes or out-of-range indices.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Invalid argument values (negative penalties, bad fractions, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values or diverging numeric procedures.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what, int iteration = -1)
        : std::runtime_error(iteration >= 0 ? what + " (iteration " + std::to_string(iteration) + ")"
                                            : what),
          iteration(iteration) {}
    int iteration;
};

/// Malformed input file content.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
    long line;
};

/// Missing or unreadable files.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace robustmc

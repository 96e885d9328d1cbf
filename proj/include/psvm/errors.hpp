#pragma once

#include <stdexcept>
#include <string>

namespace psvm {

// Malformed input data: bad TSV lines, empty corpora, model-file mismatches.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Failures inside a training run: divergence, size-cap refusals,
// singular systems, invalid optimizer configuration for the data.
class TrainError : public std::runtime_error {
public:
    explicit TrainError(const std::string& what) : std::runtime_error(what) {}
};

// Caller asked for something that does not exist: unknown parameter or
// algorithm names, malformed flag values.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace psvm

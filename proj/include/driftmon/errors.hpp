#pragma once

#include <stdexcept>
#include <string>

namespace driftmon {

// Input rows that do not match the declared stream schema.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid experiment / generator configuration.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Out-of-order updates to sequential state (batch indices must increase).
struct SequencingError : std::logic_error {
    explicit SequencingError(const std::string& what) : std::logic_error(what) {}
};

// Non-finite gradients or other unusable training input.
struct TrainingError : std::runtime_error {
    explicit TrainingError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace driftmon

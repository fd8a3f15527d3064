#pragma once

#include <stdexcept>
#include <string>

namespace trafficrl {

// Invalid simulation / experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Operation called in a state that does not allow it (e.g. finalizing a run early).
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed persisted data: model files, CSV, config JSON.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Filesystem trouble: unwritable output paths, failed writes.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad command-line usage (missing required flag combinations).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace trafficrl

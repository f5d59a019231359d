#ifndef OUD_ERRORS_HPP
#define OUD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace oud {

// Bad flags, parameters, or configuration. CLI exit code 1.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input data: malformed files, degenerate samples, empty posts. CLI exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dimension mismatches between tensors. Indicates caller misuse. CLI exit code 3.
struct ShapeError : std::logic_error {
    explicit ShapeError(const std::string& msg) : std::logic_error(msg) {}
};

// A broken internal invariant. CLI exit code 3.
struct InternalError : std::logic_error {
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace oud

#endif

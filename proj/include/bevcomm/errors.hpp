#pragma once

#include <stdexcept>
#include <string>

namespace bevcomm {

// Error taxonomy used across the library. All failures are reported by
// throwing; no operation returns a partial result.

// Shape or index mismatch between grid values.
struct DimensionError : std::runtime_error {
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or scenario content (bad field values, unusable knobs).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Contract violation inside the exchange loop (wrong round inputs, missing
// request maps, inconsistent message routing).
struct ProtocolError : std::runtime_error {
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed byte stream (encode- or decode-side). Message text carries the
// byte offset where the stream became invalid.
struct CodecError : std::runtime_error {
    explicit CodecError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure (unreadable or unwritable path), as opposed to a file
// whose content is invalid.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bevcomm

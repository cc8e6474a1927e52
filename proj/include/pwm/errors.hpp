#pragma once

#include <stdexcept>
#include <string>

namespace pwm {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A scenario field value does not fit its declared width or cardinality.
struct FieldOverflow : Error {
    FieldOverflow(std::string field_name, const std::string& what)
        : Error("field '" + field_name + "': " + what), field(std::move(field_name)) {}
    std::string field;
};

/// Manifest and payload disagree, or an encoded stream is malformed.
struct StructuralError : Error {
    using Error::Error;
};

/// Unknown estimator name or invalid configuration value.
struct ConfigError : Error {
    using Error::Error;
};

/// Machine class larger than the configured enumeration cap.
struct CapExceeded : Error {
    using Error::Error;
};

/// CTM cache file unreadable, truncated, or for a different machine class.
struct CacheError : Error {
    using Error::Error;
};

} // namespace pwm

#pragma once

#include <stdexcept>
#include <string>

namespace streamfill {

/// Tensor dimensions or layouts that do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid user or programmatic configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed RVV / WTS1 file contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ordering violations between the online worker, the refiner and the store.
class ProtocolError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

[[noreturn]] void throw_shape(const std::string& what);
[[noreturn]] void throw_config(const std::string& what);

} // namespace streamfill

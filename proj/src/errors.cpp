#include "streamfill/errors.hpp"

namespace streamfill {

void throw_shape(const std::string& what) { throw ShapeError(what); }

void throw_config(const std::string& what) { throw ConfigError(what); }

} // namespace streamfill

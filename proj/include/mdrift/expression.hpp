#pragma once

#include <string>

#include "mdrift/core.hpp"

namespace mdrift {

/// Compiles a real expression of the variable t into a callable.
///
/// Supports + - * / ^, parentheses, numbers, the constants pi and e, and the
/// functions sin cos tan exp log sqrt abs. Throws ConfigError on bad input.
RealFunction parse_expression(const std::string& text);

}  // namespace mdrift

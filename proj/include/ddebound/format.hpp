#pragma once

#include <string>

namespace ddebound {

/// Shortest text that reads back to the same double; locale independent.
std::string format_number(double v);

}  // namespace ddebound

#include "ddebound/format.hpp"

#include <charconv>

namespace ddebound {

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace ddebound

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ddebound {

/// Identifiers of the built-in example problems: 1, 1f, 2, 2a, 2a-floor, 3.
const std::vector<std::string>& example_ids();

/// Problem file text of a built-in example; throws std::invalid_argument for
/// an unknown id.
std::string_view example_source(std::string_view id);

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string expected;
};

struct ReproduceResult {
  std::string id;
  std::vector<Check> checks;
  bool passed() const;
};

/// Runs a built-in example end to end and compares the expected constants.
ReproduceResult reproduce(std::string_view id);

}  // namespace ddebound

#include <stdexcept>
#include <string>

#include "ddebound/reproduce.hpp"

namespace ddebound {

namespace {

constexpr std::string_view kExample1 = R"(# single oscillating delay, decaying
[problem]
t0 = 0
x0 = 1
phi = sin(20*t) - 1
f = 0
t_end = 40

[term]
b = 0.2*(2-sin(t))
h = t-(2-sin(t))/12
delta = 1/12
tau = 0.25

[certify]
mode = auto
lambda = 0.15
)";

constexpr std::string_view kExample1f = R"(# same equation with bounded forcing
[problem]
t0 = 0
x0 = 1
phi = sin(20*t) - 1
f = 0.05*(1+sin(2*t))
t_end = 40

[term]
b = 0.2*(2-sin(t))
h = t-(2-sin(t))/12
delta = 1/12
tau = 0.25

[certify]
mode = auto
lambda = 0.15
)";

constexpr std::string_view kExample2 = R"(# x' + 2 x(t-1) = 0, unstable
[problem]
t0 = 0
x0 = 1
phi = 0
t_end = 8

[term]
b = 2
h = t-1
delta = 1
tau = 1

[certify]
mode = auto
lambda = 0.8
)";

constexpr std::string_view kExample2a = R"(# long oscillating delay, growing
[problem]
t0 = 0
x0 = 1
phi = 0
t_end = 60

[term]
b = 0.2*(2-sin(t))
h = t-15+sin(t)
delta = 14
tau = 16

[certify]
mode = auto
lambda = 0.2
)";

constexpr std::string_view kExample2aFloor = R"(# piecewise constant argument, delay up to 4 pi
[problem]
t0 = 0
x0 = 1
phi = 0
t_end = 40

[term]
b = 0.2*(2-sin(t))
h = 4*pi*floor(t/(4*pi))
delta = 0
tau = 4*pi

[solver]
step = 0.001

[certify]
mode = growth
)";

constexpr std::string_view kExample3 = R"(# two sign-changing coefficients
[problem]
t0 = 0
x0 = 1
phi = 0
t_end = 100

[term]
b = 0.2*(0.5-sin(t))
h = t-(2-sin(t))/6
delta = 1/6
tau = 0.5

[term]
b = 0.2*(0.5+sin(t))
h = t-(2-sin(t))/12
delta = 1/12
tau = 0.25

[certify]
mode = auto
lambda = 0.02
)";

}  // namespace

const std::vector<std::string>& example_ids() {
  static const std::vector<std::string> ids{"1", "1f", "2", "2a", "2a-floor", "3"};
  return ids;
}

std::string_view example_source(std::string_view id) {
  if (id == "1") return kExample1;
  if (id == "1f") return kExample1f;
  if (id == "2") return kExample2;
  if (id == "2a") return kExample2a;
  if (id == "2a-floor") return kExample2aFloor;
  if (id == "3") return kExample3;
  throw std::invalid_argument("unknown example '" + std::string(id) + "'");
}

}  // namespace ddebound

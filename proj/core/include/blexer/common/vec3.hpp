#pragma once

#include <cmath>

namespace blexer {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double magnitude() const { return std::sqrt(x * x + y * y + z * z); }
  bool operator==(const Vec3&) const = default;
};

}  // namespace blexer

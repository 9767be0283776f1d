#include "poth/normal.hpp"

#include <cmath>
#include <numbers>

namespace poth {

double normal_cdf(double z) noexcept {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double two_sided_p(double z) noexcept {
  return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

}  // namespace poth

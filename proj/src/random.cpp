#include "gftmark/random.hpp"

#include <cmath>
#include <numbers>

namespace gftmark {

double gaussian_at(std::uint64_t seed, std::uint64_t index) {
  // u1 in (0, 1] keeps the log finite.
  const double u1 = 1.0 - to_unit(counter_bits(seed, 2 * index));
  const double u2 = to_unit(counter_bits(seed, 2 * index + 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace gftmark

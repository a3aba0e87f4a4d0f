#include "gftmark/metrics.hpp"

#include <cmath>

#include "gftmark/error.hpp"

namespace gftmark {

namespace {

void require_comparable(const BitSequence& a, const BitSequence& b) {
  if (a.size() != b.size()) {
    throw DimensionError("bit sequences differ in length (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  if (a.empty()) {
    throw DimensionError("cannot compare empty bit sequences");
  }
}

}  // namespace

double ber(const BitSequence& original, const BitSequence& recovered) {
  require_comparable(original, recovered);
  std::size_t errors = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    errors += original[i] != recovered[i];
  }
  return static_cast<double>(errors) / static_cast<double>(original.size());
}

double nc(const BitSequence& original, const BitSequence& recovered) {
  require_comparable(original, recovered);
  std::size_t both = 0;
  std::size_t ones_a = 0;
  std::size_t ones_b = 0;
  for (std::size_t i = 0; i < original.size(); ++i) {
    both += original[i] & recovered[i];
    ones_a += original[i];
    ones_b += recovered[i];
  }
  if (ones_a == 0 || ones_b == 0) {
    return ones_a == ones_b ? 1.0 : 0.0;
  }
  return static_cast<double>(both) /
         std::sqrt(static_cast<double>(ones_a) * static_cast<double>(ones_b));
}

}  // namespace gftmark

#include "cwe/random.hpp"

#include <limits>

namespace cwe {

std::uint64_t Stream::next_below(std::uint64_t bound) {
  // Reject the tail that would make the modulo non-uniform.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % bound;
}

}  // namespace cwe

#include "cascade/random.hpp"

#include <bit>
#include <limits>

namespace cascade {

std::uint64_t RandomSource::uniform_below(std::uint64_t bound) {
  // Rejection on the smallest power-of-two mask covering bound.
  const std::uint64_t top = bound - 1;
  const std::uint64_t mask =
      top == 0 ? 0 : (std::numeric_limits<std::uint64_t>::max() >> std::countl_zero(top));
  for (;;) {
    const std::uint64_t candidate = engine_() & mask;
    if (candidate < bound) return candidate;
  }
}

BigInt RandomSource::uniform_below(const BigInt& bound) {
  if (bound <= std::numeric_limits<std::uint64_t>::max()) {
    return BigInt(uniform_below(bound.convert_to<std::uint64_t>()));
  }
  const unsigned bits = boost::multiprecision::msb(bound - 1) + 1;
  const unsigned words = (bits + 63) / 64;
  const unsigned spare = words * 64 - bits;
  for (;;) {
    BigInt candidate = 0;
    for (unsigned i = 0; i < words; ++i) {
      std::uint64_t word = engine_();
      if (i == 0 && spare != 0) word >>= spare;
      candidate = (candidate << 64) | word;
    }
    if (candidate < bound) return candidate;
  }
}

bool RandomSource::accept(const ExactWeight& weight, const ExactWeight& total) {
  if (total <= std::numeric_limits<std::uint64_t>::max()) {
    return uniform_below(total.convert_to<std::uint64_t>()) < weight.convert_to<std::uint64_t>();
  }
  return uniform_below(total) < weight;
}

}  // namespace cascade

#pragma once

// Unit weighted sampler: a size-one weighted reservoir over a stream.

#include "cascade/core.hpp"
#include "cascade/random.hpp"

#include <cmath>
#include <optional>

namespace cascade {

/// Requirements on a unit weighted sampler; the cascade uses nothing else.
/// After feeding a finite set S, P(current() = a) must equal w(a) / w(S).
/// feed() reports whether the held element changed.
template <class U>
concept UnitSamplerLike = requires(U& unit, const U& cunit,
                                   const typename U::element_type& element, RandomSource& rng) {
  typename U::weight_type;
  requires SamplerWeight<typename U::weight_type>;
  { unit.feed(element, rng) } -> std::same_as<bool>;
  { cunit.current() } -> std::convertible_to<const std::optional<typename U::element_type>&>;
  { cunit.weight_total() } -> std::convertible_to<const typename U::weight_type&>;
};

/// Running-total reservoir of size one: add w(t) to W, then hold t with
/// probability w(t) / W.
template <SamplerWeight W>
class UnitSampler {
 public:
  using weight_type = W;
  using element_type = WeightedElement<W>;

  UnitSampler() = default;

  /// Restores a previously observed state.
  UnitSampler(std::optional<element_type> reservoir, W total)
      : reservoir_(std::move(reservoir)), total_(std::move(total)) {}

  template <DecisionSource<W> Source>
  bool feed(const element_type& element, Source& source) {
    total_ += element.weight;
    if constexpr (std::same_as<W, FloatWeight>) {
      if (!std::isfinite(total_)) throw Error(ErrorCode::Overflow, "running weight total overflowed");
    }
    if (source.accept(element.weight, total_)) {
      reservoir_ = element;
      return true;
    }
    return false;
  }

  const std::optional<element_type>& current() const noexcept { return reservoir_; }
  const W& weight_total() const noexcept { return total_; }

  /// Bytes held by this sampler, including out-of-line integer limbs.
  std::size_t state_bytes() const noexcept;

 private:
  std::optional<element_type> reservoir_;
  W total_{};
};

namespace detail {
inline std::size_t heap_bytes(const BigInt& value) {
  const auto& backend = value.backend();
  return backend.capacity() > backend.internal_limb_count
             ? backend.capacity() * sizeof(boost::multiprecision::limb_type)
             : 0;
}
inline std::size_t heap_bytes(double) { return 0; }
}  // namespace detail

template <SamplerWeight W>
std::size_t UnitSampler<W>::state_bytes() const noexcept {
  std::size_t bytes = sizeof(*this) + detail::heap_bytes(total_);
  if (reservoir_) bytes += detail::heap_bytes(reservoir_->weight);
  return bytes;
}

static_assert(UnitSamplerLike<UnitSampler<ExactWeight>>);
static_assert(UnitSamplerLike<UnitSampler<FloatWeight>>);

}  // namespace cascade

#pragma once

// Domain types shared by every sampler: element identities, the two weight
// modes, structured errors and stream-level validation.

#include <boost/multiprecision/cpp_int.hpp>

#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cascade {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Weight representation in ExactInteger mode: unbounded positive integers.
using ExactWeight = BigInt;
/// Weight representation in Float64 mode.
using FloatWeight = double;

enum class WeightMode { ExactInteger, Float64 };

template <class W>
concept SamplerWeight = std::same_as<W, ExactWeight> || std::same_as<W, FloatWeight>;

template <SamplerWeight W>
inline constexpr WeightMode mode_of =
    std::same_as<W, ExactWeight> ? WeightMode::ExactInteger : WeightMode::Float64;

std::string_view to_string(WeightMode mode);
std::optional<WeightMode> parse_weight_mode(std::string_view text);

enum class ErrorCode {
  NonPositiveWeight,
  NonIntegerWeight,
  MalformedWeight,
  DuplicateId,
  InvalidK,
  TooFewElements,
  BudgetExceeded,
  InvalidConfig,
  Overflow,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Opaque identity of a stream element, unique within one stream.
enum class ElementId : std::uint64_t {};

constexpr std::uint64_t to_index(ElementId id) noexcept { return static_cast<std::uint64_t>(id); }

template <SamplerWeight W>
struct WeightedElement {
  ElementId id{};
  W weight{};

  friend bool operator==(const WeightedElement&, const WeightedElement&) = default;
};

using ExactElement = WeightedElement<ExactWeight>;
using FloatElement = WeightedElement<FloatWeight>;

/// Parses a decimal literal (sign, digits, optional fraction, optional
/// exponent) into an exact rational. Returns nullopt on malformed text.
std::optional<BigRational> parse_decimal(std::string_view literal);

/// Converts a weight literal into the representation of mode W, enforcing
/// strict positivity and, in ExactInteger mode, integrality.
template <SamplerWeight W>
W parse_weight(std::string_view literal);

template <>
ExactWeight parse_weight<ExactWeight>(std::string_view literal);
template <>
FloatWeight parse_weight<FloatWeight>(std::string_view literal);

/// Turns raw (id, weight literal) pairs into WeightedElements, interning ids
/// and rejecting duplicates within the stream.
template <SamplerWeight W>
class StreamValidator {
 public:
  WeightedElement<W> validate(std::string_view id, std::string_view weight_literal) {
    W weight = parse_weight<W>(weight_literal);
    std::string key(id);
    if (ids_.contains(key)) {
      throw Error(ErrorCode::DuplicateId, "duplicate element id '" + key + "'");
    }
    const auto element_id = ElementId{names_.size()};
    ids_.emplace(key, element_id);
    names_.push_back(std::move(key));
    return {element_id, std::move(weight)};
  }

  const std::string& name(ElementId id) const { return names_.at(to_index(id)); }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::unordered_map<std::string, ElementId> ids_;
  std::vector<std::string> names_;
};

/// Exact decimal rendering of a weight. Float weights use the shortest
/// round-trip representation.
std::string format_weight(const ExactWeight& weight);
std::string format_weight(FloatWeight weight);

inline double to_double(const ExactWeight& w) { return w.convert_to<double>(); }
inline double to_double(FloatWeight w) { return w; }

}  // namespace cascade

#include "cascade/core.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace cascade {

std::string_view to_string(WeightMode mode) {
  return mode == WeightMode::ExactInteger ? "int" : "float";
}

std::optional<WeightMode> parse_weight_mode(std::string_view text) {
  if (text == "int") return WeightMode::ExactInteger;
  if (text == "float") return WeightMode::Float64;
  return std::nullopt;
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::NonIntegerWeight: return "NonIntegerWeight";
    case ErrorCode::MalformedWeight: return "MalformedWeight";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::TooFewElements: return "TooFewElements";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Overflow: return "Overflow";
  }
  return "Unknown";
}

namespace {

// Exponents beyond this are rejected rather than materialized as huge integers.
constexpr long kMaxDecimalExponent = 4096;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

std::optional<BigRational> parse_decimal(std::string_view s) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < s.size() && (s[pos] == '+' || s[pos] == '-')) {
    negative = s[pos] == '-';
    ++pos;
  }
  BigInt mantissa = 0;
  long scale = 0;
  std::size_t digits = 0;
  while (pos < s.size() && is_digit(s[pos])) {
    mantissa = mantissa * 10 + (s[pos] - '0');
    ++pos;
    ++digits;
  }
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && is_digit(s[pos])) {
      mantissa = mantissa * 10 + (s[pos] - '0');
      --scale;
      ++pos;
      ++digits;
    }
  }
  if (digits == 0) return std::nullopt;
  if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
    ++pos;
    long exponent = 0;
    const auto* first = s.data() + pos;
    const auto* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto [end, ec] = std::from_chars(first, last, exponent);
    if (ec != std::errc{} || end != last || first == last) return std::nullopt;
    if (exponent > kMaxDecimalExponent || exponent < -kMaxDecimalExponent) return std::nullopt;
    scale += exponent;
    pos = s.size();
  }
  if (pos != s.size()) return std::nullopt;

  BigInt power = 1;
  for (long i = 0; i < (scale < 0 ? -scale : scale); ++i) power *= 10;
  BigRational value = scale >= 0 ? BigRational(mantissa * power) : BigRational(mantissa, power);
  return negative ? BigRational(-value) : value;
}

template <>
ExactWeight parse_weight<ExactWeight>(std::string_view literal) {
  auto value = parse_decimal(literal);
  if (!value) {
    throw Error(ErrorCode::MalformedWeight, "malformed weight '" + std::string(literal) + "'");
  }
  if (*value <= 0) {
    throw Error(ErrorCode::NonPositiveWeight,
                "weight must be positive, got '" + std::string(literal) + "'");
  }
  if (boost::multiprecision::denominator(*value) != 1) {
    throw Error(ErrorCode::NonIntegerWeight,
                "integer mode requires integral weights, got '" + std::string(literal) + "'");
  }
  return boost::multiprecision::numerator(*value);
}

template <>
FloatWeight parse_weight<FloatWeight>(std::string_view literal) {
  if (!parse_decimal(literal)) {
    throw Error(ErrorCode::MalformedWeight, "malformed weight '" + std::string(literal) + "'");
  }
  const auto* first = literal.data();
  if (!literal.empty() && *first == '+') ++first;
  double value = 0.0;
  auto [end, ec] = std::from_chars(first, literal.data() + literal.size(), value);
  if (ec == std::errc::result_out_of_range || !std::isfinite(value)) {
    throw Error(ErrorCode::Overflow, "weight '" + std::string(literal) + "' is not a finite double");
  }
  if (ec != std::errc{} || end != literal.data() + literal.size()) {
    throw Error(ErrorCode::MalformedWeight, "malformed weight '" + std::string(literal) + "'");
  }
  if (!(value > 0.0)) {
    throw Error(ErrorCode::NonPositiveWeight,
                "weight must be positive, got '" + std::string(literal) + "'");
  }
  return value;
}

std::string format_weight(const ExactWeight& weight) { return weight.str(); }

std::string format_weight(FloatWeight weight) {
  std::array<char, 64> buffer{};
  auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), weight);
  return std::string(buffer.data(), end);
}

}  // namespace cascade

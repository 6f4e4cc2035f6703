#pragma once

// Stream ingestion: `id,weight` CSV lines or JSON-lines records, detected
// from the first non-blank byte.

#include "cascade/core.hpp"

#include <istream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cascade::io {

enum class InputFormat { Csv, JsonLines };

struct RawRecord {
  std::size_t line = 0;
  std::string id;
  std::string weight;
};

/// Malformed input, tagged with the 1-based line it came from.
class InputError : public std::runtime_error {
 public:
  InputError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

InputFormat detect_format(std::string_view text);

/// Splits text into raw records. Blank lines are skipped, as is a leading
/// `id,weight` CSV header. Throws InputError.
std::vector<RawRecord> read_records(std::string_view text, InputFormat format);

template <SamplerWeight W>
struct ParsedStream {
  std::vector<WeightedElement<W>> elements;
  StreamValidator<W> validator;
};

/// Reads and validates a whole stream; validation failures become
/// InputErrors naming the offending line.
template <SamplerWeight W>
ParsedStream<W> parse_stream(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  ParsedStream<W> parsed;
  for (const auto& record : read_records(text, detect_format(text))) {
    try {
      parsed.elements.push_back(parsed.validator.validate(record.id, record.weight));
    } catch (const Error& e) {
      throw InputError(record.line, std::string(to_string(e.code())) + ": " + e.what());
    }
  }
  return parsed;
}

/// Comma-separated positive integer weights for command-line flags; each
/// item is a decimal literal or a power of two written `2^N`.
std::vector<ExactWeight> parse_weight_list(std::string_view text);

}  // namespace cascade::io

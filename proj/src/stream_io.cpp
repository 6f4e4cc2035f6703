#include "cascade/stream_io.hpp"

#include "json.hpp"

#include <charconv>

namespace cascade::io {

namespace {

constexpr std::string_view kBlank = " \t\r\n\f\v";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(kBlank);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(kBlank) - first + 1);
}

bool valid_id(std::string_view id) {
  return !id.empty() && id.find_first_of(kBlank) == std::string_view::npos &&
         id.find(',') == std::string_view::npos;
}

RawRecord parse_csv_line(std::size_t line, std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) throw InputError(line, "expected 'id,weight'");
  const auto id = trim(text.substr(0, comma));
  const auto weight = trim(text.substr(comma + 1));
  if (weight.find(',') != std::string_view::npos) throw InputError(line, "too many fields");
  if (!valid_id(id)) throw InputError(line, "invalid element id '" + std::string(id) + "'");
  if (weight.empty()) throw InputError(line, "missing weight");
  return {line, std::string(id), std::string(weight)};
}

RawRecord parse_json_line(std::size_t line, std::string_view text) {
  const auto record = nlohmann::json::parse(text, nullptr, false);
  if (record.is_discarded() || !record.is_object()) throw InputError(line, "expected a JSON object");
  if (!record.contains("id") || !record.contains("weight")) {
    throw InputError(line, "record needs 'id' and 'weight'");
  }
  const auto& id = record["id"];
  std::string id_text;
  if (id.is_string()) {
    id_text = id.get<std::string>();
  } else if (id.is_number_integer()) {
    id_text = id.dump();
  } else {
    throw InputError(line, "'id' must be a string or an integer");
  }
  if (!valid_id(id_text)) throw InputError(line, "invalid element id '" + id_text + "'");

  const auto& weight = record["weight"];
  std::string weight_text;
  if (weight.is_string()) {
    weight_text = weight.get<std::string>();
  } else if (weight.is_number()) {
    weight_text = weight.dump();
  } else {
    throw InputError(line, "'weight' must be a number or a decimal string");
  }
  return {line, std::move(id_text), std::move(weight_text)};
}

}  // namespace

InputFormat detect_format(std::string_view text) {
  const auto first = text.find_first_not_of(kBlank);
  return first != std::string_view::npos && text[first] == '{' ? InputFormat::JsonLines
                                                               : InputFormat::Csv;
}

std::vector<RawRecord> read_records(std::string_view text, InputFormat format) {
  std::vector<RawRecord> records;
  std::size_t line = 0;
  std::size_t start = 0;
  bool header_allowed = true;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto content = trim(text.substr(start, end - start));
    ++line;
    start = end + 1;
    if (content.empty()) continue;
    if (format == InputFormat::Csv) {
      if (header_allowed && content == "id,weight") {
        header_allowed = false;
        continue;
      }
      records.push_back(parse_csv_line(line, content));
    } else {
      records.push_back(parse_json_line(line, content));
    }
    header_allowed = false;
  }
  return records;
}

std::vector<ExactWeight> parse_weight_list(std::string_view text) {
  std::vector<ExactWeight> weights;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const auto item = trim(text.substr(start, end - start));
    if (item.starts_with("2^")) {
      unsigned exponent = 0;
      const auto digits = item.substr(2);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), exponent);
      if (ec != std::errc{} || ptr != digits.data() + digits.size() || exponent > 4096) {
        throw Error(ErrorCode::MalformedWeight, "malformed weight '" + std::string(item) + "'");
      }
      weights.push_back(ExactWeight(1) << exponent);
    } else {
      weights.push_back(parse_weight<ExactWeight>(item));
    }
    start = end + 1;
  }
  return weights;
}

}  // namespace cascade::io

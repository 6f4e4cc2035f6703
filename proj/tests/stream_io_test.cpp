#include "cascade/stream_io.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace cascade::io {
namespace {

template <SamplerWeight W = ExactWeight>
ParsedStream<W> parse(const std::string& text) {
  std::istringstream in(text);
  return parse_stream<W>(in);
}

std::size_t error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return 0;
}

TEST(DetectFormat, FirstNonBlankByte) {
  EXPECT_EQ(detect_format("a,1\n"), InputFormat::Csv);
  EXPECT_EQ(detect_format("\n  {\"id\":\"a\",\"weight\":1}\n"), InputFormat::JsonLines);
  EXPECT_EQ(detect_format(""), InputFormat::Csv);
}

TEST(Csv, ParsesRecordsSkippingHeaderAndBlanks) {
  const auto parsed = parse("id,weight\n\na, 3\n b ,10\r\n\n");
  ASSERT_EQ(parsed.elements.size(), 2u);
  EXPECT_EQ(parsed.elements[0].weight, 3);
  EXPECT_EQ(parsed.elements[1].weight, 10);
  EXPECT_EQ(parsed.validator.name(parsed.elements[1].id), "b");
}

TEST(Csv, HeaderOnlyAtTop) {
  EXPECT_EQ(error_line("a,1\nid,weight\n"), 2u);
}

TEST(Csv, ReportsOffendingLine) {
  EXPECT_EQ(error_line("a,1\nb,-1\n"), 2u);
  EXPECT_EQ(error_line("a,1\n\nb\n"), 3u);
  EXPECT_EQ(error_line("a,1,2\n"), 1u);
  EXPECT_EQ(error_line("a b,1\n"), 1u);
  EXPECT_EQ(error_line("a,1\na,2\n"), 2u);
  EXPECT_EQ(error_line("a,1.5\n"), 1u);
  EXPECT_EQ(error_line("a,\n"), 1u);
}

TEST(Csv, ErrorMessageNamesCode) {
  try {
    parse("a,1\nb,0\n");
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("NonPositiveWeight"), std::string::npos);
  }
}

TEST(Csv, HugeIntegerWeights) {
  const auto parsed = parse("a,123456789012345678901234567890\n");
  EXPECT_EQ(parsed.elements[0].weight, ExactWeight("123456789012345678901234567890"));
}

TEST(Csv, FloatMode) {
  const auto parsed = parse<FloatWeight>("a,0.25\nb,1e3\n");
  EXPECT_EQ(parsed.elements[0].weight, 0.25);
  EXPECT_EQ(parsed.elements[1].weight, 1000.0);
  EXPECT_THROW(parse<FloatWeight>("a,1e400\n"), InputError);
}

TEST(JsonLines, MatchesCsv) {
  const auto csv = parse("a,3\n7,5\n");
  const auto jsonl = parse("{\"id\":\"a\",\"weight\":3}\n{\"id\":7,\"weight\":\"5\"}\n");
  EXPECT_EQ(csv.elements, jsonl.elements);
  EXPECT_EQ(jsonl.validator.name(jsonl.elements[1].id), "7");
}

TEST(JsonLines, ScientificIntegerWeight) {
  const auto parsed = parse("{\"id\":\"a\",\"weight\":1e20}\n");
  EXPECT_EQ(parsed.elements[0].weight, ExactWeight("100000000000000000000"));
}

TEST(JsonLines, ReportsOffendingLine) {
  EXPECT_EQ(error_line("{\"id\":\"a\",\"weight\":1}\n{\"id\":\"b\"}\n"), 2u);
  EXPECT_EQ(error_line("{\"id\":\"a\",\"weight\":1}\nnot json\n"), 2u);
  EXPECT_EQ(error_line("{\"id\":[1],\"weight\":1}\n"), 1u);
  EXPECT_EQ(error_line("{\"id\":\"a\",\"weight\":true}\n"), 1u);
  EXPECT_EQ(error_line("{\"id\":\"a\",\"weight\":-2}\n"), 1u);
}

TEST(WeightList, DecimalsAndPowersOfTwo) {
  const auto weights = parse_weight_list("1, 1,2^40");
  ASSERT_EQ(weights.size(), 3u);
  EXPECT_EQ(weights[2], ExactWeight(1) << 40);
  EXPECT_THROW(parse_weight_list("1,,2"), Error);
  EXPECT_THROW(parse_weight_list("2^x"), Error);
  EXPECT_THROW(parse_weight_list("0"), Error);
}

}  // namespace
}  // namespace cascade::io

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "leafkit/config.hpp"
#include "leafkit/error.hpp"
#include "leafkit/report.hpp"

using namespace leafkit;

namespace {

LeafRecord sample(std::int64_t id, double base) {
  IndicatorVector v;
  for (std::size_t k = 0; k < kIndicatorCount; ++k) v[k] = base + 0.25 * double(k);
  return LeafRecord::from_values(id, v);
}

}  // namespace

TEST(Report, FixedTwoDecimals) {
  EXPECT_EQ(format_fixed2(1135.99), "1135.99");
  EXPECT_EQ(format_fixed2(0.5), "0.50");
  EXPECT_EQ(format_fixed2(-0.0), "0.00");
  EXPECT_EQ(format_fixed2(2.675), "2.67");  // binary value is below the midpoint
}

TEST(Report, FullLayoutColumnOrder) {
  const std::vector<LeafRecord> r{sample(7, 1)};
  const std::string csv = render_report(r, ReportFormat::csv);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "ID,width,height,perimeter,area,round,rect,R_m,G_m,B_m,R_mean,G_mean,B_mean,"
            "R_1/3,G_1/3,B_1/3,R_2/3,G_2/3,B_2/3");
}

TEST(Report, CsvRoundTripsAtTwoDecimals) {
  const std::vector<LeafRecord> r{sample(1, 3), sample(2, 40.5)};
  const std::string csv = render_report(r, ReportFormat::csv);
  const ParsedReport back = parse_report_csv(csv);
  EXPECT_EQ(back.layout, ReportLayout::full);
  ASSERT_EQ(back.records.size(), 2u);
  EXPECT_EQ(back.records[1].id, 2);
  EXPECT_EQ(render_report(back.records, ReportFormat::csv), csv);
}

TEST(Report, ReferenceLeafRowsRoundTripByteForByte) {
  for (const char* name : {"leaf306_pred.csv", "leaf306_gt.csv"}) {
    const std::string text = read_text_file(std::filesystem::path(LEAFKIT_FIXTURES) / name);
    const ParsedReport parsed = parse_report_csv(text);
    EXPECT_EQ(parsed.layout, ReportLayout::table5);
    EXPECT_EQ(parsed.records.size(), 12u);
    EXPECT_TRUE(std::isnan(parsed.records[0].color.red().lower_tertile));
    EXPECT_EQ(render_report(parsed.records, ReportFormat::csv, ReportLayout::table5), text) << name;
  }
}

TEST(Report, JsonHasOneObjectPerRecord) {
  const std::vector<LeafRecord> r{sample(1, 3), sample(9, 4)};
  const std::string json = render_report(r, ReportFormat::json);
  EXPECT_NE(json.find("\"ID\""), std::string::npos);
  EXPECT_NE(json.find("\"G_2/3\""), std::string::npos);
}

TEST(Report, MalformedCsvIsAParseError) {
  EXPECT_THROW(parse_report_csv("ID,width\n1,2\n"), ParseError);
  const std::vector<LeafRecord> r{sample(1, 3)};
  std::string csv = render_report(r, ReportFormat::csv);
  csv += "2,abc\n";
  try {
    parse_report_csv(csv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Report, NonFiniteRecordsAreRejected) {
  IndicatorVector v{};
  v[3] = std::nan("");
  EXPECT_THROW(LeafRecord::from_values(1, v).validate(), ValidationError);
}

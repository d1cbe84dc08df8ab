#include "leafkit/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "leafkit/error.hpp"

namespace leafkit {

namespace {

std::size_t column_count(ReportLayout layout) {
  return layout == ReportLayout::full ? kIndicatorCount : 12;
}

std::string header_line(ReportLayout layout) {
  std::string line = "ID";
  for (std::size_t k = 0; k < column_count(layout); ++k) {
    line += ',';
    line += indicator_name(static_cast<Indicator>(k));
  }
  return line;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, std::size_t column) {
  T value{};
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    throw ParseError("invalid number '" + std::string(field) + "'", line, column);
  return value;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + std::string(name) + "'");
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string render_report(std::span<const LeafRecord> records, ReportFormat format,
                          ReportLayout layout) {
  const std::size_t cols = column_count(layout);
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << header_line(layout) << '\n';
    for (const auto& r : records) {
      const IndicatorVector v = r.values();
      out << r.id;
      for (std::size_t k = 0; k < cols; ++k) out << ',' << format_fixed2(v[k]);
      out << '\n';
    }
    return out.str();
  }
  out << '[';
  for (std::size_t i = 0; i < records.size(); ++i) {
    const IndicatorVector v = records[i].values();
    out << (i ? ",\n  " : "\n  ") << "{\"ID\": " << records[i].id;
    for (std::size_t k = 0; k < cols; ++k)
      out << ", \"" << indicator_name(static_cast<Indicator>(k)) << "\": " << format_fixed2(v[k]);
    out << '}';
  }
  out << (records.empty() ? "]\n" : "\n]\n");
  return out.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), std::streamsize(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_report(std::span<const LeafRecord> records, const std::filesystem::path& path,
                  ReportFormat format, ReportLayout layout) {
  write_text_file(path, render_report(records, format, layout));
}

ParsedReport parse_report_csv(std::string_view text) {
  ParsedReport report;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!have_header) {
      if (line == header_line(ReportLayout::full)) {
        report.layout = ReportLayout::full;
      } else if (line == header_line(ReportLayout::table5)) {
        report.layout = ReportLayout::table5;
      } else {
        throw ParseError("unrecognized report header", line_no, 1);
      }
      have_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    const std::size_t cols = column_count(report.layout);
    if (fields.size() != cols + 1)
      throw ParseError("expected " + std::to_string(cols + 1) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no, 1);
    IndicatorVector v;
    v.fill(std::nan(""));
    std::size_t column = 1;
    const auto id = parse_number<std::int64_t>(fields[0], line_no, column);
    for (std::size_t k = 0; k < cols; ++k) {
      column += fields[k].size() + 1;
      v[k] = parse_number<double>(fields[k + 1], line_no, column);
    }
    report.records.push_back(LeafRecord::from_values(id, v));
  }
  if (!have_header) throw ParseError("empty report", 1, 1);
  return report;
}

ParsedReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_report_csv(ss.str());
}

}  // namespace leafkit

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/record.hpp"

namespace leafkit {

enum class ReportFormat { csv, json };

/// `full` writes all 18 indicators. `table5` writes the 13-column layout
/// without the tertiles (ID through B_mean).
enum class ReportLayout { full, table5 };

ReportFormat parse_report_format(std::string_view name);

/// Fixed two-decimal rendering used by every report.
std::string format_fixed2(double value);

std::string render_report(std::span<const LeafRecord> records, ReportFormat format,
                          ReportLayout layout = ReportLayout::full);

/// Throws IoError when the file cannot be written.
void write_report(std::span<const LeafRecord> records, const std::filesystem::path& path,
                  ReportFormat format, ReportLayout layout = ReportLayout::full);

struct ParsedReport {
  std::vector<LeafRecord> records;
  ReportLayout layout{ReportLayout::full};
};

/// Reads a CSV report in either layout. With `table5` the tertile fields are NaN.
ParsedReport parse_report_csv(std::string_view text);
ParsedReport read_report_csv(const std::filesystem::path& path);

/// Writes text to a file or throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace leafkit

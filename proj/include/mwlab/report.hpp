#pragma once

// Report rows, the CSV format shared by every suite, and JSON summaries.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace mwlab {

struct ReportRecord {
  std::string suite;
  std::string case_id;
  int resolution = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = 0.0;
  std::string witness;
  bool pass = true;
};

/// Record with constant = lhs / rhs (0 when rhs = 0).
ReportRecord make_record(std::string suite, std::string case_id, int resolution, double lhs, double rhs,
                         std::string witness, bool pass);

inline constexpr std::string_view kCsvHeader = "suite,case_id,resolution,lhs,rhs,constant,witness,pass";

/// Orders by (suite, case_id, resolution).
void sort_records(std::vector<ReportRecord>& rows);
std::string to_csv(const std::vector<ReportRecord>& rows);
/// Throws ConfigError on a bad header or malformed row.
std::vector<ReportRecord> records_from_csv(std::string_view text);

struct Summary {
  std::string suite;
  std::size_t cases = 0;
  double max_constant = 0.0;
  double min_constant = 0.0;
  /// Largest two-sided ratio between the maximum constants of consecutive
  /// resolutions; 1 for a single resolution.
  double stability_factor = 1.0;
  bool pass = true;

  nlohmann::json to_json() const;
};

/// Summary of rows from one suite. Only finite constants enter the extremes.
Summary summarize(const std::string& suite, const std::vector<ReportRecord>& rows);
/// Per-suite summaries of a merged row set, ordered by suite name.
std::vector<Summary> merge_summaries(const std::vector<ReportRecord>& rows);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace mwlab

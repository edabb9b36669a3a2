#include "mwlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "mwlab/errors.hpp"
#include "mwlab/grid_io.hpp"

namespace mwlab {

ReportRecord make_record(std::string suite, std::string case_id, int resolution, double lhs, double rhs,
                         std::string witness, bool pass) {
  ReportRecord r;
  r.suite = std::move(suite);
  r.case_id = std::move(case_id);
  r.resolution = resolution;
  r.lhs = lhs;
  r.rhs = rhs;
  r.constant = rhs > 0.0 ? lhs / rhs : 0.0;
  r.witness = std::move(witness);
  r.pass = pass;
  return r;
}

void sort_records(std::vector<ReportRecord>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRecord& a, const ReportRecord& b) {
    return std::tie(a.suite, a.case_id, a.resolution) < std::tie(b.suite, b.case_id, b.resolution);
  });
}

namespace {

std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> split_row(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  return fields;
}

double parse_number(const std::string& s, std::size_t line) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("csv line " + std::to_string(line) + ": '" + s + "' is not a number");
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

}  // namespace

std::string to_csv(const std::vector<ReportRecord>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += quote(r.suite) + ',' + quote(r.case_id) + ',' + std::to_string(r.resolution) + ',' + number(r.lhs) + ',' +
           number(r.rhs) + ',' + number(r.constant) + ',' + quote(r.witness) + ',' + (r.pass ? "true" : "false") +
           '\n';
  }
  return out;
}

std::vector<ReportRecord> records_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw ConfigError("csv header must be exactly '" + std::string(kCsvHeader) + "'");
  }
  std::vector<ReportRecord> rows;
  std::size_t number_line = 1;
  while (std::getline(in, line)) {
    ++number_line;
    if (line.empty()) continue;
    const auto f = split_row(line);
    if (f.size() != 8) throw ConfigError("csv line " + std::to_string(number_line) + ": expected 8 fields");
    ReportRecord r;
    r.suite = f[0];
    r.case_id = f[1];
    r.resolution = static_cast<int>(parse_number(f[2], number_line));
    r.lhs = parse_number(f[3], number_line);
    r.rhs = parse_number(f[4], number_line);
    r.constant = parse_number(f[5], number_line);
    r.witness = f[6];
    if (f[7] != "true" && f[7] != "false") {
      throw ConfigError("csv line " + std::to_string(number_line) + ": pass must be true or false");
    }
    r.pass = f[7] == "true";
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json Summary::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["cases"] = cases;
  j["max_constant"] = max_constant;
  j["min_constant"] = min_constant;
  j["stability_factor"] = stability_factor;
  j["pass"] = pass;
  return j;
}

Summary summarize(const std::string& suite, const std::vector<ReportRecord>& rows) {
  Summary s;
  s.suite = suite;
  std::set<std::string> ids;
  std::map<int, double> level_max;
  bool any = false;
  for (const auto& r : rows) {
    if (r.suite != suite) continue;
    ids.insert(r.case_id);
    s.pass = s.pass && r.pass;
    if (!std::isfinite(r.constant)) continue;
    if (!any) {
      s.max_constant = s.min_constant = r.constant;
      any = true;
    } else {
      s.max_constant = std::max(s.max_constant, r.constant);
      s.min_constant = std::min(s.min_constant, r.constant);
    }
    auto [it, inserted] = level_max.emplace(r.resolution, r.constant);
    if (!inserted) it->second = std::max(it->second, r.constant);
  }
  s.cases = ids.size();
  double prev = 0.0;
  bool have_prev = false;
  for (const auto& [level, value] : level_max) {
    (void)level;
    if (have_prev && prev > 0.0 && value > 0.0) {
      s.stability_factor = std::max(s.stability_factor, std::max(value / prev, prev / value));
    }
    prev = value;
    have_prev = true;
  }
  return s;
}

std::vector<Summary> merge_summaries(const std::vector<ReportRecord>& rows) {
  std::set<std::string> suites;
  for (const auto& r : rows) suites.insert(r.suite);
  std::vector<Summary> out;
  for (const auto& s : suites) out.push_back(summarize(s, rows));
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputeError("cannot write " + path.string());
  out << text;
  if (!out) throw ComputeError("write failed for " + path.string());
}

}  // namespace mwlab

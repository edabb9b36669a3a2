#include "mwlab/grid_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mwlab/errors.hpp"

namespace mwlab {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

nlohmann::json grid_header(const Grid& grid) {
  return nlohmann::json{{"d", grid.dimension()}, {"L", grid.level()}};
}

Grid grid_from_header(const nlohmann::json& header) {
  if (!header.contains("d") || !header.contains("L")) throw ConfigError("grid header needs keys d and L");
  return Grid::make(header.at("d").get<int>(), header.at("L").get<int>());
}

std::string to_csv(const GridFunction& f) {
  std::string out = "index,value\n";
  out.reserve(out.size() + f.size() * 24);
  for (std::size_t i = 0; i < f.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_double(f[i]);
    out += '\n';
  }
  return out;
}

GridFunction from_csv(const Grid& grid, std::string_view csv) {
  std::vector<double> values(grid.cell_count(), 0.0);
  std::vector<bool> seen(values.size(), false);
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < csv.size()) {
    std::size_t end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    std::string_view line = csv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || (line_no == 1 && line.starts_with("index"))) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ConfigError("csv line " + std::to_string(line_no) + ": missing comma");
    std::size_t index = 0;
    double value = 0.0;
    const auto r1 = std::from_chars(line.data(), line.data() + comma, index);
    const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), value);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) {
      throw ConfigError("csv line " + std::to_string(line_no) + ": cannot parse");
    }
    if (index >= values.size()) throw ConfigError("csv line " + std::to_string(line_no) + ": index out of range");
    values[index] = value;
    seen[index] = true;
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) throw ConfigError("csv is missing cell " + std::to_string(i));
  }
  return GridFunction(grid, std::move(values));
}

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::filesystem::path with_suffix(std::filesystem::path stem, const char* ext) {
  stem += ext;
  return stem;
}

}  // namespace

void write_grid_function(const std::filesystem::path& stem, const GridFunction& f) {
  spit(with_suffix(stem, ".csv"), to_csv(f));
  spit(with_suffix(stem, ".json"), grid_header(f.grid()).dump(2) + "\n");
}

GridFunction read_grid_function(const std::filesystem::path& stem) {
  const auto header = nlohmann::json::parse(slurp(with_suffix(stem, ".json")));
  return from_csv(grid_from_header(header), slurp(with_suffix(stem, ".csv")));
}

void write_weight_bundle(const std::filesystem::path& dir, const std::string& name,
                         const std::vector<Weight>& weights, const nlohmann::json& manifest) {
  if (weights.empty()) throw ConfigError("weight bundle must hold at least one weight");
  std::filesystem::create_directories(dir);
  nlohmann::json doc;
  doc["grid"] = grid_header(weights.front().grid());
  doc["manifest"] = manifest;
  doc["files"] = nlohmann::json::array();
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const std::string file = name + "_" + std::to_string(i + 1) + ".csv";
    spit(dir / file, to_csv(weights[i].function()));
    doc["files"].push_back(file);
  }
  spit(dir / (name + ".json"), doc.dump(2) + "\n");
}

std::vector<Weight> read_weight_bundle(const std::filesystem::path& dir, const std::string& name) {
  const auto doc = nlohmann::json::parse(slurp(dir / (name + ".json")));
  const Grid grid = grid_from_header(doc.at("grid"));
  std::vector<Weight> out;
  for (const auto& file : doc.at("files")) {
    out.emplace_back(from_csv(grid, slurp(dir / file.get<std::string>())));
  }
  return out;
}

}  // namespace mwlab

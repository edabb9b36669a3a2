#pragma once

// GridFunction serialization: a flat CSV of (index,value) rows plus a JSON
// header carrying the grid shape. Values are written in shortest round-trip
// form, so write followed by read reproduces every bit.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mwlab/grid.hpp"

namespace mwlab {

std::string format_double(double value);

nlohmann::json grid_header(const Grid& grid);
Grid grid_from_header(const nlohmann::json& header);

std::string to_csv(const GridFunction& f);
GridFunction from_csv(const Grid& grid, std::string_view csv);

/// Writes <stem>.csv and <stem>.json.
void write_grid_function(const std::filesystem::path& stem, const GridFunction& f);
GridFunction read_grid_function(const std::filesystem::path& stem);

/// Writes one CSV per weight (<dir>/<name>_<i>.csv) and <dir>/<name>.json
/// holding the grid header, the supplied manifest, and the file list.
void write_weight_bundle(const std::filesystem::path& dir, const std::string& name,
                         const std::vector<Weight>& weights, const nlohmann::json& manifest);
std::vector<Weight> read_weight_bundle(const std::filesystem::path& dir, const std::string& name);

}  // namespace mwlab

#include "mwlab/config.hpp"

#include "mwlab/errors.hpp"
#include "mwlab/grid.hpp"
#include "mwlab/report.hpp"

namespace mwlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError("config." + path + ": " + message);
}

const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) fail(path + key, "missing required field");
  return j.at(key);
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

GridSpec parse_grid(const json& j) {
  if (!j.is_object()) fail("grid", "expected an object");
  GridSpec g;
  g.d = as_int(member(j, "d", "grid."), "grid.d");
  g.L = as_int(member(j, "L", "grid."), "grid.L");
  try {
    (void)Grid::make(g.d, g.L);
  } catch (const ConfigError& e) {
    fail("grid", e.what());
  }
  if (j.contains("levels")) {
    const auto& lv = j.at("levels");
    if (!lv.is_array() || lv.empty()) fail("grid.levels", "expected a nonempty array of levels");
    for (std::size_t i = 0; i < lv.size(); ++i) {
      const int L = as_int(lv[i], "grid.levels[" + std::to_string(i) + "]");
      try {
        (void)Grid::make(g.d, L);
      } catch (const ConfigError& e) {
        fail("grid.levels[" + std::to_string(i) + "]", e.what());
      }
      if (!g.levels.empty() && L <= g.levels.back()) fail("grid.levels", "levels must increase");
      g.levels.push_back(L);
    }
  } else {
    g.levels = {g.L};
  }
  return g;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  ExperimentConfig c;
  c.raw = j;
  const auto& schema = member(j, "schema", "");
  if (!schema.is_string() || schema.get<std::string>() != kConfigSchema) {
    fail("schema", std::string("expected \"") + kConfigSchema + "\"");
  }
  const auto& suite = member(j, "suite", "");
  if (!suite.is_string() || suite.get<std::string>().empty()) fail("suite", "expected a nonempty string");
  c.suite = suite.get<std::string>();
  const auto& seed = member(j, "seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    fail("seed", "expected a nonnegative integer");
  }
  c.seed = seed.get<std::uint64_t>();
  c.grid = parse_grid(member(j, "grid", ""));
  if (j.contains("shifted")) {
    if (!j.at("shifted").is_boolean()) fail("shifted", "expected true or false");
    c.shifted = j.at("shifted").get<bool>();
  }
  if (j.contains("cases")) {
    c.cases = as_int(j.at("cases"), "cases");
    if (c.cases < 0) fail("cases", "must be nonnegative");
  }
  if (j.contains("exponents")) {
    try {
      c.exponents = ExponentSystem::from_json(j.at("exponents"));
    } catch (const ConfigError& e) {
      fail("exponents", e.what());
    } catch (const json::exception& e) {
      fail("exponents", e.what());
    }
  }
  if (j.contains("offdiag")) {
    try {
      c.offdiag = OffDiagExponents::from_json(j.at("offdiag"));
    } catch (const ConfigError& e) {
      fail("offdiag", e.what());
    } catch (const json::exception& e) {
      fail("offdiag", e.what());
    }
  }
  if (j.contains("weights")) {
    const auto& ws = j.at("weights");
    if (!ws.is_array()) fail("weights", "expected an array of weight descriptors");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      try {
        c.weights.push_back(WeightSpec::from_json(ws[i]));
      } catch (const std::exception& e) {
        fail("weights[" + std::to_string(i) + "]", e.what());
      }
    }
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) fail("params", "expected an object");
    c.params = j.at("params");
  }
  if (j.contains("goldens")) {
    const auto& g = j.at("goldens");
    if (!g.is_object()) fail("goldens", "expected an object of numbers");
    for (const auto& [k, v] : g.items()) c.goldens[k] = as_number(v, "goldens." + k);
  }
  if (j.contains("golden_tolerance")) {
    c.golden_tolerance = as_number(j.at("golden_tolerance"), "golden_tolerance");
    if (!(c.golden_tolerance >= 0.0)) fail("golden_tolerance", "must be nonnegative");
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

double ExperimentConfig::number(const std::string& key, double fallback) const {
  if (!params.contains(key)) return fallback;
  return as_number(params.at(key), "params." + key);
}

int ExperimentConfig::integer(const std::string& key, int fallback) const {
  if (!params.contains(key)) return fallback;
  return as_int(params.at(key), "params." + key);
}

bool ExperimentConfig::flag(const std::string& key, bool fallback) const {
  if (!params.contains(key)) return fallback;
  if (!params.at(key).is_boolean()) fail("params." + key, "expected true or false");
  return params.at(key).get<bool>();
}

std::vector<double> ExperimentConfig::numbers(const std::string& key, std::vector<double> fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& a = params.at(key);
  if (!a.is_array()) fail("params." + key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_number(a[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<int> ExperimentConfig::integers(const std::string& key, std::vector<int> fallback) const {
  if (!params.contains(key)) return fallback;
  const auto& a = params.at(key);
  if (!a.is_array()) fail("params." + key, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_int(a[i], "params." + key + "[" + std::to_string(i) + "]"));
  return out;
}

const ExponentSystem& ExperimentConfig::require_exponents() const {
  if (!exponents) fail("exponents", "required by suite " + suite);
  return *exponents;
}

const OffDiagExponents& ExperimentConfig::require_offdiag() const {
  if (!offdiag) fail("offdiag", "required by suite " + suite);
  return *offdiag;
}

const WeightSpec& ExperimentConfig::weight(std::size_t i) const {
  if (i >= weights.size()) fail("weights[" + std::to_string(i) + "]", "required by suite " + suite);
  return weights[i];
}

std::string freeze_document(const ExperimentConfig& cfg, const std::map<std::string, double>& goldens) {
  json j = cfg.raw;
  j["goldens"] = json::object();
  for (const auto& [k, v] : goldens) j["goldens"][k] = v;
  return j.dump(2) + "\n";
}

std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace mwlab

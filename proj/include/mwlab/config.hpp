#pragma once

// Experiment configuration: a JSON document with schema "mwlab.experiment/1".
//
//   {
//     "schema": "mwlab.experiment/1",
//     "suite": "lemma33",
//     "seed": 20240101,
//     "grid": {"d": 1, "L": 10, "levels": [10, 11]},
//     "shifted": true,
//     "cases": 200,
//     "exponents": {"p": [2, 2], "r": [1, 1, 1]},
//     "offdiag": {"r0": 1, "p0": 2, "q0": 1, "s0": "inf", "alpha": 1},
//     "weights": [{"kind": "power", "params": {"a": -0.5}}],
//     "params": {...suite specific...},
//     "goldens": {"max_ratio": 1.234}
//   }
//
// Validation failures raise ConfigError with the offending field path.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwlab/exponents.hpp"
#include "mwlab/generators.hpp"

namespace mwlab {

inline constexpr const char* kConfigSchema = "mwlab.experiment/1";

struct GridSpec {
  int d = 1;
  int L = 8;
  /// Refinement sweep; defaults to {L}.
  std::vector<int> levels;
};

struct ExperimentConfig {
  std::string suite;
  std::uint64_t seed = 0;
  GridSpec grid;
  bool shifted = true;
  int cases = 1;
  std::optional<ExponentSystem> exponents;
  std::optional<OffDiagExponents> offdiag;
  std::vector<WeightSpec> weights;
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, double> goldens;
  double golden_tolerance = 0.01;
  /// The document as read, kept so that freezing rewrites only "goldens".
  nlohmann::json raw;

  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);

  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const;
  const ExponentSystem& require_exponents() const;
  const OffDiagExponents& require_offdiag() const;
  const WeightSpec& weight(std::size_t i) const;
};

/// The raw document with "goldens" replaced, pretty-printed.
std::string freeze_document(const ExperimentConfig& cfg, const std::map<std::string, double>& goldens);

/// Independent per-case seed derived from the run seed (splitmix64).
std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace mwlab

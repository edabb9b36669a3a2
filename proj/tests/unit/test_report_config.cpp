#include <doctest.h>

#include <filesystem>
#include <string>

#include "mwlab/config.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/report.hpp"
#include "mwlab/suites.hpp"

using namespace mwlab;

namespace {

std::string error_of(const nlohmann::json& j) {
  try {
    ExperimentConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

nlohmann::json minimal() {
  return {{"schema", kConfigSchema}, {"suite", "identity"}, {"seed", 5}, {"grid", {{"d", 1}, {"L", 6}}}};
}

}  // namespace

TEST_CASE("csv round trip") {
  std::vector<ReportRecord> rows{
      make_record("s", "b", 8, 1.5, 3.0, "plain", true),
      make_record("s", "a", 9, 0.1, 0.0, "with, comma and \"quotes\"", false),
      make_record("s", "a", 8, 1e-300, 7e300, "", true),
  };
  CHECK(rows[0].constant == 0.5);
  CHECK(rows[1].constant == 0.0);
  sort_records(rows);
  CHECK(rows[0].case_id == "a");
  CHECK(rows[0].resolution == 8);
  const std::string csv = to_csv(rows);
  CHECK(csv.rfind(std::string(kCsvHeader), 0) == 0);
  const auto back = records_from_csv(csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].suite == rows[i].suite);
    CHECK(back[i].case_id == rows[i].case_id);
    CHECK(back[i].resolution == rows[i].resolution);
    CHECK(back[i].lhs == rows[i].lhs);
    CHECK(back[i].rhs == rows[i].rhs);
    CHECK(back[i].constant == rows[i].constant);
    CHECK(back[i].witness == rows[i].witness);
    CHECK(back[i].pass == rows[i].pass);
  }
  CHECK(to_csv(back) == csv);
  CHECK_THROWS_AS(records_from_csv("bad,header\n"), ConfigError);
  CHECK_THROWS_AS(records_from_csv(std::string(kCsvHeader) + "\ns,a,notanint,1,1,1,,true\n"), ConfigError);
}

TEST_CASE("summaries") {
  std::vector<ReportRecord> rows{
      make_record("x", "a", 8, 1.0, 1.0, "", true),
      make_record("x", "b", 9, 3.0, 1.0, "", true),
      make_record("y", "a", 8, 2.0, 1.0, "", false),
      make_record("x", "c", 9, 1.0, 0.0, "", true),
  };
  rows[3].constant = std::numeric_limits<double>::infinity();
  const Summary s = summarize("x", rows);
  CHECK(s.cases == 3);
  CHECK(s.max_constant == 3.0);
  CHECK(s.min_constant == 1.0);
  CHECK(s.stability_factor == doctest::Approx(3.0));
  CHECK(s.pass);
  const auto merged = merge_summaries(rows);
  REQUIRE(merged.size() == 2);
  CHECK(merged[0].suite == "x");
  CHECK(merged[1].suite == "y");
  CHECK(!merged[1].pass);
  const auto j = s.to_json();
  for (const char* key : {"suite", "cases", "max_constant", "min_constant", "stability_factor", "pass"}) {
    CHECK(j.contains(key));
  }
}

TEST_CASE("config validation names the field") {
  CHECK(error_of(minimal()).empty());
  auto j = minimal();
  j["schema"] = "other";
  CHECK(error_of(j).find("schema") != std::string::npos);
  j = minimal();
  j["grid"]["L"] = 20;
  CHECK(error_of(j).find("grid") != std::string::npos);
  j = minimal();
  j["grid"]["d"] = 3;
  CHECK(error_of(j).find("grid") != std::string::npos);
  j = minimal();
  j["cases"] = -1;
  CHECK(error_of(j).find("cases") != std::string::npos);
  j = minimal();
  j["exponents"] = {{"p", {2, 2}}, {"r", {3, 1, 1}}};
  const std::string e = error_of(j);
  CHECK(e.find("config.exponents") != std::string::npos);
  CHECK(e.find("r_i <= p_i") != std::string::npos);
  j = minimal();
  j["offdiag"] = {{"r0", 2}, {"p0", 1}, {"q0", 1}, {"s0", "inf"}, {"alpha", 1}};
  CHECK(error_of(j).find("offdiag") != std::string::npos);
  j = minimal();
  j["weights"] = {{{"kind", 3}}};
  CHECK(error_of(j).find("weights") != std::string::npos);
  CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/mwlab.json"), ConfigError);
}

TEST_CASE("config accessors and freezing") {
  auto j = minimal();
  j["params"] = {{"band", 8.0}, {"levels", {3, 4}}, {"on", true}};
  j["goldens"] = {{"old", 1.0}};
  j["extra"] = "kept";
  const ExperimentConfig cfg = ExperimentConfig::from_json(j);
  CHECK(cfg.number("band", 1.0) == 8.0);
  CHECK(cfg.number("missing", 2.5) == 2.5);
  CHECK(cfg.integers("levels", {}) == std::vector<int>{3, 4});
  CHECK(cfg.flag("on", false));
  CHECK(cfg.grid.levels == std::vector<int>{6});
  CHECK_THROWS_AS(cfg.require_exponents(), ConfigError);

  const auto frozen = nlohmann::json::parse(freeze_document(cfg, {{"max_ratio", 1.25}}));
  CHECK(frozen["goldens"] == nlohmann::json{{"max_ratio", 1.25}});
  CHECK(frozen["extra"] == "kept");
  CHECK(frozen["params"] == j["params"]);
}

TEST_CASE("case seeds") {
  // First output of splitmix64 started at 0.
  CHECK(case_seed(0, 0) == 0xe220a8397b1dcdafull);
  CHECK(case_seed(1, 0) != case_seed(1, 1));
  CHECK(case_seed(1, 0) != case_seed(2, 0));
  CHECK(case_seed(77, 3) == case_seed(77, 3));
}

TEST_CASE("suite registry") {
  const auto names = suite_names();
  for (const char* s : {"identity", "exponents", "lemma33", "restricted_r1", "mrestricted", "composite", "sawyer", "offdiag",
                        "factorization", "endpoint", "applications"}) {
    CHECK(has_suite(s));
  }
  CHECK(names.size() == 11);
  CHECK(!has_suite("nonsense"));
  auto j = minimal();
  j["suite"] = "nonsense";
  CHECK_THROWS_AS(run_suite(ExperimentConfig::from_json(j)), ConfigError);
  CHECK(std::filesystem::path(suite_config_path("/x", "sawyer")) == std::filesystem::path("/x/sawyer.json"));
}

TEST_CASE("identity suite on a small grid") {
  auto j = minimal();
  j["params"] = {{"constants", {1.0, 0.5}}, {"indicator_cases", 4}};
  const SuiteResult r = run_suite(ExperimentConfig::from_json(j));
  CHECK(r.pass);
  CHECK(!r.rows.empty());
  for (const auto& row : r.rows) CHECK(row.suite == "identity");
}

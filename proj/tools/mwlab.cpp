#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwlab/config.hpp"
#include "mwlab/errors.hpp"
#include "mwlab/generators.hpp"
#include "mwlab/grid_io.hpp"
#include "mwlab/lorentz.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/parallel.hpp"
#include "mwlab/report.hpp"
#include "mwlab/suites.hpp"
#include "mwlab/weights.hpp"

namespace fs = std::filesystem;
using namespace mwlab;

namespace {

struct Options {
  std::string config;
  std::string config_dir = MWLAB_CONFIG_DIR;
  std::string out = "mwlab_out";
  unsigned threads = 1;
  std::optional<std::uint64_t> seed_override;

  std::string suite;
  std::vector<std::string> csvs;

  // One-shot evaluations.
  int dim = 1;
  int level = -1;
  std::string values;
  std::vector<std::string> weights;
  std::vector<std::string> specs;
  std::string mu;
  std::vector<double> p;
  std::vector<double> r;
  std::string q = "inf";
  std::string klass = "apvec";
  std::string kind = "rdf";
  int k = 6;
  double exponent = 2.0;
  bool unshifted = false;
  std::string save;
};

// Shortest round-trip text, with ".0" kept on integral values.
std::string show(double v) {
  std::string s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(what + ": '" + item + "' is not a number");
    }
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

Grid grid_for(std::size_t count, int dim, const std::string& what) {
  for (int L = 2; L <= 14; ++L) {
    if (std::size_t{1} << (L * dim) == count) return Grid::make(dim, L);
  }
  throw ConfigError(what + ": " + std::to_string(count) + " values do not fill a dyadic grid in dimension " +
                    std::to_string(dim));
}

GridFunction inline_function(const std::string& text, int dim, const std::string& what) {
  std::vector<double> vals = parse_list(text, what);
  const Grid grid = grid_for(vals.size(), dim, what);
  return GridFunction(grid, std::move(vals));
}

// Weights from --weight lists or --spec generator descriptions.
std::vector<Weight> gather_weights(const Options& o) {
  std::vector<Weight> out;
  for (const auto& w : o.weights) out.emplace_back(inline_function(w, o.dim, "--weight"));
  if (!o.specs.empty()) {
    if (o.level < 0) throw ConfigError("--spec needs --level");
    const Grid grid = Grid::make(o.dim, o.level);
    for (const auto& s : o.specs) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(s);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("--spec: ") + e.what());
      }
      const WeightVector part = generate_vector(WeightSpec::from_json(j), grid);
      out.insert(out.end(), part.weights().begin(), part.weights().end());
    }
  }
  if (out.empty()) throw ConfigError("no weights given (use --weight or --spec)");
  return out;
}

std::string join(const GridFunction& f) {
  std::string out;
  for (std::size_t i = 0; i < f.size(); ++i) out += (i ? "," : "") + format_double(f[i]);
  return out;
}

void write_outputs(const SuiteResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / (r.suite + ".csv"), to_csv(r.rows));
  write_text(dir / (r.suite + "_summary.json"), r.summary.to_json().dump(2) + "\n");
  nlohmann::json details;
  details["suite"] = r.suite;
  details["measured"] = r.measured;
  details["info"] = r.info;
  details["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) {
    details["checks"].push_back({{"name", c.name}, {"value", c.value}, {"pass", c.pass}, {"detail", c.detail}});
  }
  write_text(dir / (r.suite + "_checks.json"), details.dump(2) + "\n");
  for (const auto& [name, text] : r.attachments) write_text(dir / name, text);
}

int print_result(const SuiteResult& r) {
  std::size_t failed = 0;
  for (const auto& row : r.rows) {
    if (!row.pass) {
      if (++failed <= 10) std::cout << "  row failed: " << row.case_id << " L=" << row.resolution << " " << row.witness << "\n";
    }
  }
  for (const auto& c : r.checks) {
    std::cout << "  " << (c.pass ? "ok   " : "FAIL ") << c.name << " = " << format_double(c.value);
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << r.suite << ": " << (r.pass ? "PASS" : "FAIL") << " rows=" << r.rows.size() << " failed=" << failed
            << " max_constant=" << format_double(r.summary.max_constant)
            << " stability=" << format_double(r.summary.stability_factor) << " seconds=" << r.seconds << "\n";
  return r.pass ? 0 : 1;
}

ExperimentConfig load_config(const std::string& path, const Options& o) {
  ExperimentConfig cfg = ExperimentConfig::load(path);
  if (o.seed_override) cfg.seed = *o.seed_override;
  return cfg;
}

int run_config(const ExperimentConfig& cfg, const Options& o) {
  const SuiteResult r = run_suite(cfg);
  write_outputs(r, o.out);
  return print_result(r);
}

int cmd_freeze(const Options& o) {
  ExperimentConfig cfg = load_config(o.config, o);
  cfg.goldens.clear();
  const SuiteResult r = run_suite(cfg);
  const int status = print_result(r);
  if (status != 0) {
    std::cerr << "not freezing: the run has failing rows or checks\n";
    return status;
  }
  write_text(o.config, freeze_document(cfg, r.measured));
  std::cout << "froze " << r.measured.size() << " goldens into " << o.config << "\n";
  return 0;
}

int cmd_norm(const Options& o) {
  const GridFunction f = inline_function(o.values, o.dim, "--values");
  const Weight w = o.weights.empty() && o.specs.empty() ? Weight::ones(f.grid()) : gather_weights(o).front();
  if (o.p.size() != 1) throw ConfigError("--p: norm takes a single exponent");
  const LorentzIndex idx =
      o.q == "inf" ? LorentzIndex::weak(o.p[0]) : LorentzIndex::strong(o.p[0], parse_list(o.q, "--q").front());
  std::cout << show(lorentz_norm(f, w, idx)) << "\n";
  return 0;
}

int cmd_maximal(const Options& o) {
  const GridFunction g = inline_function(o.values, o.dim, "--values");
  const CubeFamily family(g.grid(), !o.unshifted);
  if (o.mu.empty()) {
    std::cout << join(maximal(g, family)) << "\n";
  } else {
    const Weight mu(inline_function(o.mu, o.dim, "--mu"));
    std::cout << join(maximal(g, family, &mu)) << "\n";
  }
  return 0;
}

int cmd_constant(const Options& o) {
  const WeightVector ws(gather_weights(o));
  const CubeFamily family(ws.grid(), !o.unshifted);
  ConstantEstimate est;
  if (o.klass == "a1") {
    if (o.mu.empty()) {
      est = a1_constant(ws[0], family);
    } else {
      est = a1_constant(ws[0], Weight(inline_function(o.mu, o.dim, "--mu")), family);
    }
  } else if (o.klass == "ainf") {
    est = ainf_constant(ws[0], family);
  } else if (o.klass == "apvec") {
    est = apvec_constant(ws, o.p, family);
  } else if (o.klass == "aprr1") {
    est = apr_r1_constant(ws, o.p, family);
  } else if (o.klass == "apr") {
    est = apr_constant(ws, ExponentSystem::make(o.p, o.r), family);
  } else {
    throw ConfigError("--class: unknown class '" + o.klass + "' (a1, ainf, apvec, apr, aprr1)");
  }
  std::cout << show(est.value) << "\n";
  std::cerr << "witness " << est.witness.describe() << " family " << est.family << "\n";
  return 0;
}

int cmd_construct(const Options& o) {
  const GridFunction g = inline_function(o.values, o.dim, "--values");
  const CubeFamily family(g.grid(), !o.unshifted);
  const std::optional<Weight> mu =
      o.mu.empty() ? std::nullopt : std::optional<Weight>(Weight(inline_function(o.mu, o.dim, "--mu")));
  const Weight* mu_ptr = mu ? &*mu : nullptr;
  Weight out = Weight::ones(g.grid());
  if (o.kind == "rdf") {
    const RdfResult r = rdf_iterate(g, o.k, family, mu_ptr);
    std::cerr << "K " << format_double(r.K) << "\n";
    out = r.weight;
  } else if (o.kind == "hat") {
    const Weight mu_w = mu ? *mu : Weight::ones(g.grid());
    out = hat_ar_construct(Weight::ones(g.grid()), g, o.exponent, mu_w, family).v;
  } else {
    throw ConfigError("--kind: unknown construction '" + o.kind + "' (rdf, hat)");
  }
  if (o.save.empty()) {
    std::cout << join(out.function()) << "\n";
  } else {
    write_grid_function(o.save, out.function());
  }
  return 0;
}

int cmd_report(const Options& o) {
  std::vector<ReportRecord> rows;
  for (const auto& path : o.csvs) {
    auto part = records_from_csv(read_text(path));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  nlohmann::json out = nlohmann::json::array();
  bool pass = true;
  for (const auto& s : merge_summaries(rows)) {
    out.push_back(s.to_json());
    pass = pass && s.pass;
  }
  const std::string text = out.dump(2) + "\n";
  if (o.save.empty()) {
    std::cout << text;
  } else {
    write_text(o.save, text);
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mwlab: numerical verification of multilinear weighted norm inequalities"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1u, 256u));
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--seed-override", o.seed_override, "Replace the config seed");
  app.add_option("--config-dir", o.config_dir, "Directory holding <suite>.json configs");

  auto* run = app.add_subcommand("run", "Run the suite named in a config");
  run->add_option("--config", o.config, "Experiment config")->required();
  auto* verify = app.add_subcommand("verify", "Run configs/<suite>.json");
  verify->add_option("suite", o.suite, "Suite name")->required();
  auto* freeze = app.add_subcommand("freeze", "Run a config and store its measured values as goldens");
  freeze->add_option("--config", o.config, "Experiment config")->required();
  auto* report = app.add_subcommand("report", "Merge report CSVs into per-suite JSON summaries");
  report->add_option("csv", o.csvs, "Report CSV files")->required()->check(CLI::ExistingFile);
  report->add_option("--save", o.save, "Write the JSON here instead of stdout");

  auto add_grid_options = [&](CLI::App* sub) {
    sub->add_option("--dim", o.dim, "Dimension of inline data")->check(CLI::Range(1, 2));
    sub->add_flag("--unshifted", o.unshifted, "Use only the standard dyadic lattice");
  };
  auto* norm = app.add_subcommand("norm", "Lorentz norm of inline data");
  norm->add_option("--values", o.values, "Comma separated cell values")->required();
  norm->add_option("--weight", o.weights, "Comma separated weight values");
  norm->add_option("--spec", o.specs, "Weight generator JSON");
  norm->add_option("--level", o.level, "Grid level for --spec");
  norm->add_option("--p", o.p, "Exponent p")->required()->delimiter(',');
  norm->add_option("--q", o.q, "Second index or 'inf'");
  add_grid_options(norm);
  auto* maximal_cmd = app.add_subcommand("maximal", "Dyadic maximal function of inline data");
  maximal_cmd->add_option("--values", o.values, "Comma separated cell values")->required();
  maximal_cmd->add_option("--mu", o.mu, "Comma separated measure density");
  add_grid_options(maximal_cmd);
  auto* constant = app.add_subcommand("constant", "Weight characteristic");
  constant->add_option("--class", o.klass, "a1, ainf, apvec, apr or aprr1");
  constant->add_option("--weight", o.weights, "Comma separated weight values (repeat per weight)");
  constant->add_option("--spec", o.specs, "Weight generator JSON");
  constant->add_option("--level", o.level, "Grid level for --spec");
  constant->add_option("--p", o.p, "Exponents p_i")->delimiter(',');
  constant->add_option("--r", o.r, "Exponents r_1..r_{m+1} (apr)")->delimiter(',');
  constant->add_option("--mu", o.mu, "Comma separated measure density (a1)");
  add_grid_options(constant);
  auto* construct = app.add_subcommand("construct", "Build a weight from inline data");
  construct->add_option("--kind", o.kind, "rdf or hat");
  construct->add_option("--values", o.values, "Comma separated g")->required();
  construct->add_option("--k", o.k, "Iterations (rdf)");
  construct->add_option("--r", o.exponent, "Exponent r >= 1 (hat)");
  construct->add_option("--mu", o.mu, "Comma separated measure density");
  construct->add_option("--save", o.save, "Write <stem>.csv and <stem>.json instead of stdout");
  add_grid_options(construct);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    set_thread_count(o.threads);
    if (*run) return run_config(load_config(o.config, o), o);
    if (*verify) {
      if (!has_suite(o.suite)) {
        std::string names;
        for (const auto& n : suite_names()) names += " " + n;
        throw ConfigError("unknown suite '" + o.suite + "'; known:" + names);
      }
      return run_config(load_config(suite_config_path(o.config_dir, o.suite), o), o);
    }
    if (*freeze) return cmd_freeze(o);
    if (*report) return cmd_report(o);
    if (*norm) return cmd_norm(o);
    if (*maximal_cmd) return cmd_maximal(o);
    if (*constant) return cmd_constant(o);
    if (*construct) return cmd_construct(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ComputeError& e) {
    std::cerr << "compute error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

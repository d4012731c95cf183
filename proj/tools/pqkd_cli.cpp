// Command-line front end: rate-distance sweeps and config validation.
//
// Exit codes: 0 success, 2 config or usage error, 3 numerical failure.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pqkd/errors.hpp"
#include "pqkd/sweep.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

struct Flags {
  std::string config;
  std::string output;
  std::string format;
  std::vector<std::string> modes;
  long long seed = -1;
  unsigned jobs = 1;
  bool verbose = false;
  std::string dump_lp;
};

pqkd::SweepConfig load(const Flags& f) {
  pqkd::SweepConfig cfg = f.config.empty() ? pqkd::SweepConfig{} : pqkd::load_config(f.config);
  if (!f.output.empty()) cfg.output = f.output;
  if (f.format == "csv") cfg.format = pqkd::OutputFormat::Csv;
  if (f.format == "json") cfg.format = pqkd::OutputFormat::Json;
  if (f.seed >= 0) cfg.search.seed = static_cast<std::uint64_t>(f.seed);
  if (!f.modes.empty()) {
    std::vector<pqkd::RateMode> keep;
    for (const auto& name : f.modes) {
      pqkd::RateMode m;
      try {
        m = pqkd::rate_mode_from_string(name);
      } catch (const pqkd::DomainError& e) {
        throw pqkd::ConfigError(std::string("--mode: ") + e.what());
      }
      if (std::find(cfg.modes.begin(), cfg.modes.end(), m) == cfg.modes.end()) {
        throw pqkd::ConfigError("--mode: '" + name + "' is not enabled in the config");
      }
      if (std::find(keep.begin(), keep.end(), m) == keep.end()) keep.push_back(m);
    }
    cfg.modes = keep;
  }
  return cfg;
}

int run_validate(const Flags& f) {
  const pqkd::SweepConfig cfg = load(f);
  const auto problems = pqkd::validate_config(cfg);
  if (problems.empty()) {
    std::cout << "config OK\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << "error: " << p << "\n";
  return kConfigError;
}

int run_sweep(const Flags& f) {
  const pqkd::SweepConfig cfg = load(f);
  const auto problems = pqkd::validate_config(cfg);
  if (!problems.empty()) {
    for (const auto& p : problems) std::cerr << "error: " << p << "\n";
    return kConfigError;
  }

  std::ofstream dump;
  pqkd::SweepOptions opts;
  opts.jobs = std::max(1u, f.jobs);
  if (f.verbose) opts.log = [](const std::string& msg) { std::cerr << msg << "\n"; };
  if (!f.dump_lp.empty()) {
    dump.open(f.dump_lp);
    if (!dump) throw pqkd::ConfigError("cannot write LP dump file '" + f.dump_lp + "'");
    opts.lp_dump = &dump;
  }

  const auto rows = pqkd::run_sweep(cfg, opts);

  std::ostringstream text;
  if (cfg.format == pqkd::OutputFormat::Json) {
    pqkd::write_json(text, rows);
  } else {
    pqkd::write_csv(text, rows);
  }
  if (cfg.output == "-") {
    std::cout << text.str();
  } else {
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw pqkd::ConfigError("cannot write output file '" + cfg.output + "'");
    out << text.str();
  }

  int failures = 0;
  for (const auto& r : rows) failures += pqkd::is_numerical_failure(r) ? 1 : 0;
  if (failures > 0) {
    std::cerr << "error: " << failures << " row(s) ended in a numerical failure\n";
    return kNumericalFailure;
  }
  return 0;
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("-c,--config", f.config, "JSON config file (defaults when omitted)");
  cmd->add_option("--mode", f.modes, "Restrict to these modes: finite, asymptotic, perfect_pe")
      ->delimiter(',');
  cmd->add_option("--seed", f.seed, "Override search.seed")->check(CLI::NonNegativeNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-key rates of fully passive decoy-state BB84"};
  app.require_subcommand(1);
  Flags f;

  auto* sweep = app.add_subcommand("sweep", "Run an optimized rate-distance sweep");
  add_common(sweep, f);
  sweep->add_option("-o,--output", f.output, "Output file, '-' for stdout");
  sweep->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("-j,--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_flag("-v,--verbose", f.verbose, "Progress messages on stderr");
  sweep->add_option("--dump-lp", f.dump_lp, "Write the LPs behind every reported row to this file");

  auto* validate = app.add_subcommand("validate", "Check a config without running it");
  add_common(validate, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kConfigError;
  }

  try {
    return sweep->parsed() ? run_sweep(f) : run_validate(f);
  } catch (const pqkd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  }
}

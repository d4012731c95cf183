#pragma once

// Rate-distance sweeps: configuration, the optimized sweep itself and the
// tabular output.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pqkd/channel.hpp"
#include "pqkd/keyrate.hpp"
#include "pqkd/optimizer.hpp"
#include "pqkd/protocol.hpp"
#include "pqkd/source.hpp"

namespace pqkd {

enum class OutputFormat { Csv, Json };

struct SweepConfig {
  std::vector<double> distances{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  std::vector<RateMode> modes{RateMode::Finite, RateMode::Asymptotic, RateMode::PerfectPE};
  std::vector<double> N_values{1e9, 1e10, 1e11, 1e12};  // finite mode only
  ProtocolParams protocol;  // N and q_K are set per evaluation
  ChannelParams channel;    // L is set per distance
  SearchSpace search;

  // Values pinned in the asymptotic and perfect_pe searches.
  double pinned_w = 5e-3;
  double pinned_dtheta_test = 0.1;
  double pinned_dphi_test = 0.1;

  // Warm start: samples drawn around each best point of the previous
  // distance, within +-local_scale of every range width.
  std::size_t local_samples = 20;
  double local_scale = 0.1;

  // When set, this source and q_T = 1 - protocol.q_K are used for every
  // row and nothing is searched.
  std::optional<SourceConfig> fixed_source;
  std::optional<double> fixed_w;  // set when fixed_source came from a width

  double quad_tol = 1e-9;
  std::string output = "rates.csv";
  OutputFormat format = OutputFormat::Csv;
};

/// Reads a config document. Missing keys keep their defaults; unknown keys
/// and wrong types throw ConfigError naming the key.
SweepConfig parse_config(const nlohmann::json& doc);
SweepConfig load_config(const std::string& path);

/// Dry-run checks. Returns one message per problem; empty means valid.
std::vector<std::string> validate_config(const SweepConfig& cfg);

struct SweepRow {
  double L_km = 0.0;
  RateMode mode = RateMode::Finite;
  double N = 0.0;  // 0 for the infinite-key modes
  KeyRateReport report;
  Candidate params;
  bool fixed_source = false;
};

struct SweepOptions {
  unsigned jobs = 1;
  std::function<void(const std::string&)> log;  // progress lines, may be empty
  std::ostream* lp_dump = nullptr;              // LPs of every reported row
};

/// Rows sorted by distance, then mode (finite, asymptotic, perfect_pe),
/// then N. Throws ConfigError if validate_config reports problems.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepOptions& opts = {});

/// True when the row's abort reason is a numerical failure rather than a
/// protocol abort.
bool is_numerical_failure(const SweepRow& row);

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_json(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace pqkd

#include "pqkd/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "pqkd/characterization.hpp"
#include "pqkd/errors.hpp"

namespace pqkd {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- config

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) {
    throw ConfigError("'" + (path.empty() ? std::string("<root>") : path) + "' must be an object");
  }
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* a) { return item.key() == a; });
    if (!known) throw ConfigError("unknown key '" + join(path, item.key()) + "'");
  }
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ConfigError("key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

void read_number(const json& obj, const std::string& path, const char* key, double& out) {
  if (obj.contains(key)) out = as_number(obj.at(key), join(path, key));
}

Range as_range(const json& v, const std::string& key) {
  if (v.is_number()) {
    const double x = v.get<double>();
    return {x, x};
  }
  if (!v.is_array() || v.size() != 2) {
    throw ConfigError("key '" + key + "' must be a number or a [lo, hi] pair");
  }
  return {as_number(v[0], key + "[0]"), as_number(v[1], key + "[1]")};
}

void read_range(const json& obj, const std::string& path, const char* key, Range& out) {
  if (obj.contains(key)) out = as_range(obj.at(key), join(path, key));
}

std::vector<double> as_numbers(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(as_number(v[i], key + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::vector<double> as_distances(const json& v, const std::string& key) {
  if (v.is_array()) return as_numbers(v, key);
  if (!v.is_object()) throw ConfigError("key '" + key + "' must be an array or {start, stop, step}");
  check_keys(v, key, {"start", "stop", "step"});
  for (const char* k : {"start", "stop", "step"}) {
    if (!v.contains(k)) throw ConfigError("missing key '" + join(key, k) + "'");
  }
  const double start = as_number(v.at("start"), join(key, "start"));
  const double stop = as_number(v.at("stop"), join(key, "stop"));
  const double step = as_number(v.at("step"), join(key, "step"));
  if (!(step > 0.0) || !(stop >= start) || (stop - start) / step > 1e6) {
    throw ConfigError("key '" + key + "' must satisfy step > 0 and stop >= start");
  }
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    const double x = start + static_cast<double>(i) * step;
    if (x > stop + 1e-9 * step) break;
    out.push_back(x);
  }
  return out;
}

std::vector<IntensityInterval> as_intervals(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array of [lo, hi] pairs");
  std::vector<IntensityInterval> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Range r = as_range(v[i], key + "[" + std::to_string(i) + "]");
    out.push_back({r.lo, r.hi});
  }
  return out;
}

// ----------------------------------------------------------------- sweep

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& fn) {
  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex mu;
  std::exception_ptr error;
  std::size_t error_index = n;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct Entry {
  Candidate params;
  SourceConfig source;
  double q_T = 0.0;
  SourceCharacterization chars;  // rules dropped after the rates are computed
  std::size_t first_distance = 0;
  std::vector<ExpectedRates> rates;
  std::string failure;  // set when the source could not be characterized
};

const char* quadrature_reason(QuadratureError::Kind k) {
  switch (k) {
    case QuadratureError::Kind::EmptyRegion: return "empty_region";
    case QuadratureError::Kind::ToleranceNotMet: return "quadrature_tolerance_not_met";
    case QuadratureError::Kind::Degenerate: return "quadrature_degenerate";
  }
  return "quadrature_failed";
}

class Sweeper {
public:
  Sweeper(const SweepConfig& cfg, const SweepOptions& opts) : cfg_(cfg), opts_(opts) {
    distances_ = cfg.distances;
    std::sort(distances_.begin(), distances_.end());
    distances_.erase(std::unique(distances_.begin(), distances_.end()), distances_.end());
    N_values_ = cfg.N_values;
    std::sort(N_values_.begin(), N_values_.end());
    N_values_.erase(std::unique(N_values_.begin(), N_values_.end()), N_values_.end());
    for (RateMode m : cfg.modes) {
      if (m == RateMode::Finite) finite_ = true;
      if (m == RateMode::Asymptotic) asymptotic_ = true;
      if (m == RateMode::PerfectPE) perfect_pe_ = true;
    }
    const std::size_t d_key = cfg.fixed_source ? cfg.fixed_source->key_intervals.size() : 4;
    const std::size_t d_test = cfg.fixed_source ? cfg.fixed_source->test_intervals.size() : 4;
    eps_sec_ = error_budget(static_cast<int>(d_key), static_cast<int>(d_test), cfg.protocol.eps,
                            cfg.protocol.eps_PA, cfg.protocol.delta)
                   .eps_sec;
  }

  std::vector<SweepRow> run() {
    std::vector<SweepRow> rows;
    if (cfg_.fixed_source) {
      run_fixed(rows);
    } else {
      run_search(rows);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
      if (a.L_km != b.L_km) return a.L_km < b.L_km;
      if (a.mode != b.mode) return static_cast<int>(a.mode) < static_cast<int>(b.mode);
      return a.N < b.N;
    });
    return rows;
  }

private:
  void log(const std::string& msg) const {
    if (opts_.log) opts_.log(msg);
  }

  Entry make_entry(const Candidate& c) const {
    Entry e;
    e.params = c;
    e.q_T = c.q_T;
    try {
      e.source = c.source();
    } catch (const DomainError&) {
      e.failure = "invalid_source";
    }
    return e;
  }

  void prepare(Entry& e, std::size_t first, std::size_t count) const {
    e.first_distance = first;
    if (!e.failure.empty()) return;
    try {
      e.chars = characterize(e.source, cfg_.protocol.n_cut, cfg_.quad_tol, true);
      for (std::size_t d = first; d < first + count; ++d) {
        ChannelParams ch = cfg_.channel;
        ch.L = distances_[d];
        e.rates.push_back(expected_rates(e.chars, ch));
      }
    } catch (const QuadratureError& err) {
      e.failure = quadrature_reason(err.kind());
    } catch (const DomainError&) {
      e.failure = "invalid_source";
    }
    e.chars.key_rules.clear();
    e.chars.test_rules.clear();
    e.chars.key_union_rules.clear();
    e.chars.test_union_rules.clear();
  }

  void prepare_all(std::vector<Entry>& entries, std::size_t first, std::size_t count) const {
    parallel_for(entries.size(), opts_.jobs,
                 [&](std::size_t i) { prepare(entries[i], first, count); });
  }

  KeyRateReport evaluate_entry(const Entry& e, std::size_t d, RateMode mode, double N,
                               std::ostream* dump = nullptr) const {
    KeyRateReport r;
    r.mode = mode;
    r.eps_sec = eps_sec_;
    if (!e.failure.empty()) {
      r.abort_reason = e.failure;
      return r;
    }
    ProtocolParams p = cfg_.protocol;
    if (mode == RateMode::Finite) p.N = N;
    p.q_K = 1.0 - e.q_T;
    ChannelParams ch = cfg_.channel;
    ch.L = distances_[d];
    const ObservedData obs = e.rates.at(d - e.first_distance).scaled(p.N, p.q_K);
    p.lambda_EC = ec_leakage(obs.M_key, obs.m_key, ch.f_EC);
    try {
      return evaluate(mode, e.chars, obs, p, ch, dump);
    } catch (const std::exception&) {
      r.abort_reason = "numerical_failure";
      return r;
    }
  }

  // One row per (mode, N) task over a candidate pool; returns the bests.
  struct Task {
    RateMode mode;
    double N;
  };

  std::vector<Candidate> solve_pool(const std::vector<const Entry*>& pool, std::size_t d,
                                    const std::vector<Task>& tasks, std::vector<SweepRow>& rows) {
    const std::size_t n = pool.size();
    std::vector<std::vector<double>> K(tasks.size(), std::vector<double>(n));
    std::vector<std::vector<std::string>> why(tasks.size(), std::vector<std::string>(n));
    parallel_for(n, opts_.jobs, [&](std::size_t i) {
      for (std::size_t t = 0; t < tasks.size(); ++t) {
        const auto r = evaluate_entry(*pool[i], d, tasks[t].mode, tasks[t].N);
        K[t][i] = r.K;
        why[t][i] = r.abort_reason;
      }
    });
    std::vector<Candidate> samples;
    samples.reserve(n);
    for (const Entry* e : pool) samples.push_back(e->params);

    std::vector<Candidate> centers;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      const SearchResult best = best_of(samples, K[t], why[t]);
      const Entry& e = *pool[best.best_index];
      SweepRow row;
      row.L_km = distances_[d];
      row.mode = tasks[t].mode;
      row.N = tasks[t].mode == RateMode::Finite ? tasks[t].N : 0.0;
      row.report = evaluate_entry(e, d, tasks[t].mode, tasks[t].N, dump_for(row));
      row.params = e.params;
      rows.push_back(row);
      if (!best.all_aborted &&
          std::find(centers.begin(), centers.end(), best.best) == centers.end()) {
        centers.push_back(best.best);
      }
    }
    return centers;
  }

  std::vector<Entry> locals(const SearchSpace& space, const std::vector<Candidate>& centers,
                            std::size_t d, std::uint64_t tag) const {
    std::vector<Entry> out;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      out.push_back(make_entry(centers[c]));
      for (std::size_t k = 0; k < cfg_.local_samples; ++k) {
        const std::uint64_t index = (tag << 56) | (static_cast<std::uint64_t>(d) << 32) |
                                    (static_cast<std::uint64_t>(c) << 20) | k;
        out.push_back(make_entry(
            perturb_candidate(space, centers[c], cfg_.local_scale, space.seed, index)));
      }
    }
    prepare_all(out, d, 1);
    return out;
  }

  void run_search(std::vector<SweepRow>& rows) {
    const SearchSpace& space = cfg_.search;
    const SearchSpace pinned =
        pinned_space(space, cfg_.pinned_w, cfg_.pinned_dtheta_test, cfg_.pinned_dphi_test);
    const bool infinite = asymptotic_ || perfect_pe_;

    std::vector<Entry> finite_base;
    std::vector<Entry> infinite_base;
    for (std::size_t i = 0; finite_ && i < space.budget; ++i) {
      finite_base.push_back(make_entry(sample_candidate(space, space.seed, i)));
    }
    for (std::size_t i = 0; infinite && i < pinned.budget; ++i) {
      infinite_base.push_back(make_entry(sample_candidate(pinned, pinned.seed, i)));
    }
    log("characterizing " + std::to_string(finite_base.size() + infinite_base.size()) +
        " base samples over " + std::to_string(distances_.size()) + " distances");
    prepare_all(finite_base, 0, distances_.size());
    prepare_all(infinite_base, 0, distances_.size());

    std::vector<Task> finite_tasks;
    std::vector<Task> infinite_tasks;
    for (double N : N_values_) finite_tasks.push_back({RateMode::Finite, N});
    if (asymptotic_) infinite_tasks.push_back({RateMode::Asymptotic, cfg_.protocol.N});
    if (perfect_pe_) infinite_tasks.push_back({RateMode::PerfectPE, cfg_.protocol.N});

    std::vector<Candidate> finite_centers;
    std::vector<Candidate> infinite_centers;
    for (std::size_t d = 0; d < distances_.size(); ++d) {
      if (finite_) {
        const auto extra = locals(space, finite_centers, d, 0);
        std::vector<const Entry*> pool;
        for (const auto& e : finite_base) pool.push_back(&e);
        for (const auto& e : extra) pool.push_back(&e);
        auto centers = solve_pool(pool, d, finite_tasks, rows);
        if (!centers.empty()) finite_centers = std::move(centers);
      }
      if (infinite) {
        const auto extra = locals(pinned, infinite_centers, d, 1);
        std::vector<const Entry*> pool;
        for (const auto& e : infinite_base) pool.push_back(&e);
        for (const auto& e : extra) pool.push_back(&e);
        auto centers = solve_pool(pool, d, infinite_tasks, rows);
        if (!centers.empty()) infinite_centers = std::move(centers);
      }
      std::ostringstream os;
      os << "L = " << distances_[d] << " km done";
      log(os.str());
    }
  }

  void run_fixed(std::vector<SweepRow>& rows) {
    Entry e;
    e.source = *cfg_.fixed_source;
    e.q_T = cfg_.protocol.q_T();
    e.params.w = std::numeric_limits<double>::quiet_NaN();
    e.params.q_T = e.q_T;
    e.params.nu_t = e.source.nu_t;
    e.params.dtheta_key = e.source.dtheta_key;
    e.params.dtheta_test = e.source.dtheta_test;
    e.params.dphi_test = e.source.dphi_test;
    prepare(e, 0, distances_.size());
    std::vector<Task> tasks;
    for (double N : N_values_) {
      if (finite_) tasks.push_back({RateMode::Finite, N});
    }
    if (asymptotic_) tasks.push_back({RateMode::Asymptotic, cfg_.protocol.N});
    if (perfect_pe_) tasks.push_back({RateMode::PerfectPE, cfg_.protocol.N});
    for (std::size_t d = 0; d < distances_.size(); ++d) {
      for (const Task& t : tasks) {
        SweepRow row;
        row.L_km = distances_[d];
        row.mode = t.mode;
        row.N = t.mode == RateMode::Finite ? t.N : 0.0;
        row.report = evaluate_entry(e, d, t.mode, t.N, dump_for(row));
        row.params = e.params;
        row.fixed_source = true;
        rows.push_back(row);
      }
    }
  }

  // Writes a header for the row and returns the dump stream, or null.
  std::ostream* dump_for(const SweepRow& row) const {
    if (!opts_.lp_dump || row.mode == RateMode::PerfectPE) return nullptr;
    std::ostream& os = *opts_.lp_dump;
    os << "# L_km " << row.L_km << " mode " << to_string(row.mode);
    if (row.mode == RateMode::Finite) os << " N " << row.N;
    os << "\n";
    return &os;
  }

  const SweepConfig& cfg_;
  const SweepOptions& opts_;
  std::vector<double> distances_;
  std::vector<double> N_values_;
  bool finite_ = false;
  bool asymptotic_ = false;
  bool perfect_pe_ = false;
  double eps_sec_ = 0.0;
};

}  // namespace

SweepConfig parse_config(const json& doc) {
  SweepConfig c;
  check_keys(doc, "", {"distances_km", "modes", "N", "protocol", "channel", "search",
                       "asymptotic", "source", "quadrature_tol", "output", "format"});
  if (doc.contains("distances_km")) c.distances = as_distances(doc.at("distances_km"), "distances_km");
  if (doc.contains("modes")) {
    const json& m = doc.at("modes");
    if (!m.is_array()) throw ConfigError("key 'modes' must be an array of mode names");
    c.modes.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      const std::string key = "modes[" + std::to_string(i) + "]";
      if (!m[i].is_string()) throw ConfigError("key '" + key + "' must be a string");
      try {
        c.modes.push_back(rate_mode_from_string(m[i].get<std::string>()));
      } catch (const DomainError& e) {
        throw ConfigError("key '" + key + "': " + e.what());
      }
    }
  }
  if (doc.contains("N")) c.N_values = as_numbers(doc.at("N"), "N");

  if (doc.contains("protocol")) {
    const json& p = doc.at("protocol");
    check_keys(p, "protocol", {"N", "q_K", "eps", "eps_cor", "eps_PA", "delta", "n_cut"});
    read_number(p, "protocol", "N", c.protocol.N);
    read_number(p, "protocol", "q_K", c.protocol.q_K);
    read_number(p, "protocol", "eps", c.protocol.eps);
    read_number(p, "protocol", "eps_cor", c.protocol.eps_cor);
    read_number(p, "protocol", "eps_PA", c.protocol.eps_PA);
    read_number(p, "protocol", "delta", c.protocol.delta);
    if (p.contains("n_cut")) {
      c.protocol.n_cut = static_cast<int>(std::min<std::uint64_t>(as_count(p.at("n_cut"), "protocol.n_cut"), 1000));
    }
  }
  if (doc.contains("channel")) {
    const json& ch = doc.at("channel");
    check_keys(ch, "channel", {"eta_bob", "alpha_att", "p_d", "f_EC"});
    read_number(ch, "channel", "eta_bob", c.channel.eta_bob);
    read_number(ch, "channel", "alpha_att", c.channel.alpha_att);
    read_number(ch, "channel", "p_d", c.channel.p_d);
    read_number(ch, "channel", "f_EC", c.channel.f_EC);
  }
  if (doc.contains("search")) {
    const json& s = doc.at("search");
    check_keys(s, "search", {"budget", "seed", "w", "q_T", "nu_t", "dtheta_key", "dtheta_test",
                             "dphi_test", "local_samples", "local_scale"});
    if (s.contains("budget")) c.search.budget = as_count(s.at("budget"), "search.budget");
    if (s.contains("seed")) c.search.seed = as_count(s.at("seed"), "search.seed");
    read_range(s, "search", "w", c.search.w);
    read_range(s, "search", "q_T", c.search.q_T);
    read_range(s, "search", "nu_t", c.search.nu_t);
    read_range(s, "search", "dtheta_key", c.search.dtheta_key);
    read_range(s, "search", "dtheta_test", c.search.dtheta_test);
    read_range(s, "search", "dphi_test", c.search.dphi_test);
    if (s.contains("local_samples")) c.local_samples = as_count(s.at("local_samples"), "search.local_samples");
    read_number(s, "search", "local_scale", c.local_scale);
  }
  if (doc.contains("asymptotic")) {
    const json& a = doc.at("asymptotic");
    check_keys(a, "asymptotic", {"w", "dtheta_test", "dphi_test"});
    read_number(a, "asymptotic", "w", c.pinned_w);
    read_number(a, "asymptotic", "dtheta_test", c.pinned_dtheta_test);
    read_number(a, "asymptotic", "dphi_test", c.pinned_dphi_test);
  }
  if (doc.contains("source")) {
    const json& s = doc.at("source");
    check_keys(s, "source", {"nu_t", "dtheta_key", "dtheta_test", "dphi_test", "w",
                             "key_intervals", "test_intervals"});
    SourceConfig src;
    read_number(s, "source", "nu_t", src.nu_t);
    read_number(s, "source", "dtheta_key", src.dtheta_key);
    read_number(s, "source", "dtheta_test", src.dtheta_test);
    read_number(s, "source", "dphi_test", src.dphi_test);
    if (s.contains("w")) {
      if (s.contains("key_intervals") || s.contains("test_intervals")) {
        throw ConfigError("key 'source.w' cannot be combined with explicit intervals");
      }
      const double w = as_number(s.at("w"), "source.w");
      c.fixed_w = w;
      // Built without checks so that validation can report a bad w.
      src.key_intervals = {{3 * w, 1.0}, {2 * w, 3 * w}, {w, 2 * w}, {0.0, w}};
      src.test_intervals = {{0.0, 1.0}, {0.0, 3 * w}, {0.0, 2 * w}, {0.0, w}};
    } else {
      if (!s.contains("key_intervals") || !s.contains("test_intervals")) {
        throw ConfigError("key 'source' needs either 'w' or both interval lists");
      }
      src.key_intervals = as_intervals(s.at("key_intervals"), "source.key_intervals");
      src.test_intervals = as_intervals(s.at("test_intervals"), "source.test_intervals");
    }
    c.fixed_source = src;
  }
  read_number(doc, "", "quadrature_tol", c.quad_tol);
  if (doc.contains("output")) {
    if (!doc.at("output").is_string()) throw ConfigError("key 'output' must be a string");
    c.output = doc.at("output").get<std::string>();
  }
  if (doc.contains("format")) {
    const json& f = doc.at("format");
    if (f == "csv") {
      c.format = OutputFormat::Csv;
    } else if (f == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw ConfigError("key 'format' must be \"csv\" or \"json\"");
    }
  }
  return c;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

std::vector<std::string> validate_config(const SweepConfig& cfg) {
  std::vector<std::string> problems;
  auto check = [&](const std::string& label, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      problems.push_back(label + ": " + e.what());
    }
  };

  if (cfg.distances.empty()) problems.push_back("distances_km: list is empty");
  for (double L : cfg.distances) {
    if (!(L >= 0.0 && std::isfinite(L))) {
      problems.push_back("distances_km: distances must be finite and non-negative");
      break;
    }
  }
  if (cfg.modes.empty()) problems.push_back("modes: no mode selected");
  const bool finite = std::find(cfg.modes.begin(), cfg.modes.end(), RateMode::Finite) != cfg.modes.end();
  if (finite && cfg.N_values.empty()) problems.push_back("N: finite mode needs at least one N");
  for (double N : cfg.N_values) {
    if (!(N >= 1.0 && std::isfinite(N))) {
      problems.push_back("N: every N must be a finite number >= 1");
      break;
    }
  }
  check("protocol", [&] { cfg.protocol.validate(); });
  check("channel", [&] { cfg.channel.validate(); });
  if (!(cfg.quad_tol > 0.0 && cfg.quad_tol < 1e-3)) {
    problems.push_back("quadrature_tol: must lie in (0, 1e-3)");
  }

  if (cfg.fixed_source) {
    if (cfg.fixed_w && !(*cfg.fixed_w > 0.0 && *cfg.fixed_w <= 0.25)) {
      problems.push_back("source.w: four consecutive intervals need 0 < w <= 1/4");
    }
    check("source", [&] {
      const SourceConfig& src = *cfg.fixed_source;
      src.validate();
      // Every region must be non-empty after clipping to I*_theta.
      characterize(src, cfg.protocol.n_cut, std::max(cfg.quad_tol, 1e-6), false, 4);
    });
  } else {
    check("search", [&] { cfg.search.validate(); });
    if (cfg.search.budget > 1000000) problems.push_back("search.budget: more than 10^6 samples");
    if (!(cfg.local_scale >= 0.0 && cfg.local_scale <= 1.0)) {
      problems.push_back("search.local_scale: must lie in [0, 1]");
    }
    if (cfg.local_samples > 100000) problems.push_back("search.local_samples: more than 10^5 samples");
    // The widest intervals with the narrowest key caps is the first
    // configuration to lose a key region.
    check("search (largest w with smallest angles)", [&] {
      cfg.search.validate();
      Candidate corner;
      corner.w = cfg.search.w.hi;
      corner.nu_t = cfg.search.nu_t.lo;
      corner.dtheta_key = cfg.search.dtheta_key.lo;
      corner.dtheta_test = cfg.search.dtheta_test.lo;
      corner.dphi_test = cfg.search.dphi_test.lo;
      characterize(corner.source(), cfg.protocol.n_cut, std::max(cfg.quad_tol, 1e-6), false, 4);
    });
    check("asymptotic", [&] {
      const SearchSpace pinned = pinned_space(cfg.search, cfg.pinned_w, cfg.pinned_dtheta_test,
                                              cfg.pinned_dphi_test);
      pinned.validate();
    });
  }
  return problems;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepOptions& opts) {
  const auto problems = validate_config(cfg);
  if (!problems.empty()) throw ConfigError(problems.front());
  return Sweeper(cfg, opts).run();
}

bool is_numerical_failure(const SweepRow& row) {
  const std::string& r = row.report.abort_reason;
  return r.find("numerical_failure") != std::string::npos ||
         r.rfind("quadrature_", 0) == 0;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

const char* kColumns[] = {"L_km", "mode", "N", "K", "l", "y1_L", "y1_U", "e1_ideal_U",
                          "e_ph_U", "eps_sec", "abort_reason", "w", "q_T", "nu_t",
                          "dtheta_key", "dtheta_test", "dphi_test"};

}  // namespace

void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  for (std::size_t i = 0; i < std::size(kColumns); ++i) os << (i ? "," : "") << kColumns[i];
  os << "\n";
  for (const auto& r : rows) {
    const auto& k = r.report;
    os << num(r.L_km) << ',' << to_string(r.mode) << ','
       << (r.mode == RateMode::Finite ? num(r.N) : std::string("inf")) << ',' << num(k.K) << ','
       << k.l << ',' << num(k.decoy.y1_L) << ',' << num(k.decoy.y1_U) << ','
       << num(k.decoy.e1_ideal_U) << ',' << num(k.phase.e_ph_U) << ',' << num(k.eps_sec) << ','
       << k.abort_reason << ',' << num(r.params.w) << ',' << num(r.params.q_T) << ','
       << num(r.params.nu_t) << ',' << num(r.params.dtheta_key) << ','
       << num(r.params.dtheta_test) << ',' << num(r.params.dphi_test) << "\n";
  }
}

void write_json(std::ostream& os, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  auto val = [](double x) {
    return std::isnan(x) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(x);
  };
  for (const auto& r : rows) {
    const auto& k = r.report;
    nlohmann::ordered_json row;
    row["L_km"] = r.L_km;
    row["mode"] = to_string(r.mode);
    row["N"] = r.mode == RateMode::Finite ? nlohmann::ordered_json(r.N) : nlohmann::ordered_json(nullptr);
    row["K"] = k.K;
    row["l"] = k.l;
    row["y1_L"] = k.decoy.y1_L;
    row["y1_U"] = k.decoy.y1_U;
    row["e1_ideal_U"] = k.decoy.e1_ideal_U;
    row["e_ph_U"] = k.phase.e_ph_U;
    row["eps_sec"] = k.eps_sec;
    row["abort_reason"] = k.abort_reason;
    row["w"] = val(r.params.w);
    row["q_T"] = r.params.q_T;
    row["nu_t"] = r.params.nu_t;
    row["dtheta_key"] = r.params.dtheta_key;
    row["dtheta_test"] = r.params.dtheta_test;
    row["dphi_test"] = r.params.dphi_test;
    out.push_back(std::move(row));
  }
  os << out.dump(2) << "\n";
}

}  // namespace pqkd

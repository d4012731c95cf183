#include "pqkd/decoy.hpp"

#include <algorithm>
#include <ostream>

#include "pqkd/concentration.hpp"
#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

std::string var_name(const char* base, std::size_t j, int n) {
  return std::string(base) + "_j" + std::to_string(j) + "_n" + std::to_string(n);
}

std::string idx_name(const char* base, std::size_t j) {
  return std::string(base) + "_j" + std::to_string(j);
}

void check_inputs(const std::vector<RegionMoments>& moments, std::size_t n_gains, int n_cut) {
  if (n_cut < 1) throw LpBuildError("n_cut must be at least 1");
  if (moments.empty()) throw LpBuildError("no settings supplied");
  if (moments.size() != n_gains) throw LpBuildError("moments and gain intervals differ in size");
  for (const auto& m : moments) {
    if (m.pn.size() < static_cast<std::size_t>(n_cut) + 1) {
      throw LpBuildError("photon-number statistics shorter than n_cut");
    }
  }
}

double td_entry(const std::vector<std::vector<std::vector<double>>>& table, int n, std::size_t j,
                std::size_t k) {
  const auto nn = static_cast<std::size_t>(n);
  if (nn >= table.size() || table[nn].size() <= std::max(j, k)) {
    throw LpBuildError("missing trace-distance entry for n = " + std::to_string(n));
  }
  return table[nn][j][k];
}

// Decoy rows sum_n p_n x_n <= G and G <= sum_n p_n x_n + 1 - sum_n p_n, plus
// the interval rows lo <= G <= hi.
void add_decoy_rows(LPInstance& lp, const char* tag, std::size_t j, const std::vector<LpTerm>& mix,
                    double tail, int g, const GainInterval& iv) {
  std::vector<LpTerm> lower = mix;
  lower.push_back({g, -1.0});
  lp.add_constraint(std::string(tag) + "_decoy_lo_j" + std::to_string(j), lower,
                    Relation::LessEqual, 0.0);
  std::vector<LpTerm> upper;
  upper.push_back({g, 1.0});
  for (const auto& t : mix) upper.push_back({t.var, -t.coef});
  lp.add_constraint(std::string(tag) + "_decoy_hi_j" + std::to_string(j), upper,
                    Relation::LessEqual, tail);
  const double lo = std::max(iv.lo, 0.0);
  const double hi = std::min(iv.hi, 1.0);
  if (lo == hi) {
    lp.add_constraint(std::string(tag) + "_gain_j" + std::to_string(j), {{g, 1.0}},
                      Relation::Equal, lo);
  } else {
    lp.add_constraint(std::string(tag) + "_gain_lo_j" + std::to_string(j), {{g, 1.0}},
                      Relation::GreaterEqual, lo);
    lp.add_constraint(std::string(tag) + "_gain_hi_j" + std::to_string(j), {{g, 1.0}},
                      Relation::LessEqual, hi);
  }
}

void add_td_rows(LPInstance& lp, const char* tag, int a, int b, double d, std::size_t j,
                 std::size_t k, int n) {
  const std::string suffix = "_j" + std::to_string(j) + "_k" + std::to_string(k) + "_n" +
                             std::to_string(n);
  lp.add_constraint(std::string(tag) + "_td_up" + suffix, {{a, 1.0}, {b, -1.0}},
                    Relation::LessEqual, d);
  lp.add_constraint(std::string(tag) + "_td_dn" + suffix, {{a, -1.0}, {b, 1.0}},
                    Relation::LessEqual, d);
}

}  // namespace

LPInstance build_yield_lp(const std::vector<RegionMoments>& moments,
                          const std::vector<GainInterval>& gains, const TdTables& td, int n_cut,
                          Sense sense) {
  check_inputs(moments, gains.size(), n_cut);
  const std::size_t d = moments.size();
  LPInstance lp;
  const int y0 = lp.add_variable("y_0", 0.0, 1.0);
  const int y1 = lp.add_variable("y_1", 0.0, 1.0);
  std::vector<std::vector<int>> y(d, std::vector<int>(static_cast<std::size_t>(n_cut) + 1, -1));
  for (std::size_t j = 0; j < d; ++j) {
    y[j][0] = y0;
    y[j][1] = y1;
    for (int n = 2; n <= n_cut; ++n) y[j][static_cast<std::size_t>(n)] = lp.add_variable(var_name("y", j, n), 0.0, 1.0);
  }
  std::vector<int> q(d);
  for (std::size_t j = 0; j < d; ++j) q[j] = lp.add_variable(idx_name("Q", j), 0.0, 1.0);

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<LpTerm> mix;
    double tail = 1.0;
    for (int n = 0; n <= n_cut; ++n) {
      const double p = moments[j].pn[static_cast<std::size_t>(n)];
      mix.push_back({y[j][static_cast<std::size_t>(n)], p});
      tail -= p;
    }
    add_decoy_rows(lp, "yield", j, mix, std::max(tail, 0.0), q[j], gains[j]);
  }
  for (int n = 2; n <= n_cut; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j + 1; k < d; ++k) {
        add_td_rows(lp, "yield", y[j][static_cast<std::size_t>(n)], y[k][static_cast<std::size_t>(n)],
                    td_entry(td.key, n, j, k), j, k, n);
      }
    }
  }
  lp.set_objective(sense, {{y1, 1.0}});
  return lp;
}

LPInstance build_error_lp(const std::vector<RegionMoments>& moments,
                          const std::vector<GainInterval>& error_gains, const TdTables& td,
                          double y1_L, int n_cut) {
  check_inputs(moments, error_gains.size(), n_cut);
  if (!(y1_L >= 0.0 && y1_L <= 1.0)) throw LpBuildError("y1_L must lie in [0, 1]");
  const std::size_t d = moments.size();
  LPInstance lp;
  const int e0 = lp.add_variable("e_0", 0.0, 1.0);
  std::vector<std::vector<int>> e(d, std::vector<int>(static_cast<std::size_t>(n_cut) + 1, -1));
  for (std::size_t j = 0; j < d; ++j) {
    e[j][0] = e0;
    for (int n = 1; n <= n_cut; ++n) e[j][static_cast<std::size_t>(n)] = lp.add_variable(var_name("e", j, n), 0.0, 1.0);
  }
  std::vector<int> g(d);
  for (std::size_t j = 0; j < d; ++j) g[j] = lp.add_variable(idx_name("E", j), 0.0, 1.0);
  const int e1 = lp.add_variable("e1_ideal", 0.0, 1.0);

  for (std::size_t j = 0; j < d; ++j) {
    std::vector<LpTerm> mix;
    double tail = 1.0;
    for (int n = 0; n <= n_cut; ++n) {
      const double p = moments[j].pn[static_cast<std::size_t>(n)];
      mix.push_back({e[j][static_cast<std::size_t>(n)], p});
      tail -= p;
    }
    add_decoy_rows(lp, "error", j, mix, std::max(tail, 0.0), g[j], error_gains[j]);
  }
  for (int n = 1; n <= n_cut; ++n) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j + 1; k < d; ++k) {
        add_td_rows(lp, "error", e[j][static_cast<std::size_t>(n)], e[k][static_cast<std::size_t>(n)],
                    td_entry(td.test, n, j, k), j, k, n);
      }
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double lam = moments[j].lambda;
    lp.add_constraint(idx_name("error_noise", j), {{e1, lam}, {e[j][1], -1.0}},
                      Relation::LessEqual, -(1.0 - lam) * y1_L / 2.0);
  }
  lp.set_objective(Sense::Maximize, {{e1, 1.0}});
  return lp;
}

std::size_t reference_setting(const SourceConfig& cfg) {
  if (cfg.key_intervals.empty()) throw DomainError("no key settings");
  std::size_t best = 0;
  for (std::size_t j = 1; j < cfg.key_intervals.size(); ++j) {
    if (cfg.key_intervals[j].lo > cfg.key_intervals[best].lo) best = j;
  }
  return best;
}

std::vector<GainInterval> gain_intervals(const std::vector<double>& counts,
                                         const std::vector<double>& guesses,
                                         const std::vector<double>& selects, double N, double q,
                                         double eps, EstimationMode mode) {
  if (counts.size() != selects.size() || guesses.size() != counts.size()) {
    throw DomainError("count, guess and selection lists differ in size");
  }
  std::vector<GainInterval> out;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double scale = N * q * selects[j];
    if (!(scale > 0.0)) throw DomainError("setting has zero selection probability");
    if (mode == EstimationMode::Exact) {
      out.push_back({counts[j] / scale, counts[j] / scale});
    } else {
      const double g = std::clamp(guesses[j], 0.0, N);
      out.push_back({kato_direct_lower(N, counts[j], g, eps) / scale,
                     kato_direct_upper(N, counts[j], g, eps) / scale});
    }
  }
  return out;
}

DecoyOutcome estimate_bounds(const ObservedData& observed, const ProtocolParams& params,
                             const SourceCharacterization& source, EstimationMode mode,
                             const ObservedData* guesses, std::ostream* lp_dump) {
  params.validate();
  observed.validate(params.N);
  const std::size_t dk = source.key.size();
  const std::size_t dt = source.test.size();
  if (observed.M_key_j.size() != dk || observed.m_test_j.size() != dt) {
    throw DomainError("observed data does not match the number of settings");
  }
  const ObservedData& g = guesses ? *guesses : observed;
  if (g.M_key_j.size() != dk || g.m_test_j.size() != dt) {
    throw DomainError("Kato guesses do not match the number of settings");
  }

  std::vector<double> key_sel(dk), test_sel(dt);
  for (std::size_t j = 0; j < dk; ++j) key_sel[j] = source.key_select(j);
  for (std::size_t j = 0; j < dt; ++j) test_sel[j] = source.test_select(j);

  DecoyOutcome out;
  out.bounds.eps_yield = 2.0 * params.eps * static_cast<double>(dk);
  out.bounds.eps_error = 2.0 * params.eps * static_cast<double>(dk + dt);

  const auto gains = gain_intervals(observed.M_key_j, g.M_key_j, key_sel, params.N, params.q_K,
                                    params.eps, mode);
  auto solve = [&](const LPInstance& lp, const char* label, double& value) {
    if (lp_dump) {
      *lp_dump << "# " << label << '\n';
      lp.dump(*lp_dump);
    }
    const auto sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal) {
      out.abort_reason = std::string(label) + "_" + to_string(sol.status);
      return false;
    }
    value = std::clamp(sol.objective, 0.0, 1.0);
    return true;
  };

  if (!solve(build_yield_lp(source.key, gains, source.td, params.n_cut, Sense::Minimize),
             "yield_lp_min", out.bounds.y1_L)) {
    return out;
  }
  if (!solve(build_yield_lp(source.key, gains, source.td, params.n_cut, Sense::Maximize),
             "yield_lp_max", out.bounds.y1_U)) {
    return out;
  }
  out.bounds.y1_L = std::min(out.bounds.y1_L, out.bounds.y1_U);

  const auto errs = gain_intervals(observed.m_test_j, g.m_test_j, test_sel, params.N,
                                   params.q_T(), params.eps, mode);
  if (!solve(build_error_lp(source.test, errs, source.td, out.bounds.y1_L, params.n_cut),
             "error_lp", out.bounds.e1_ideal_U)) {
    return out;
  }
  out.ok = true;
  return out;
}

}  // namespace pqkd

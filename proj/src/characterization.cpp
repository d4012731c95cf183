#include "pqkd/characterization.hpp"

#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

std::vector<RegionRule> union_rules(const SourceConfig& cfg, Basis basis, double tol) {
  std::vector<RegionRule> out;
  const auto& ivs = basis == Basis::Key ? cfg.key_intervals : cfg.test_intervals;
  const Pole pole = basis == Basis::Key ? Pole::R : Pole::H;
  for (const auto& iv : merge_intervals(ivs)) {
    RegionSpec r{basis, pole, iv, cfg.dtheta_key, cfg.dtheta_test, cfg.dphi_test};
    out.push_back(build_rule(geometry_of(r), cfg.nu_t, {.rel_tol = tol}));
  }
  return out;
}

}  // namespace

SourceCharacterization characterize(const SourceConfig& cfg, int n_cut, double tol,
                                    bool keep_rules, int n_max) {
  cfg.validate();
  if (n_cut < 1) throw DomainError("n_cut must be at least 1");
  if (n_max < n_cut) throw DomainError("n_max must be at least n_cut");
  SourceCharacterization c;
  c.config = cfg;
  c.n_cut = n_cut;
  const QuadratureOptions opts{.rel_tol = tol};

  std::vector<RegionRule> key_l;
  for (std::size_t j = 0; j < cfg.key_intervals.size(); ++j) {
    c.key_rules.push_back(build_rule(geometry_of(key_region(cfg, j, Pole::R)), cfg.nu_t, opts));
    key_l.push_back(build_rule(geometry_of(key_region(cfg, j, Pole::L)), cfg.nu_t, opts));
    c.key.push_back(region_moments(c.key_rules.back(), Pole::R, n_max));
  }
  for (std::size_t j = 0; j < cfg.test_intervals.size(); ++j) {
    c.test_rules.push_back(build_rule(geometry_of(test_region(cfg, j, Pole::H)), cfg.nu_t, opts));
    c.test.push_back(region_moments(c.test_rules.back(), Pole::H, n_max));
  }
  c.key_union_rules = union_rules(cfg, Basis::Key, tol);
  c.test_union_rules = union_rules(cfg, Basis::Test, tol);
  c.key_union = union_moments(c.key_union_rules, Pole::R, n_max);
  c.test_union = union_moments(c.test_union_rules, Pole::H, n_max);
  c.td = td_tables(c.key_rules, key_l, c.test_rules, n_cut);

  if (!keep_rules) {
    c.key_rules.clear();
    c.test_rules.clear();
    c.key_union_rules.clear();
    c.test_union_rules.clear();
  }
  return c;
}

}  // namespace pqkd

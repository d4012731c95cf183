#pragma once

// Everything the estimation chain needs to know about one source
// configuration, computed once and reused across distances and modes.

#include <vector>

#include "pqkd/fock.hpp"
#include "pqkd/source.hpp"

namespace pqkd {

struct SourceCharacterization {
  SourceConfig config;
  int n_cut = 0;

  // Per-setting moments of the R (key) and H (test) regions. The L and V
  // regions are mirror images with identical moments.
  std::vector<RegionMoments> key;
  std::vector<RegionMoments> test;

  // Moments over the union of all R regions and of all H regions.
  RegionMoments key_union;
  RegionMoments test_union;

  TdTables td;

  // Quadrature rules, kept for channel-model integrals. Empty when the
  // characterization was built with keep_rules = false.
  std::vector<RegionRule> key_rules;               // R, per setting
  std::vector<RegionRule> test_rules;              // H, per setting
  std::vector<RegionRule> key_union_rules;         // R, merged pieces
  std::vector<RegionRule> test_union_rules;        // H, merged pieces

  /// <1> over the key setting j (both poles).
  double key_select(std::size_t j) const { return 2.0 * key[j].p_select; }
  /// <1> over the test setting j (both H and V).
  double test_select(std::size_t j) const { return 2.0 * test[j].p_select; }
  /// <e^{-I} I> over the whole key basis (both poles, all settings).
  double key_w1() const { return 2.0 * key_union.w1; }
  /// <e^{-I} I> over the whole test basis.
  double test_w1() const { return 2.0 * test_union.w1; }
};

SourceCharacterization characterize(const SourceConfig& cfg, int n_cut,
                                    double tol = 1e-9, bool keep_rules = true,
                                    int n_max = kDefaultNMax);

}  // namespace pqkd

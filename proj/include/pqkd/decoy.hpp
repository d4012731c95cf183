#pragma once

// The two decoy-state linear programs: bounds on the single-photon yield
// (minimized and maximized) and on the single-photon bit-error probability
// of the ideal test states.

#include <iosfwd>
#include <string>
#include <vector>

#include "pqkd/characterization.hpp"
#include "pqkd/lp.hpp"
#include "pqkd/protocol.hpp"

namespace pqkd {

/// Interval for a per-setting gain Q_j or error gain E_j.
struct GainInterval {
  double lo = 0.0;
  double hi = 1.0;
};

struct DecoyBounds {
  double y1_L = 0.0;
  double y1_U = 1.0;
  double e1_ideal_U = 1.0;
  double eps_yield = 0.0;  // failure probability of the yield bounds
  double eps_error = 0.0;  // failure probability of the error bound
};

/// Variables: y_0, y_1 (shared by all settings), y_j<j>_n<n> for
/// n = 2..n_cut, Q_j<j>. Objective: y_1, which equals the yield of the
/// highest-intensity setting because single-photon yields are merged.
/// Throws LpBuildError on n_cut < 1, size mismatch or a missing TD entry.
LPInstance build_yield_lp(const std::vector<RegionMoments>& moments,
                          const std::vector<GainInterval>& gains, const TdTables& td,
                          int n_cut, Sense sense);

/// Variables: e_0 (shared), e_j<j>_n<n> for n = 1..n_cut, E_j<j>, e1_ideal.
/// Objective: max e1_ideal.
LPInstance build_error_lp(const std::vector<RegionMoments>& moments,
                          const std::vector<GainInterval>& error_gains, const TdTables& td,
                          double y1_L, int n_cut);

/// Index of the key setting with the highest intensity interval.
std::size_t reference_setting(const SourceConfig& cfg);

enum class EstimationMode {
  Finite,  // Kato intervals around the observed counts
  Exact,   // counts taken as exact expectations (N -> infinity)
};

struct DecoyOutcome {
  bool ok = false;
  DecoyBounds bounds;
  std::string abort_reason;  // empty when ok
};

/// Kato intervals for the gains, scaled by 1/(N q <1>_j).
std::vector<GainInterval> gain_intervals(const std::vector<double>& counts,
                                         const std::vector<double>& guesses,
                                         const std::vector<double>& selects, double N,
                                         double q, double eps, EstimationMode mode);

/// Runs the yield LP (min and max) and the error LP. Infeasible or
/// numerically failed programs produce ok = false with a reason code.
/// `guesses` overrides the Kato guesses (defaults to the observed counts).
/// When `lp_dump` is non-null every instance is written to it.
DecoyOutcome estimate_bounds(const ObservedData& observed, const ProtocolParams& params,
                             const SourceCharacterization& source, EstimationMode mode,
                             const ObservedData* guesses = nullptr,
                             std::ostream* lp_dump = nullptr);

}  // namespace pqkd

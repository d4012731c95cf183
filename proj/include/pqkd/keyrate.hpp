#pragma once

// From decoy bounds to single-photon count bounds, the phase-error-rate
// bound, the error budget, the secret key length and the key rate.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "pqkd/channel.hpp"
#include "pqkd/characterization.hpp"
#include "pqkd/decoy.hpp"
#include "pqkd/protocol.hpp"

namespace pqkd {

enum class RateMode { Finite, Asymptotic, PerfectPE };

std::string to_string(RateMode m);
/// Throws DomainError on an unknown name.
RateMode rate_mode_from_string(const std::string& s);

struct SinglePhotonCounts {
  double M_key1_L = 0.0;
  double M_key1_U = 0.0;
  double M_test1_ideal_L = 0.0;
};

struct PhaseErrorBound {
  double m_test1_ideal_U = 0.0;
  double m_ph_U = 0.0;
  double e_ph_U = 0.5;
};

struct KeyRateReport {
  RateMode mode = RateMode::Finite;
  DecoyBounds decoy;
  SinglePhotonCounts counts;
  PhaseErrorBound phase;
  double lambda_EC = 0.0;
  double eps_PE = 0.0;
  double eps_sec = 0.0;
  std::int64_t l = 0;
  double K = 0.0;
  std::string abort_reason;  // empty unless K = 0 because of an abort
};

/// Reverse Kato bounds on the single-photon counts of the key basis and of
/// the ideal test states. With `exact` the bounds collapse to their
/// arguments. Lower bounds are clamped at 0 and upper bounds at N.
SinglePhotonCounts single_photon_count_bounds(const DecoyBounds& decoy,
                                              const ProtocolParams& params,
                                              const SourceCharacterization& source, bool exact);

/// Throws DomainError if M_test1_ideal_L < 1 (finite) or <= 0 (exact), or
/// if M_key1_L <= 0; callers treat this as an abort.
PhaseErrorBound phase_error_bound(const SinglePhotonCounts& counts, double e1_ideal_U,
                                  const ProtocolParams& params,
                                  const SourceCharacterization& source, bool exact);

/// floor(M (1 - h(e)) - lambda_EC - log2(1 / (2 eps_cor eps_PA^2 delta))),
/// clamped below at 0. e_ph_U >= 1/2 counts as h = 1.
std::int64_t key_length(double M_key1_L, double e_ph_U, double lambda_EC, double eps_cor,
                        double eps_PA, double delta);

struct ErrorBudget {
  double eps_PE = 0.0;
  double eps_sec = 0.0;
};

/// eps_PE = eps [2 (d_key + d_test) + 5]; eps_sec = sqrt(eps_PE) + eps_PA + delta.
ErrorBudget error_budget(int d_key, int d_test, double eps, double eps_PA, double delta);

/// Full chain for one mode.
///  Finite: Kato intervals, both LPs, reverse Kato and Serfling, floor.
///  Asymptotic: exact gains, no concentration terms, no floor or log term.
///  PerfectPE: the model's single-photon yield and error instead of LPs.
/// The two infinite-key modes report the rate in the limit q_K -> 1.
/// Aborts give K = 0 with a reason code.
KeyRateReport evaluate(RateMode mode, const SourceCharacterization& source,
                       const ObservedData& observed, const ProtocolParams& params,
                       const ChannelParams& channel, std::ostream* lp_dump = nullptr);

}  // namespace pqkd

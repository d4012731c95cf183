#pragma once

// Loss and dark-count channel model: expected observables, sampled
// observables, error-correction leakage and the perfect-estimation targets.

#include <cstdint>
#include <utility>
#include <vector>

#include "pqkd/characterization.hpp"
#include "pqkd/protocol.hpp"

namespace pqkd {

struct ChannelParams {
  double eta_bob = 0.65;   // detector efficiency
  double alpha_att = 0.2;  // dB/km
  double L = 0.0;          // km
  double p_d = 1e-6;       // dark-count probability per detector per round
  double f_EC = 1.16;

  void validate() const;
};

/// eta_bob * 10^(-alpha_att L / 10).
double channel_eta(const ChannelParams& params);

/// Region averages behind the expected counts, before the N q factors.
struct ExpectedRates {
  std::vector<double> key_gain_j;    // <1 - (1-p_d)^2 e^{-I eta}> over key setting j
  std::vector<double> test_gain_j;   // same over test setting j
  std::vector<double> test_error_j;  // error-count integrand over test setting j
  double key_gain = 0.0;             // over the whole key basis
  double key_error = 0.0;            // sifted-key bit errors, whole key basis

  ObservedData scaled(double N, double q_K) const;
};

/// Requires a characterization built with keep_rules = true.
ExpectedRates expected_rates(const SourceCharacterization& source, const ChannelParams& params);

ObservedData expected_counts(const SourceCharacterization& source, const ChannelParams& params,
                             const ProtocolParams& proto);

/// Binomial draw for every count with the given mean; error counts are
/// binomial thinnings of the sampled counts, so m <= M always holds.
ObservedData sample_counts(const ObservedData& expectations, double N, std::uint64_t seed);

/// f_EC * M * h(m / M); zero when M = 0.
double ec_leakage(double expected_M_key, double expected_m_key, double f_EC);

/// Single-photon yield and ideal-state error probability of the model.
std::pair<double, double> perfect_pe_targets(double eta, double p_d);

}  // namespace pqkd

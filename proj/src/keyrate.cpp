#include "pqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>

#include "pqkd/concentration.hpp"
#include "pqkd/errors.hpp"

namespace pqkd {

std::string to_string(RateMode m) {
  switch (m) {
    case RateMode::Finite: return "finite";
    case RateMode::Asymptotic: return "asymptotic";
    case RateMode::PerfectPE: return "perfect_pe";
  }
  return "?";
}

RateMode rate_mode_from_string(const std::string& s) {
  if (s == "finite") return RateMode::Finite;
  if (s == "asymptotic") return RateMode::Asymptotic;
  if (s == "perfect_pe") return RateMode::PerfectPE;
  throw DomainError("unknown mode '" + s + "'");
}

SinglePhotonCounts single_photon_count_bounds(const DecoyBounds& decoy,
                                              const ProtocolParams& params,
                                              const SourceCharacterization& source, bool exact) {
  params.validate();
  if (!(decoy.y1_L >= 0.0 && decoy.y1_L <= decoy.y1_U && decoy.y1_U <= 1.0)) {
    throw DomainError("decoy bounds must satisfy 0 <= y1_L <= y1_U <= 1");
  }
  const double N = params.N;
  const double key_scale = N * params.q_K * source.key_w1();
  const double test_scale = N * params.q_T() * source.test_w1() * source.test_union.lambda;
  const double s_key_l = std::min(key_scale * decoy.y1_L, N);
  const double s_key_u = std::min(key_scale * decoy.y1_U, N);
  const double s_test_l = std::min(test_scale * decoy.y1_L, N);

  SinglePhotonCounts c;
  if (exact) {
    c.M_key1_L = s_key_l;
    c.M_key1_U = s_key_u;
    c.M_test1_ideal_L = s_test_l;
    return c;
  }
  // Guesses are the arguments themselves (perfect characterization).
  c.M_key1_L = std::max(kato_reverse_lower(N, s_key_l, s_key_l, params.eps), 0.0);
  c.M_key1_U = std::min(kato_reverse_upper(N, s_key_u, s_key_u, params.eps), N);
  c.M_test1_ideal_L = std::max(kato_reverse_lower(N, s_test_l, s_test_l, params.eps), 0.0);
  return c;
}

PhaseErrorBound phase_error_bound(const SinglePhotonCounts& counts, double e1_ideal_U,
                                  const ProtocolParams& params,
                                  const SourceCharacterization& source, bool exact) {
  params.validate();
  if (!(e1_ideal_U >= 0.0 && e1_ideal_U <= 1.0)) throw DomainError("e1_ideal_U must lie in [0, 1]");
  if (exact ? !(counts.M_test1_ideal_L > 0.0) : counts.M_test1_ideal_L < 1.0) {
    throw DomainError("too few single-photon test counts");
  }
  if (!(counts.M_key1_L > 0.0)) throw DomainError("no single-photon key counts");
  const double N = params.N;
  const double s = std::min(
      N * params.q_T() * source.test_w1() * source.test_union.lambda * e1_ideal_U, N);
  PhaseErrorBound b;
  b.m_test1_ideal_U = exact ? s : std::min(kato_reverse_upper(N, s, s, params.eps), N);
  b.m_ph_U = b.m_test1_ideal_U * counts.M_key1_U / counts.M_test1_ideal_L;
  if (!exact) b.m_ph_U += serfling_upsilon(counts.M_key1_U, counts.M_test1_ideal_L, params.eps);
  b.e_ph_U = std::min(b.m_ph_U / counts.M_key1_L, 0.5);
  return b;
}

namespace {

// log2(1 / (2 eps_cor eps_PA^2 delta)) without forming the tiny product.
double log_penalty(double eps_cor, double eps_PA, double delta) {
  return -(1.0 + std::log2(eps_cor) + 2.0 * std::log2(eps_PA) + std::log2(delta));
}

double entropy_capped(double e) { return e >= 0.5 ? 1.0 : binary_entropy(std::max(e, 0.0)); }

}  // namespace

std::int64_t key_length(double M_key1_L, double e_ph_U, double lambda_EC, double eps_cor,
                        double eps_PA, double delta) {
  if (!(M_key1_L >= 0.0)) throw DomainError("M_key1_L must be non-negative");
  if (!(e_ph_U >= 0.0)) throw DomainError("e_ph_U must be non-negative");
  if (!(lambda_EC >= 0.0)) throw DomainError("lambda_EC must be non-negative");
  if (!(eps_cor > 0.0 && eps_cor < 1.0 && eps_PA > 0.0 && eps_PA < 1.0 && delta > 0.0)) {
    throw DomainError("security parameters must be positive and below 1");
  }
  const double v = std::floor(M_key1_L * (1.0 - entropy_capped(e_ph_U)) - lambda_EC -
                              log_penalty(eps_cor, eps_PA, delta));
  return v > 0.0 ? static_cast<std::int64_t>(v) : 0;
}

ErrorBudget error_budget(int d_key, int d_test, double eps, double eps_PA, double delta) {
  if (d_key < 0 || d_test < 0) throw DomainError("setting counts must be non-negative");
  if (!(eps > 0.0 && eps_PA > 0.0 && delta > 0.0)) throw DomainError("error parameters must be positive");
  ErrorBudget b;
  b.eps_PE = eps * (2.0 * (d_key + d_test) + 5.0);
  b.eps_sec = std::sqrt(b.eps_PE) + eps_PA + delta;
  return b;
}

KeyRateReport evaluate(RateMode mode, const SourceCharacterization& source,
                       const ObservedData& observed, const ProtocolParams& params,
                       const ChannelParams& channel, std::ostream* lp_dump) {
  params.validate();
  channel.validate();
  KeyRateReport r;
  r.mode = mode;
  r.lambda_EC = params.lambda_EC;
  const auto budget = error_budget(static_cast<int>(source.key.size()),
                                   static_cast<int>(source.test.size()), params.eps,
                                   params.eps_PA, params.delta);
  r.eps_PE = budget.eps_PE;
  r.eps_sec = budget.eps_sec;
  const bool exact = mode != RateMode::Finite;

  if (mode == RateMode::PerfectPE) {
    const auto [y1, e1] = perfect_pe_targets(channel_eta(channel), channel.p_d);
    r.decoy = {y1, y1, e1, 0.0, 0.0};
  } else {
    const auto out = estimate_bounds(observed, params, source,
                                     exact ? EstimationMode::Exact : EstimationMode::Finite,
                                     nullptr, lp_dump);
    r.decoy = out.bounds;
    if (!out.ok) {
      r.abort_reason = out.abort_reason;
      return r;
    }
  }

  r.counts = single_photon_count_bounds(r.decoy, params, source, exact);
  if (exact ? !(r.counts.M_test1_ideal_L > 0.0) : r.counts.M_test1_ideal_L < 1.0) {
    r.abort_reason = "too_few_test_single_photons";
    return r;
  }
  if (!(r.counts.M_key1_L > 0.0)) {
    r.abort_reason = "no_key_single_photons";
    return r;
  }
  r.phase = phase_error_bound(r.counts, r.decoy.e1_ideal_U, params, source, exact);

  if (mode == RateMode::Finite) {
    r.l = key_length(r.counts.M_key1_L, r.phase.e_ph_U, params.lambda_EC, params.eps_cor,
                     params.eps_PA, params.delta);
    r.K = static_cast<double>(r.l) / params.N;
  } else {
    const double bits =
        r.counts.M_key1_L * (1.0 - entropy_capped(r.phase.e_ph_U)) - params.lambda_EC;
    r.l = bits > 0.0 ? static_cast<std::int64_t>(std::floor(bits)) : 0;
    r.K = std::max(bits, 0.0) / (params.N * params.q_K);
  }
  if (r.K <= 0.0) {
    r.K = 0.0;
    r.abort_reason = "key_length_nonpositive";
  }
  return r;
}

}  // namespace pqkd

#include "pqkd/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pqkd/errors.hpp"
#include "pqkd/quadrature.hpp"

namespace pqkd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

// Order of the azimuthal rule for integrands that are not trigonometric
// polynomials in phi; the integrand is entire and |phi| < pi/2.
constexpr std::size_t kPhiOrder = 16;

// 1 - (1 - p_d)^2 e^{-x}, accurate for small x and p_d.
double click_prob(double x, double log_nd) { return -std::expm1(2.0 * log_nd - x); }

double gain_average(const RegionRule& rule, double eta, double log_nd) {
  return rule.average([&](const QuadNode& n) { return click_prob(n.intensity * eta, log_nd); });
}

double key_error_average(const RegionRule& rule, double eta, double p_d, double log_nd) {
  return rule.average([&](const QuadNode& n) {
    const double a = n.intensity * eta;
    const double s2 = n.sin_half * n.sin_half;
    const double c2 = n.cos_half * n.cos_half;
    return 0.5 * click_prob(a, log_nd) -
           0.5 * (1.0 - p_d) * (std::exp(-a * s2) - std::exp(-a * c2));
  });
}

double test_error_average(const RegionRule& rule, double eta, double p_d, double log_nd) {
  const auto& g = rule.geometry();
  const auto& gl = quad::gauss_legendre(kPhiOrder);
  const double half = g.phi_half_width;
  // Nodes mirrored about the window centre share cos(phi) when the centre
  // is 0 or pi; they are merged so each distinct value is evaluated once.
  std::vector<double> cos_phi, w_phi;
  for (const auto& p : gl) {
    const double c = std::cos(g.phi_center + half * p.x);
    const double w = p.w * half / (2.0 * std::numbers::pi);
    auto it = std::find_if(cos_phi.begin(), cos_phi.end(),
                           [&](double x) { return std::abs(x - c) < 1e-14; });
    if (it == cos_phi.end()) {
      cos_phi.push_back(c);
      w_phi.push_back(w);
    } else {
      w_phi[it - cos_phi.begin()] += w;
    }
  }
  const double total_w = rule.phi_factor(0);
  // e^{-a(1 - s)/2} - e^{-a(1 + s)/2} = 2 e^{-a/2} sinh(a s / 2)
  return rule.integrate([&](const QuadNode& n) {
    const double a = n.intensity * eta;
    const double half_a_sin = a * n.sin_half * n.cos_half;
    double odd = 0.0;
    for (std::size_t k = 0; k < cos_phi.size(); ++k) odd += w_phi[k] * std::sinh(half_a_sin * cos_phi[k]);
    return 0.5 * total_w * click_prob(a, log_nd) - (1.0 - p_d) * std::exp(-0.5 * a) * odd;
  });
}

double draw_binomial(std::mt19937_64& rng, double trials, double p) {
  if (trials <= 0.0 || p <= 0.0) return 0.0;
  if (p >= 1.0) return trials;
  std::binomial_distribution<long long> dist(static_cast<long long>(std::llround(trials)), p);
  return static_cast<double>(dist(rng));
}

}  // namespace

void ChannelParams::validate() const {
  require(eta_bob >= 0.0 && eta_bob <= 1.0, "eta_bob must lie in [0, 1]");
  require(alpha_att >= 0.0 && std::isfinite(alpha_att), "alpha_att must be non-negative");
  require(L >= 0.0 && std::isfinite(L), "L must be non-negative");
  require(p_d >= 0.0 && p_d <= 1.0, "p_d must lie in [0, 1]");
  require(f_EC >= 1.0 && std::isfinite(f_EC), "f_EC must be at least 1");
}

double channel_eta(const ChannelParams& params) {
  params.validate();
  return params.eta_bob * std::pow(10.0, -params.alpha_att * params.L / 10.0);
}

ObservedData ExpectedRates::scaled(double N, double q_K) const {
  ObservedData d;
  const double q_T = 1.0 - q_K;
  for (double x : key_gain_j) d.M_key_j.push_back(N * q_K * x);
  for (double x : test_gain_j) d.M_test_j.push_back(N * q_T * x);
  for (std::size_t j = 0; j < test_error_j.size(); ++j) {
    d.m_test_j.push_back(std::min(N * q_T * test_error_j[j], d.M_test_j[j]));
  }
  d.M_key = N * q_K * key_gain;
  d.m_key = std::min(N * q_K * key_error, d.M_key);
  return d;
}

ExpectedRates expected_rates(const SourceCharacterization& source, const ChannelParams& params) {
  if (source.key_rules.empty() || source.test_rules.empty()) {
    throw DomainError("channel integrals need a characterization that keeps its rules");
  }
  const double eta = channel_eta(params);
  const double p_d = params.p_d;
  const double log_nd = std::log1p(-p_d);
  ExpectedRates r;
  // Factor 2: each key setting has two mirror-image caps, each test setting
  // two mirror-image stripes.
  for (const auto& rule : source.key_rules) r.key_gain_j.push_back(2.0 * gain_average(rule, eta, log_nd));
  for (const auto& rule : source.test_rules) {
    r.test_gain_j.push_back(2.0 * gain_average(rule, eta, log_nd));
    r.test_error_j.push_back(2.0 * test_error_average(rule, eta, p_d, log_nd));
  }
  for (const auto& rule : source.key_union_rules) {
    r.key_gain += 2.0 * gain_average(rule, eta, log_nd);
    r.key_error += 2.0 * key_error_average(rule, eta, p_d, log_nd);
  }
  return r;
}

ObservedData expected_counts(const SourceCharacterization& source, const ChannelParams& params,
                             const ProtocolParams& proto) {
  proto.validate();
  return expected_rates(source, params).scaled(proto.N, proto.q_K);
}

ObservedData sample_counts(const ObservedData& expectations, double N, std::uint64_t seed) {
  expectations.validate(N);
  std::mt19937_64 rng(seed);
  ObservedData d;
  for (double e : expectations.M_key_j) d.M_key_j.push_back(draw_binomial(rng, N, e / N));
  for (std::size_t j = 0; j < expectations.M_test_j.size(); ++j) {
    const double em = expectations.M_test_j[j];
    const double M = draw_binomial(rng, N, em / N);
    const double ratio = em > 0.0 ? expectations.m_test_j[j] / em : 0.0;
    d.M_test_j.push_back(M);
    d.m_test_j.push_back(draw_binomial(rng, M, ratio));
  }
  d.M_key = draw_binomial(rng, N, expectations.M_key / N);
  const double ratio = expectations.M_key > 0.0 ? expectations.m_key / expectations.M_key : 0.0;
  d.m_key = draw_binomial(rng, d.M_key, ratio);
  return d;
}

double ec_leakage(double expected_M_key, double expected_m_key, double f_EC) {
  require(expected_M_key >= 0.0, "sifted size must be non-negative");
  require(expected_m_key >= 0.0 && expected_m_key <= expected_M_key,
          "sifted errors must lie in [0, M_key]");
  require(f_EC >= 1.0, "f_EC must be at least 1");
  if (expected_M_key == 0.0) return 0.0;
  return f_EC * expected_M_key * binary_entropy(expected_m_key / expected_M_key);
}

std::pair<double, double> perfect_pe_targets(double eta, double p_d) {
  require(eta >= 0.0 && eta <= 1.0, "eta must lie in [0, 1]");
  require(p_d >= 0.0 && p_d <= 1.0, "p_d must lie in [0, 1]");
  const double nd = 1.0 - p_d;
  const double y1 = 1.0 - nd * nd * (1.0 - eta);
  const double e1 = p_d * p_d / 2.0 + p_d * nd * (1.0 - eta) + p_d * nd * eta / 2.0;
  return {y1, e1};
}

}  // namespace pqkd

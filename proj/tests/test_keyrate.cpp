#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "pqkd/channel.hpp"
#include "pqkd/characterization.hpp"
#include "pqkd/concentration.hpp"
#include "pqkd/errors.hpp"
#include "pqkd/keyrate.hpp"

using namespace pqkd;

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.05) == doctest::Approx(0.28639695711595625));
  CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
}

TEST_CASE("key length examples") {
  // Independent mpmath evaluation of the key-length formula.
  CHECK(key_length(1e6, 0.05, 0.0, 1e-20, 1e-20, 1e-20) == 713338);
  CHECK(key_length(1e6, 0.5, 0.0, 1e-20, 1e-20, 1e-20) == 0);
  CHECK(key_length(0.0, 0.01, 0.0, 1e-20, 1e-20, 1e-20) == 0);
  CHECK_THROWS_AS(key_length(-1.0, 0.01, 0.0, 1e-20, 1e-20, 1e-20), DomainError);
}

TEST_CASE("key length is monotone in its inputs") {
  const auto l = [](double M, double e, double ec) { return key_length(M, e, ec, 1e-20, 1e-20, 1e-20); };
  CHECK(l(1e7, 0.02, 1e5) >= l(1e7, 0.03, 1e5));
  CHECK(l(1e7, 0.02, 1e5) >= l(1e7, 0.02, 2e5));
  CHECK(l(2e7, 0.02, 1e5) >= l(1e7, 0.02, 1e5));
}

TEST_CASE("error budget") {
  const auto b = error_budget(4, 4, 1e-20, 1e-20, 1e-20);
  CHECK(b.eps_PE == doctest::Approx(21e-20));
  CHECK(b.eps_sec == doctest::Approx(4.58e-10).epsilon(1e-3));
  CHECK(b.eps_sec == doctest::Approx(4.582575695155840e-10).epsilon(1e-12));
  CHECK(error_budget(0, 0, 1e-20, 1e-20, 1e-20).eps_PE == doctest::Approx(5e-20));
}

TEST_CASE("single-photon counts") {
  const auto src = characterize(test::wide_source(), 4);
  ProtocolParams p;
  DecoyBounds d{0.3, 0.3, 0.01, 0, 0};
  const auto exact = single_photon_count_bounds(d, p, src, true);
  const double centre = p.N * p.q_K * src.key_w1() * 0.3;
  CHECK(exact.M_key1_L == doctest::Approx(centre));
  CHECK(exact.M_key1_U == doctest::Approx(centre));
  const auto finite = single_photon_count_bounds(d, p, src, false);
  CHECK(finite.M_key1_L < centre);
  CHECK(finite.M_key1_U > centre);
  d.y1_L = 0.0;
  CHECK(single_photon_count_bounds(d, p, src, false).M_key1_L == 0.0);
}

TEST_CASE("phase error bound") {
  const auto src = characterize(test::wide_source(), 4);
  ProtocolParams p;
  SinglePhotonCounts c{1e8, 1.1e8, 1e7};
  CHECK(phase_error_bound(c, 0.0, p, src, true).e_ph_U == 0.0);
  const auto b = phase_error_bound(c, 0.02, p, src, false);
  CHECK(b.e_ph_U >= 0.0);
  CHECK(b.e_ph_U <= 0.5);
  CHECK(b.e_ph_U > phase_error_bound(c, 0.02, p, src, true).e_ph_U);
  // Small samples: the sampling term dominates and the rate is capped.
  SinglePhotonCounts tiny{100, 100, 100};
  const auto t = phase_error_bound(tiny, 0.0, p, src, false);
  CHECK(t.m_ph_U >= serfling_upsilon(100, 100, 1e-20));
  CHECK(t.e_ph_U == 0.5);
}

TEST_CASE("modes are ordered on identical channel data") {
  const auto src = characterize(test::wide_source(), 4);
  for (double L : {0.0, 30.0, 60.0}) {
    ChannelParams ch;
    ch.L = L;
    ProtocolParams p;
    const auto obs = expected_counts(src, ch, p);
    p.lambda_EC = ec_leakage(obs.M_key, obs.m_key, ch.f_EC);
    const auto fin = evaluate(RateMode::Finite, src, obs, p, ch);
    const auto asy = evaluate(RateMode::Asymptotic, src, obs, p, ch);
    const auto pp = evaluate(RateMode::PerfectPE, src, obs, p, ch);
    CHECK(fin.K > 0.0);
    CHECK(fin.K <= asy.K);
    CHECK(asy.K <= pp.K * (1.0 + 1e-9));
    CHECK(fin.abort_reason.empty());
    CHECK(fin.eps_sec == doctest::Approx(4.58e-10).epsilon(1e-3));
  }
}

TEST_CASE("rate grows with N and approaches the asymptotic value") {
  const auto src = characterize(test::wide_source(), 4);
  ChannelParams ch;
  double prev = 0.0;
  double last = 0.0;
  for (double N : {1e9, 1e10, 1e11, 1e12}) {
    ProtocolParams p;
    p.N = N;
    const auto obs = expected_counts(src, ch, p);
    p.lambda_EC = ec_leakage(obs.M_key, obs.m_key, ch.f_EC);
    const double K = evaluate(RateMode::Finite, src, obs, p, ch).K;
    CHECK(K >= prev);
    prev = last = K;
  }
  ProtocolParams p;
  const auto obs = expected_counts(src, ch, p);
  p.lambda_EC = ec_leakage(obs.M_key, obs.m_key, ch.f_EC);
  const double asy = evaluate(RateMode::Asymptotic, src, obs, p, ch).K;
  CHECK(last >= 0.5 * asy);
}

TEST_CASE("aborts carry reason codes") {
  const auto src = characterize(test::wide_source(), 4);
  ChannelParams ch;
  ch.L = 400.0;
  ProtocolParams p;
  p.N = 1e9;
  const auto obs = expected_counts(src, ch, p);
  p.lambda_EC = ec_leakage(obs.M_key, obs.m_key, ch.f_EC);
  const auto r = evaluate(RateMode::Finite, src, obs, p, ch);
  CHECK(r.K == 0.0);
  CHECK(r.l == 0);
  CHECK_FALSE(r.abort_reason.empty());
}

TEST_CASE("mode names") {
  for (auto m : {RateMode::Finite, RateMode::Asymptotic, RateMode::PerfectPE}) {
    CHECK(rate_mode_from_string(to_string(m)) == m);
  }
  CHECK_THROWS_AS(rate_mode_from_string("fast"), DomainError);
}

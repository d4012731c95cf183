#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "pqkd/channel.hpp"
#include "pqkd/characterization.hpp"
#include "pqkd/errors.hpp"

using namespace pqkd;

TEST_CASE("channel transmittance") {
  CHECK(channel_eta({0.65, 0.2, 50.0, 1e-6, 1.16}) == doctest::Approx(0.065));
  CHECK(channel_eta({0.65, 0.2, 0.0, 1e-6, 1.16}) == doctest::Approx(0.65));
  CHECK(channel_eta({1.0, 0.2, 100.0, 1e-6, 1.16}) == doctest::Approx(0.01));
  CHECK_THROWS_AS(channel_eta({1.2, 0.2, 0.0, 1e-6, 1.16}), DomainError);
}

TEST_CASE("perfect estimation targets") {
  auto [y, e] = perfect_pe_targets(0.1, 0.0);
  CHECK(y == doctest::Approx(0.1));
  CHECK(e == doctest::Approx(0.0));
  std::tie(y, e) = perfect_pe_targets(0.065, 1e-6);
  CHECK(y == doctest::Approx(0.065001869999065).epsilon(1e-12));
  CHECK(e == doctest::Approx(9.675e-7).epsilon(1e-3));
  std::tie(y, e) = perfect_pe_targets(0.0, 1.0);
  CHECK(y == doctest::Approx(1.0));
  CHECK(e == doctest::Approx(0.5));
}

TEST_CASE("error-correction leakage") {
  CHECK(ec_leakage(1e6, 0.0, 1.16) == 0.0);
  CHECK(ec_leakage(1000, 500, 1.0) == doctest::Approx(1000.0));
  // mpmath: 1.16e6 h(0.02)
  CHECK(ec_leakage(1e6, 2e4, 1.16) == doctest::Approx(164071.02934851195).epsilon(1e-12));
  CHECK(ec_leakage(0.0, 0.0, 1.16) == 0.0);
}

TEST_CASE("expected counts") {
  const auto src = characterize(test::wide_source(), 4);
  ProtocolParams p;

  ChannelParams dark{0.0, 0.2, 0.0, 0.0, 1.16};
  const auto none = expected_counts(src, dark, p);
  for (double x : none.M_key_j) CHECK(x == 0.0);
  for (double x : none.m_test_j) CHECK(x == 0.0);
  CHECK(none.M_key == 0.0);

  ChannelParams only_dark{0.0, 0.2, 0.0, 1e-3, 1.16};
  const auto d = expected_counts(src, only_dark, p);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(d.M_key_j[j] == doctest::Approx(p.N * p.q_K * src.key_select(j) * (1.0 - std::pow(1.0 - 1e-3, 2))).epsilon(1e-10));
  }

  ChannelParams ch;
  ch.L = 30.0;
  const double eta = channel_eta(ch);
  const auto obs = expected_counts(src, ch, p);
  for (std::size_t j = 0; j < 4; ++j) {
    double mix = 0.0;
    const auto& m = src.key[j];
    for (std::size_t n = 0; n < m.pn.size(); ++n) {
      mix += m.pn[n] * (1.0 - std::pow(1.0 - ch.p_d, 2) * std::pow(1.0 - eta, static_cast<double>(n)));
    }
    CHECK(obs.M_key_j[j] / (p.N * p.q_K * src.key_select(j)) == doctest::Approx(mix).epsilon(1e-6));
    CHECK(obs.m_test_j[j] <= obs.M_test_j[j]);
  }
  CHECK(obs.m_key <= obs.M_key);
}

TEST_CASE("expectations fall with distance towards the dark-count floor") {
  const auto src = characterize(test::wide_source(), 4);
  ProtocolParams p;
  ObservedData prev;
  for (double L = 0.0; L <= 300.0; L += 50.0) {
    ChannelParams ch;
    ch.L = L;
    const auto obs = expected_counts(src, ch, p);
    if (!prev.M_key_j.empty()) {
      for (std::size_t j = 0; j < 4; ++j) {
        CHECK(obs.M_key_j[j] <= prev.M_key_j[j]);
        CHECK(obs.M_test_j[j] <= prev.M_test_j[j]);
      }
    }
    prev = obs;
  }
  ChannelParams far;
  far.L = 2000.0;
  const auto obs = expected_counts(src, far, p);
  const double floor = 1.0 - std::pow(1.0 - far.p_d, 2);
  CHECK(obs.M_key_j[0] / (p.N * p.q_K * src.key_select(0)) == doctest::Approx(floor).epsilon(1e-6));
}

TEST_CASE("sampled counts") {
  ObservedData e;
  e.M_key_j = {0.0, 1e4};
  e.M_test_j = {1e4, 500.0};
  e.m_test_j = {100.0, 0.0};
  e.M_key = 1e4;
  e.m_key = 200.0;
  const auto s = sample_counts(e, 1e4, 3);
  CHECK(s.M_key_j[0] == 0.0);
  CHECK(s.M_key_j[1] == 1e4);
  CHECK(s.m_test_j[1] == 0.0);
  CHECK(s.m_test_j[0] <= s.M_test_j[0]);

  ObservedData m;
  m.M_key_j = {2500.0};
  m.M_test_j = {100.0};
  m.m_test_j = {10.0};
  m.M_key = 2500.0;
  m.m_key = 50.0;
  const int seeds = 10000;
  double sum = 0.0;
  for (int i = 0; i < seeds; ++i) sum += sample_counts(m, 1e4, static_cast<std::uint64_t>(i)).M_key_j[0];
  const double sigma = std::sqrt(1e4 * 0.25 * 0.75 / seeds);
  CHECK(std::abs(sum / seeds - 2500.0) < 3.0 * sigma);
  CHECK(sample_counts(m, 1e4, 42).M_key_j == sample_counts(m, 1e4, 42).M_key_j);
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "pqkd/errors.hpp"
#include "pqkd/quadrature.hpp"
#include "pqkd/source.hpp"

using namespace pqkd;
constexpr double kPi = std::numbers::pi;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  for (std::size_t n : {1u, 2u, 5u, 12u}) {
    const auto& pts = quad::gauss_legendre(n);
    for (std::size_t deg = 0; deg < 2 * n; ++deg) {
      double acc = 0.0;
      for (const auto& p : pts) acc += p.w * std::pow(p.x, static_cast<double>(deg));
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1.0);
      CHECK(acc == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("tanh-sinh handles integrable endpoint singularities") {
  // integral_0^1 -log(x) dx = 1, integral_0^2 log(2 - x) dx = 2 log 2 - 2
  double a = 0.0, b = 0.0;
  for (const auto& p : quad::tanh_sinh(0.0, 1.0, 6)) a -= p.w * std::log(p.from_left);
  for (const auto& p : quad::tanh_sinh(0.0, 2.0, 6)) b += p.w * std::log(p.from_right);
  CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(b == doctest::Approx(2.0 * std::log(2.0) - 2.0).epsilon(1e-12));
}

TEST_CASE("intensity density examples") {
  CHECK(intensity_density(kPi / 2, 0.0, 1.0) == doctest::Approx(1.0 / (2.0 * kPi * kPi)));
  const double f0 = intensity_density(0.0, 1.9, 1.0);
  CHECK(std::isfinite(f0));
  CHECK(f0 > 0.0);
  CHECK(intensity_density(kPi / 2, 3.999, 1.0) > 1e3 * intensity_density(kPi / 2, 0.0, 1.0));
  CHECK_THROWS_AS(intensity_density(0.0, 2.1, 1.0), DomainError);
}

TEST_CASE("maximum intensity examples") {
  CHECK(max_intensity(kPi / 2, 1.0) == doctest::Approx(4.0));
  CHECK(max_intensity(0.0, 1.0) == doctest::Approx(2.0));
  CHECK(max_intensity(kPi / 3, 1.0) == doctest::Approx(8.0 / 3.0));
  CHECK(max_intensity(kPi - kPi / 3, 1.0) == doctest::Approx(8.0 / 3.0));
}

TEST_CASE("normalization over the full domain") {
  for (double nu_t : {0.05, 0.2, 1.0}) {
    CHECK(region_average(full_domain(), integrand::Unit{}, nu_t, 1e-9) ==
          doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("region moments match frozen high-precision values") {
  // Independent mpmath evaluation of the defining integrals.
  const auto cfg = test::wide_source();
  const auto key = region_moments(key_region(cfg, 0, Pole::R), kDefaultNMax, cfg.nu_t);
  CHECK(key.p_select == doctest::Approx(0.0877109576270202392).epsilon(1e-9));
  CHECK(key.lambda == doctest::Approx(0.95732400189855189243).epsilon(1e-9));
  const auto test = region_moments(test_region(cfg, 0, Pole::H), kDefaultNMax, cfg.nu_t);
  CHECK(test.p_select == doctest::Approx(0.017127889233098966874).epsilon(1e-9));
  CHECK(test.lambda == doctest::Approx(0.98828971020573012913).epsilon(1e-9));
}

TEST_CASE("mirror symmetry R/L and H/V") {
  const auto cfg = test::wide_source();
  for (std::size_t j = 0; j < 4; ++j) {
    const auto r = region_moments(key_region(cfg, j, Pole::R), kDefaultNMax, cfg.nu_t);
    const auto l = region_moments(key_region(cfg, j, Pole::L), kDefaultNMax, cfg.nu_t);
    CHECK(r.p_select == doctest::Approx(l.p_select).epsilon(1e-10));
    CHECK(r.lambda == doctest::Approx(l.lambda).epsilon(1e-10));
    CHECK(r.w1 == doctest::Approx(l.w1).epsilon(1e-10));
    const auto h = region_moments(test_region(cfg, j, Pole::H), kDefaultNMax, cfg.nu_t);
    const auto v = region_moments(test_region(cfg, j, Pole::V), kDefaultNMax, cfg.nu_t);
    CHECK(h.p_select == doctest::Approx(v.p_select).epsilon(1e-10));
    CHECK(h.lambda == doctest::Approx(v.lambda).epsilon(1e-10));
    for (int n = 0; n <= 6; ++n) CHECK(h.pn[n] == doctest::Approx(v.pn[n]).epsilon(1e-10));
  }
}

TEST_CASE("photon statistics are a Poisson mixture") {
  const auto cfg = test::wide_source();
  for (std::size_t j = 0; j < 4; ++j) {
    for (const auto& spec : {key_region(cfg, j, Pole::R), test_region(cfg, j, Pole::H)}) {
      const auto rule = build_rule(geometry_of(spec), cfg.nu_t);
      const auto m = region_moments(rule, spec.pole);
      double total = 0.0;
      for (double p : m.pn) {
        CHECK(p >= 0.0);
        total += p;
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
      for (double eta : {0.0, 0.1, 0.5, 1.0}) {
        double mix = 0.0;
        for (std::size_t n = 0; n < m.pn.size(); ++n) mix += m.pn[n] * std::pow(1.0 - eta, n);
        const double mgf = rule.average([&](const QuadNode& q) { return std::exp(-q.intensity * eta); }) /
                           m.p_select;
        CHECK(std::abs(mix - mgf) < 1e-6);
      }
    }
  }
}

TEST_CASE("lambda limits and range") {
  SourceConfig narrow = SourceConfig::with_width(0.05, 0.2, 1e-3, 1e-3, 1e-3);
  CHECK(region_moments(key_region(narrow, 0, Pole::R), 8, narrow.nu_t).lambda ==
        doctest::Approx(1.0).epsilon(1e-5));
  CHECK(region_moments(test_region(narrow, 0, Pole::H), 8, narrow.nu_t).lambda ==
        doctest::Approx(1.0).epsilon(1e-5));
  for (const auto& cfg : {test::reference_source(), test::wide_source()}) {
    for (std::size_t j = 0; j < 4; ++j) {
      for (const auto& spec : {key_region(cfg, j, Pole::R), key_region(cfg, j, Pole::L),
                               test_region(cfg, j, Pole::H), test_region(cfg, j, Pole::V)}) {
        const auto m = region_moments(spec, 8, cfg.nu_t);
        CHECK(m.lambda > 0.0);
        CHECK(m.lambda < 1.0);
        CHECK(m.p_select > 0.0);
        CHECK(m.p_select <= 1.0);
      }
    }
  }
}

TEST_CASE("selection probability shrinks with the region") {
  const auto base = test::wide_source();
  const auto p = [](const SourceConfig& c, Basis b) {
    return region_moments(b == Basis::Key ? key_region(c, 0, Pole::R) : test_region(c, 1, Pole::H), 4, c.nu_t)
        .p_select;
  };
  auto c = base;
  c.dtheta_key *= 0.8;
  CHECK(p(c, Basis::Key) < p(base, Basis::Key));
  c = base;
  c.dtheta_test *= 0.8;
  CHECK(p(c, Basis::Test) < p(base, Basis::Test));
  c = base;
  c.dphi_test *= 0.8;
  CHECK(p(c, Basis::Test) < p(base, Basis::Test));
  c = base;
  c.key_intervals[0].lo += 0.05;
  c.test_intervals[1].hi -= 0.05;
  CHECK(p(c, Basis::Key) < p(base, Basis::Key));
  CHECK(p(c, Basis::Test) < p(base, Basis::Test));
}

TEST_CASE("unions") {
  const auto cfg = test::wide_source();
  std::vector<RegionSpec> keys, tests;
  double sum = 0.0, lo = 1.0, hi = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    keys.push_back(key_region(cfg, j, Pole::R));
    tests.push_back(test_region(cfg, j, Pole::H));
    sum += region_moments(keys.back(), 4, cfg.nu_t).p_select;
    const double l = region_moments(tests.back(), 4, cfg.nu_t).lambda;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  CHECK(union_moments(keys, cfg.nu_t).p_select == doctest::Approx(sum).epsilon(1e-9));
  const auto u = union_moments(tests, cfg.nu_t);
  const auto widest = region_moments(tests[0], kDefaultNMax, cfg.nu_t);
  CHECK(u.p_select == doctest::Approx(widest.p_select).epsilon(1e-12));
  CHECK(u.lambda == doctest::Approx(widest.lambda).epsilon(1e-12));
  CHECK(u.lambda >= lo);
  CHECK(u.lambda <= hi);

  const auto merged = merge_intervals({{0.5, 0.7}, {0.0, 0.2}, {0.1, 0.3}, {0.7, 0.8}});
  REQUIRE(merged.size() == 2);
  CHECK(merged[0] == IntensityInterval{0.0, 0.3});
  CHECK(merged[1] == IntensityInterval{0.5, 0.8});
}

TEST_CASE("config validation") {
  auto cfg = test::wide_source();
  CHECK_NOTHROW(cfg.validate());
  cfg.key_intervals[1] = {0.1, 0.2};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = test::wide_source();
  cfg.nu_t = 0.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = test::wide_source();
  cfg.dphi_test = kPi / 2;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  CHECK_THROWS_AS(IntensityInterval({0.5, 0.5}).validate(), DomainError);
  CHECK_THROWS_AS(IntensityInterval({0.2, 1.1}).validate(), DomainError);
}

TEST_CASE("empty clipped region is reported") {
  // At the pole I* = 2 nu_t, so [0.75, 1) of 4 nu_t needs theta >= ~1.23.
  RegionGeometry g{0.0, 0.1, 0.0, kPi, {0.75, 1.0}};
  try {
    build_rule(g, 0.2);
    FAIL("expected an empty-region error");
  } catch (const QuadratureError& e) {
    CHECK(e.kind() == QuadratureError::Kind::EmptyRegion);
  }
}

TEST_CASE("phi factor rejects windows with an imaginary part") {
  RegionGeometry g{1.0, 2.0, 0.3, 0.2, {0.0, 1.0}};
  CHECK_THROWS_AS(phi_factor(g, 1), DomainError);
  g.phi_center = 0.0;
  CHECK(phi_factor(g, 0) == doctest::Approx(0.2 / kPi));
  CHECK(phi_factor(g, 1) == doctest::Approx(std::sin(0.2) / kPi));
}

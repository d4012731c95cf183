#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "pqkd/errors.hpp"
#include "pqkd/fock.hpp"

using namespace pqkd;

namespace {

FockMatrix pure(double a, double b) {
  FockMatrix m;
  m.n = 1;
  m.rho.resize(2, 2);
  m.rho << a * a, a * b, a * b, b * b;
  return m;
}

}  // namespace

TEST_CASE("single-photon key and test matrices have the two-level structure") {
  for (const auto& cfg : {test::reference_source(), test::wide_source()}) {
    for (std::size_t j = 0; j < 4; ++j) {
      const auto key = key_region(cfg, j, Pole::R);
      const auto m = fock_matrix(key, 1, cfg.nu_t);
      const double lk = region_moments(key, 4, cfg.nu_t).lambda;
      CHECK(m.rho(0, 0) == doctest::Approx((1.0 + lk) / 2.0).epsilon(1e-8));
      CHECK(m.rho(1, 1) == doctest::Approx((1.0 - lk) / 2.0).epsilon(1e-8));
      CHECK(std::abs(m.rho(0, 1)) < 1e-12);

      const auto h = test_region(cfg, j, Pole::H);
      const auto t = fock_matrix(h, 1, cfg.nu_t);
      const double lt = region_moments(h, 4, cfg.nu_t).lambda;
      CHECK(t.rho(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
      CHECK(t.rho(1, 1) == doctest::Approx(0.5).epsilon(1e-8));
      CHECK(t.rho(0, 1) == doctest::Approx(lt / 2.0).epsilon(1e-8));
      CHECK(t.rho(1, 0) == doctest::Approx(lt / 2.0).epsilon(1e-8));
    }
  }
}

TEST_CASE("vacuum matrices") {
  const auto cfg = test::wide_source();
  for (const auto& spec : {key_region(cfg, 2, Pole::L), test_region(cfg, 2, Pole::V)}) {
    const auto m = fock_matrix(spec, 0, cfg.nu_t);
    REQUIRE(m.rho.rows() == 1);
    CHECK(m.rho(0, 0) == doctest::Approx(1.0));
  }
  CHECK(mixed_basis_matrix(key_region(cfg, 0, Pole::R), key_region(cfg, 0, Pole::L), 0, cfg.nu_t)
            .rho(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("mixed key-basis states") {
  const auto cfg = test::wide_source();
  for (std::size_t j = 0; j < 4; ++j) {
    const auto r = key_region(cfg, j, Pole::R);
    const auto l = key_region(cfg, j, Pole::L);
    const auto one = mixed_basis_matrix(r, l, 1, cfg.nu_t);
    CHECK(trace_distance(one, mixed_basis_matrix(fock_matrix(r, 1, cfg.nu_t), fock_matrix(l, 1, cfg.nu_t))) < 1e-12);
    CHECK(one.rho(0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(one.rho(1, 1) == doctest::Approx(0.5).epsilon(1e-8));
    const auto two = mixed_basis_matrix(r, l, 2, cfg.nu_t);
    CHECK(two.trace() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(two.min_eigenvalue() >= -1e-10);
    CHECK(std::abs(two.rho(0, 1)) + std::abs(two.rho(0, 2)) + std::abs(two.rho(1, 2)) < 1e-12);
  }
  CHECK_THROWS_AS(mixed_basis_matrix(key_region(cfg, 0, Pole::R), key_region(cfg, 1, Pole::L), 1, cfg.nu_t),
                  DomainError);
}

TEST_CASE("matrices are unit-trace and positive semidefinite") {
  const auto cfg = test::wide_source();
  for (int n = 0; n <= 4; ++n) {
    for (const auto& spec : {key_region(cfg, 0, Pole::R), key_region(cfg, 3, Pole::L),
                             test_region(cfg, 0, Pole::H), test_region(cfg, 3, Pole::V)}) {
      const auto m = fock_matrix(spec, n, cfg.nu_t);
      CHECK(m.trace() == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(m.min_eigenvalue() >= -1e-10);
      CHECK((m.rho - m.rho.transpose()).norm() < 1e-14);
    }
  }
}

TEST_CASE("trace distance examples") {
  const auto R = pure(1.0, 0.0);
  const auto L = pure(0.0, 1.0);
  const double s = std::sqrt(0.5);
  const auto H = pure(s, s);
  FockMatrix mixed;
  mixed.n = 1;
  mixed.rho = Eigen::MatrixXd::Identity(2, 2) / 2.0;
  CHECK(trace_distance(R, R) == doctest::Approx(0.0));
  CHECK(trace_distance(R, L) == doctest::Approx(1.0));
  CHECK(trace_distance(mixed, H) == doctest::Approx(0.5));
  FockMatrix other;
  other.n = 2;
  other.rho = Eigen::MatrixXd::Identity(3, 3) / 3.0;
  CHECK_THROWS_AS(trace_distance(R, other), DomainError);
}

TEST_CASE("trace distance tables") {
  const auto cfg = test::wide_source();
  const auto td = td_tables(cfg, 4);
  std::vector<double> lt;
  for (std::size_t j = 0; j < 4; ++j) lt.push_back(region_moments(test_region(cfg, j, Pole::H), 4, cfg.nu_t).lambda);
  for (std::size_t j = 0; j < 4; ++j) {
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(td.test_td(1, j, k) == doctest::Approx(std::abs(lt[j] - lt[k]) / 2.0).epsilon(1e-8));
      for (int n = 2; n <= 4; ++n) {
        CHECK(td.key_td(n, j, k) == doctest::Approx(td.key_td(n, k, j)));
        CHECK(td.key_td(n, j, k) >= 0.0);
        CHECK(td.key_td(n, j, k) <= 1.0);
      }
    }
    CHECK(td.test_td(2, j, j) == doctest::Approx(0.0));
  }
  // Single-photon key states coincide across settings.
  const auto a = mixed_basis_matrix(key_region(cfg, 0, Pole::R), key_region(cfg, 0, Pole::L), 1, cfg.nu_t);
  const auto b = mixed_basis_matrix(key_region(cfg, 3, Pole::R), key_region(cfg, 3, Pole::L), 1, cfg.nu_t);
  CHECK(trace_distance(a, b) < 1e-8);
  CHECK(trace_distance(a, pure(1.0, 0.0)) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("H and V tables agree") {
  const auto cfg = test::wide_source();
  for (int n = 1; n <= 3; ++n) {
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t k = j + 1; k < 4; ++k) {
        const double h = trace_distance(fock_matrix(test_region(cfg, j, Pole::H), n, cfg.nu_t),
                                        fock_matrix(test_region(cfg, k, Pole::H), n, cfg.nu_t));
        const double v = trace_distance(fock_matrix(test_region(cfg, j, Pole::V), n, cfg.nu_t),
                                        fock_matrix(test_region(cfg, k, Pole::V), n, cfg.nu_t));
        CHECK(h == doctest::Approx(v).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("triangle inequality on produced matrices") {
  const auto cfg = test::wide_source();
  std::vector<FockMatrix> pool;
  for (std::size_t j = 0; j < 4; ++j) {
    pool.push_back(fock_matrix(test_region(cfg, j, Pole::H), 3, cfg.nu_t));
    pool.push_back(fock_matrix(test_region(cfg, j, Pole::V), 3, cfg.nu_t));
    pool.push_back(fock_matrix(key_region(cfg, j, Pole::R), 3, cfg.nu_t));
    pool.push_back(mixed_basis_matrix(key_region(cfg, j, Pole::R), key_region(cfg, j, Pole::L), 3, cfg.nu_t));
  }
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  for (int t = 0; t < 200; ++t) {
    const auto& a = pool[pick(rng)];
    const auto& b = pool[pick(rng)];
    const auto& c = pool[pick(rng)];
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12);
  }
}

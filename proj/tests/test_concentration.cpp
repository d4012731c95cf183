#include <doctest.h>

#include <cmath>
#include <random>

#include "pqkd/concentration.hpp"
#include "pqkd/errors.hpp"

using namespace pqkd;

TEST_CASE("closed-form coefficients match a numerical argmin") {
  // Frozen from an independent mpmath minimization of the deviation at the
  // guess under the constraint defining b(a).
  struct Case {
    double n, guess, eps, dl, du, rl, ru;
  };
  const Case cases[] = {
      {1e4, 100, 0.05, 6.02539540073, 5.98546293726, 6.85916673981, 5.36650443518},
      {1e6, 1e4, 1e-20, 23.6487586351, 23.5873588794, 24.8167864685, 22.5477629669},
  };
  for (const auto& c : cases) {
    CHECK(static_cast<double>(kato_direct_lower_coeffs(c.n, c.guess, c.eps).a) == doctest::Approx(c.dl).epsilon(1e-9));
    CHECK(static_cast<double>(kato_direct_upper_coeffs(c.n, c.guess, c.eps).a) == doctest::Approx(c.du).epsilon(1e-9));
    CHECK(static_cast<double>(kato_reverse_lower_coeffs(c.n, c.guess, c.eps).a) == doctest::Approx(c.rl).epsilon(1e-9));
    CHECK(static_cast<double>(kato_reverse_upper_coeffs(c.n, c.guess, c.eps).a) == doctest::Approx(c.ru).epsilon(1e-9));
  }
}

TEST_CASE("coefficients satisfy b > |a|") {
  for (double n : {1e4, 1e8, 1e12}) {
    for (double frac : {1e-6, 0.01, 0.5, 0.99}) {
      for (double eps : {1e-20, 1e-5, 0.3}) {
        for (auto f : {kato_direct_lower_coeffs, kato_direct_upper_coeffs, kato_reverse_lower_coeffs,
                       kato_reverse_upper_coeffs}) {
          const auto c = f(n, frac * n, eps);
          CHECK(c.b > std::abs(c.a));
        }
      }
    }
  }
}

TEST_CASE("a = 0 gives the Hoeffding deviation") {
  const double n = 1e6, eps = 1e-10, lam = 3e5;
  const double dev = std::sqrt(n * std::log(1.0 / eps) / 2.0);
  const KatoCoeffs c{0.0L, kato_b_for(n, 0.0L, eps, false)};
  CHECK(lam - kato_direct_lower(n, lam, c) == doctest::Approx(dev).epsilon(1e-12));
  const KatoCoeffs cu{0.0L, kato_b_for(n, 0.0L, eps, true)};
  CHECK(kato_direct_upper(n, lam, cu) - lam == doctest::Approx(dev).epsilon(1e-12));
}

TEST_CASE("direct bounds bracket the input") {
  CHECK(kato_direct_lower(1e6, 1e4, 1e4, 1e-20) < 1e4);
  CHECK(kato_direct_lower(1e6, 1e4, 1e4, 1e-20) > 1e4 - 1e3);
  for (double lam : {0.0, 10.0, 5e3, 1e4}) {
    CHECK(kato_direct_lower(1e4, lam, 100, 1e-5) < lam);
    CHECK(kato_direct_upper(1e4, lam, 100, 1e-5) > lam);
  }
  double prev = INFINITY;
  for (double eps : {1e-20, 1e-10, 1e-2}) {
    const double w = kato_direct_upper(1e6, 1e4, 1e4, eps) - kato_direct_lower(1e6, 1e4, 1e4, eps);
    CHECK(w < prev);
    prev = w;
  }
}

TEST_CASE("reverse bounds") {
  const double r = kato_reverse_lower(1e6, 1e4, 1e4, 1e-20);
  CHECK(r > 9e3);
  CHECK(r < 1e4);
  for (double s : {1.0, 100.0, 5e3, 9999.0}) {
    CHECK(kato_reverse_lower(1e4, s, s, 1e-5) < s);
    CHECK(kato_reverse_upper(1e4, s, s, 1e-5) > s);
  }
  // Monotone in s for a fixed guess, including far outside the regime.
  double lo_prev = -INFINITY, hi_prev = -INFINITY;
  for (double s = 0.0; s <= 1e4; s += 50.0) {
    const double lo = kato_reverse_lower(1e4, s, 10.0, 1e-3);
    const double hi = kato_reverse_upper(1e4, s, 10.0, 1e-3);
    CHECK(lo >= lo_prev);
    CHECK(hi >= hi_prev);
    lo_prev = lo;
    hi_prev = hi;
  }
}

TEST_CASE("bounds collapse as eps approaches one") {
  const double n = 1e6, s = 2e4;
  const double eps = 1.0 - 1e-12;
  CHECK(kato_reverse_upper(n, s, s, eps) == doctest::Approx(s).epsilon(1e-4));
  CHECK(kato_reverse_lower(n, s, s, eps) == doctest::Approx(s).epsilon(1e-4));
  CHECK(kato_direct_upper(n, s, s, eps) == doctest::Approx(s).epsilon(1e-4));
  CHECK(kato_direct_lower(n, s, s, eps) == doctest::Approx(s).epsilon(1e-4));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(kato_direct_lower(100, 101, 10, 0.1), DomainError);
  CHECK_THROWS_AS(kato_direct_lower(100, 10, 10, 0.0), DomainError);
  CHECK_THROWS_AS(kato_reverse_upper(100, -1, 10, 0.1), DomainError);
  CHECK_THROWS_AS(kato_direct_upper(100, 10, 10, 1.0), DomainError);
  CHECK_THROWS_AS(serfling_upsilon(1, 0.5, 0.1), DomainError);
}

TEST_CASE("serfling term") {
  CHECK(serfling_upsilon(0, 10, 1e-20) == 0.0);
  CHECK(serfling_upsilon(100, 100, 1e-20) == doctest::Approx(68.20).epsilon(1e-4));
  CHECK(serfling_upsilon(101, 100, 1e-20) > serfling_upsilon(100, 100, 1e-20));
  CHECK(serfling_upsilon(100, 101, 1e-20) < serfling_upsilon(100, 100, 1e-20));
}

TEST_CASE("coverage holds for misjudged guesses") {
  const double n = 1e4, eps = 0.05, p = 0.1;
  const int trials = 1000;
  std::mt19937_64 rng(11);
  std::binomial_distribution<long long> draw(static_cast<long long>(n), p);
  const double truth = n * p;
  for (double guess : {2.0 * truth, truth / 2.0}) {
    int dl = 0, du = 0, rl = 0, ru = 0;
    for (int t = 0; t < trials; ++t) {
      const double s = static_cast<double>(draw(rng));
      dl += truth < kato_direct_lower(n, s, guess, eps);
      du += truth > kato_direct_upper(n, s, guess, eps);
      rl += s < kato_reverse_lower(n, truth, guess, eps);
      ru += s > kato_reverse_upper(n, truth, guess, eps);
    }
    const double limit = (eps + 3.0 * std::sqrt(eps / trials)) * trials;
    CHECK(dl <= limit);
    CHECK(du <= limit);
    CHECK(rl <= limit);
    CHECK(ru <= limit);
  }
}

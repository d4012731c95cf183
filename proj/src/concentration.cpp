#include "pqkd/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

using ld = long double;

void check_common(double n, double eps) {
  if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("Kato: N must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("Kato: eps must lie in (0, 1)");
}

void check_count(double n, double x, const char* name) {
  if (!(x >= 0.0 && x <= n)) {
    throw DomainError(std::string("Kato: ") + name + " must lie in [0, N]");
  }
}

}  // namespace

long double kato_b_for(double n, long double a, double eps, bool upper) {
  check_common(n, eps);
  const ld nn = n;
  const ld sn = std::sqrt(nn);
  const ld le = std::log(static_cast<ld>(eps));
  const ld sign = upper ? 1.0L : -1.0L;
  // exp(-2(b^2 - a^2)/(1 + sign 4a/3sqrt(N))^2) = eps
  return std::sqrt(18.0L * nn * a * a - (16.0L * a * a + sign * 24.0L * sn * a + 9.0L * nn) * le) /
         (3.0L * std::sqrt(2.0L * nn));
}

KatoCoeffs kato_direct_lower_coeffs(double n, double guess, double eps) {
  check_common(n, eps);
  check_count(n, guess, "guess");
  const ld nn = n, g = guess, sn = std::sqrt(nn);
  const ld le = std::log(static_cast<ld>(eps));
  const ld x = 9.0L * g * (nn - g) - 2.0L * nn * le;
  const ld a = 3.0L *
               (9.0L * std::sqrt(2.0L) * nn * (nn - 2.0L * g) * std::sqrt(-le * x) +
                16.0L * nn * sn * le * le - 72.0L * g * sn * (nn - g) * le) /
               (4.0L * (9.0L * nn - 8.0L * le) * x);
  return {a, kato_b_for(n, a, eps, false)};
}

KatoCoeffs kato_direct_upper_coeffs(double n, double guess, double eps) {
  check_common(n, eps);
  check_count(n, guess, "guess");
  const ld nn = n, g = guess, sn = std::sqrt(nn);
  const ld le = std::log(static_cast<ld>(eps));
  const ld x = 9.0L * g * (nn - g) - 2.0L * nn * le;
  const ld a = 3.0L *
               (9.0L * std::sqrt(2.0L) * nn * (nn - 2.0L * g) * std::sqrt(-le * x) -
                16.0L * nn * sn * le * le + 72.0L * g * sn * (nn - g) * le) /
               (4.0L * (9.0L * nn - 8.0L * le) * x);
  return {a, kato_b_for(n, a, eps, true)};
}

KatoCoeffs kato_reverse_lower_coeffs(double n, double guess, double eps) {
  check_common(n, eps);
  check_count(n, guess, "guess");
  const ld nn = n, s = guess, sn = std::sqrt(nn);
  const ld le = std::log(static_cast<ld>(eps));
  const ld poly = 8.0L * s * s - 8.0L * nn * s + 3.0L * nn * nn;
  const ld den = 4.0L * nn * le * le + 36.0L * (2.0L * s * s - 2.0L * nn * s + nn * nn) * le +
                 81.0L * nn * s * (nn - s);
  const ld root = std::sqrt(nn * le * (nn * le - 18.0L * s * (nn - s)));
  ld a = 3.0L * sn * (9.0L * (nn - 2.0L * s) * root - 4.0L * nn * le * le - 9.0L * poly * le) /
         (4.0L * den);
  a = std::max(a, -sn / 2.0L);
  return {a, kato_b_for(n, a, eps, true)};
}

KatoCoeffs kato_reverse_upper_coeffs(double n, double guess, double eps) {
  check_common(n, eps);
  check_count(n, guess, "guess");
  const ld nn = n, s = guess, sn = std::sqrt(nn);
  const ld le = std::log(static_cast<ld>(eps));
  const ld poly = 8.0L * s * s - 8.0L * nn * s + 3.0L * nn * nn;
  const ld den = 4.0L * nn * le * le + 36.0L * (2.0L * s * s - 2.0L * nn * s + nn * nn) * le +
                 81.0L * nn * s * (nn - s);
  const ld root = std::sqrt(nn * le * (nn * le + 18.0L * s * (s - nn)));
  ld a = 3.0L * sn * (9.0L * (nn - 2.0L * s) * root + 4.0L * nn * le * le + 9.0L * poly * le) /
         (4.0L * den);
  a = std::min(a, sn / 2.0L);
  return {a, kato_b_for(n, a, eps, false)};
}

double kato_direct_lower(double n, double lam, const KatoCoeffs& c) {
  check_count(n, lam, "observed count");
  const ld nn = n;
  return static_cast<double>(lam - (c.b + c.a * (2.0L * lam / nn - 1.0L)) * std::sqrt(nn));
}

double kato_direct_upper(double n, double lam, const KatoCoeffs& c) {
  check_count(n, lam, "observed count");
  const ld nn = n;
  return static_cast<double>(lam + (c.b + c.a * (2.0L * lam / nn - 1.0L)) * std::sqrt(nn));
}

double kato_reverse_lower(double n, double s, const KatoCoeffs& c) {
  if (!(s >= 0.0 && s <= n)) throw DomainError("Kato: s must lie in [0, N]");
  const ld nn = n, sn = std::sqrt(nn);
  const ld den = 2.0L * c.a + sn;
  if (den <= 0.0L) return -std::numeric_limits<double>::infinity();
  return static_cast<double>((sn * s + nn * (c.a - c.b)) / den);
}

double kato_reverse_upper(double n, double s, const KatoCoeffs& c) {
  if (!(s >= 0.0 && s <= n)) throw DomainError("Kato: s must lie in [0, N]");
  const ld nn = n, sn = std::sqrt(nn);
  const ld den = sn - 2.0L * c.a;
  if (den <= 0.0L) return std::numeric_limits<double>::infinity();
  return static_cast<double>((sn * s - nn * (c.a - c.b)) / den);
}

double kato_direct_lower(double n, double lam, double guess, double eps) {
  return kato_direct_lower(n, lam, kato_direct_lower_coeffs(n, guess, eps));
}

double kato_direct_upper(double n, double lam, double guess, double eps) {
  return kato_direct_upper(n, lam, kato_direct_upper_coeffs(n, guess, eps));
}

double kato_reverse_lower(double n, double s, double guess, double eps) {
  return kato_reverse_lower(n, s, kato_reverse_lower_coeffs(n, guess, eps));
}

double kato_reverse_upper(double n, double s, double guess, double eps) {
  return kato_reverse_upper(n, s, kato_reverse_upper_coeffs(n, guess, eps));
}

double serfling_upsilon(double x, double y, double z) {
  if (!(x >= 0.0)) throw DomainError("Serfling: x must be non-negative");
  if (!(y >= 1.0)) throw DomainError("Serfling: y must be at least 1 (empty test sample)");
  if (!(z > 0.0 && z < 1.0)) throw DomainError("Serfling: z must lie in (0, 1)");
  return std::sqrt((x + y) * x * (y + 1.0) * std::log(1.0 / z) / (2.0 * y * y));
}

}  // namespace pqkd

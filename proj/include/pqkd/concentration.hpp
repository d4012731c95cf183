#pragma once

// Kato's martingale inequality in direct form (bounds on the sum of
// conditional probabilities given an observed count) and reverse form
// (bounds on a count given the sum of conditional probabilities), plus the
// Serfling correction for sampling without replacement.
//
// Counts are real numbers so that expected values can be fed in directly.
// Coefficients are evaluated in long double; ln(eps) is natural log.

namespace pqkd {

struct KatoCoeffs {
  long double a = 0.0L;
  long double b = 0.0L;
};

/// Optimal (a, b) for the given guess. The reverse variants include the
/// monotonicity clamp |a| <= sqrt(N)/2 on the relevant side.
KatoCoeffs kato_direct_lower_coeffs(double n, double guess, double eps);
KatoCoeffs kato_direct_upper_coeffs(double n, double guess, double eps);
KatoCoeffs kato_reverse_lower_coeffs(double n, double guess, double eps);
KatoCoeffs kato_reverse_upper_coeffs(double n, double guess, double eps);

/// b that saturates the failure-probability constraint for a forced a.
/// `upper` selects the (1 + 4a/3sqrt(N)) form, otherwise (1 - 4a/3sqrt(N)).
long double kato_b_for(double n, long double a, double eps, bool upper);

/// Lower bound on sum Pr(xi_u = 1 | F_{u-1}) given the count lam.
double kato_direct_lower(double n, double lam, double guess, double eps);
double kato_direct_lower(double n, double lam, const KatoCoeffs& c);

/// Upper bound on sum Pr(xi_u = 1 | F_{u-1}) given the count lam.
double kato_direct_upper(double n, double lam, double guess, double eps);
double kato_direct_upper(double n, double lam, const KatoCoeffs& c);

/// Lower bound on the count given the conditional-probability sum s.
/// Returns -inf when the clamp lands on the singular point a = -sqrt(N)/2.
double kato_reverse_lower(double n, double s, double guess, double eps);
double kato_reverse_lower(double n, double s, const KatoCoeffs& c);

/// Upper bound on the count given s. Returns +inf at a = sqrt(N)/2.
double kato_reverse_upper(double n, double s, double guess, double eps);
double kato_reverse_upper(double n, double s, const KatoCoeffs& c);

/// sqrt((x + y) x (y + 1) ln(1/z) / (2 y^2)).
double serfling_upsilon(double x, double y, double z);

}  // namespace pqkd

#pragma once

// Protocol-level parameters and observables shared by the estimation,
// channel and key-rate modules.

#include <vector>

namespace pqkd {

struct ProtocolParams {
  double N = 1e10;        // number of transmission rounds
  double q_K = 0.9;       // key-basis probability; q_T = 1 - q_K
  double eps = 1e-20;     // failure probability of each concentration bound
  double eps_cor = 1e-20;
  double eps_PA = 1e-20;
  double delta = 1e-20;
  int n_cut = 4;
  double lambda_EC = 0.0;  // error-correction leakage in bits

  double q_T() const { return 1.0 - q_K; }

  /// Throws DomainError on the first violated invariant.
  void validate() const;
};

/// Observed (or expected) counts. Real-valued so that expectations can be
/// used directly; sample_counts produces integral values.
struct ObservedData {
  std::vector<double> M_key_j;   // key-basis counts per key setting (both poles)
  std::vector<double> M_test_j;  // test-basis counts per test setting
  std::vector<double> m_test_j;  // test-basis error counts per test setting
  double M_key = 0.0;            // sifted key size
  double m_key = 0.0;            // sifted key bit errors

  /// Checks 0 <= m <= M component-wise and all counts <= N.
  void validate(double N) const;
};

/// Binary entropy in bits; h(0) = h(1) = 0. Throws DomainError outside [0, 1].
double binary_entropy(double x);

}  // namespace pqkd

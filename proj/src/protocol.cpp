#include "pqkd/protocol.hpp"

#include <cmath>

#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw DomainError(msg);
}

bool open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

void ProtocolParams::validate() const {
  require(N >= 1.0 && std::isfinite(N), "N must be at least 1");
  require(open_unit(q_K), "q_K must lie in (0, 1)");
  require(open_unit(eps), "eps must lie in (0, 1)");
  require(open_unit(eps_cor), "eps_cor must lie in (0, 1)");
  require(open_unit(eps_PA), "eps_PA must lie in (0, 1)");
  require(delta > 0.0 && std::isfinite(delta), "delta must be positive");
  require(n_cut >= 1, "n_cut must be at least 1");
  require(lambda_EC >= 0.0 && std::isfinite(lambda_EC), "lambda_EC must be non-negative");
}

void ObservedData::validate(double N) const {
  require(M_test_j.size() == m_test_j.size(), "test counts and error counts differ in size");
  auto in_range = [N](double x) { return x >= 0.0 && x <= N; };
  for (double x : M_key_j) require(in_range(x), "key counts must lie in [0, N]");
  for (std::size_t j = 0; j < M_test_j.size(); ++j) {
    require(in_range(M_test_j[j]) && in_range(m_test_j[j]), "test counts must lie in [0, N]");
    require(m_test_j[j] <= M_test_j[j], "test error count exceeds test count");
  }
  require(in_range(M_key) && in_range(m_key), "sifted counts must lie in [0, N]");
  require(m_key <= M_key, "sifted error count exceeds sifted size");
}

double binary_entropy(double x) {
  require(x >= 0.0 && x <= 1.0, "binary entropy argument must lie in [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

}  // namespace pqkd

#pragma once

// Density matrices of post-selected n-photon states in the basis
// |k> ~ a_R^{n-k} a_L^k |vac>, k = 0..n, and trace distances between them.

#include <Eigen/Dense>
#include <vector>

#include "pqkd/source.hpp"

namespace pqkd {

struct FockMatrix {
  int n = 0;
  Eigen::MatrixXd rho;  // (n+1) x (n+1), real symmetric

  double trace() const { return rho.trace(); }
  double min_eigenvalue() const;
};

/// Normalized n-photon state of one region, integrated on a prepared rule.
/// Throws QuadratureError(Degenerate) if the n-photon weight underflows.
FockMatrix fock_matrix(const RegionRule& rule, int n);
FockMatrix fock_matrix(const RegionSpec& region, int n, double nu_t,
                       double tol = 1e-9);

/// Equal-weight mixture of the two pole states of one key setting.
FockMatrix mixed_basis_matrix(const RegionSpec& region_r,
                              const RegionSpec& region_l, int n, double nu_t,
                              double tol = 1e-9);
FockMatrix mixed_basis_matrix(const FockMatrix& a, const FockMatrix& b);

/// D(A, B) = 1/2 sum |eig(A - B)|. Throws DomainError on size mismatch.
double trace_distance(const FockMatrix& a, const FockMatrix& b);

/// Square table indexed [n][j][k]; entries for n outside the computed
/// range are left empty.
struct TdTables {
  int n_cut = 0;
  std::vector<std::vector<std::vector<double>>> key;   // n = 2..n_cut
  std::vector<std::vector<std::vector<double>>> test;  // n = 1..n_cut, H regions

  double key_td(int n, std::size_t j, std::size_t k) const;
  double test_td(int n, std::size_t j, std::size_t k) const;
};

/// Pairwise trace distances between the settings of one basis.
TdTables td_tables(const SourceConfig& cfg, int n_cut, double tol = 1e-9);

/// Same, reusing prepared rules (indexed by setting).
TdTables td_tables(const std::vector<RegionRule>& key_r,
                   const std::vector<RegionRule>& key_l,
                   const std::vector<RegionRule>& test_h, int n_cut);

}  // namespace pqkd

#include "pqkd/fock.hpp"

#include <cmath>
#include <limits>

#include "pqkd/errors.hpp"

namespace pqkd {

namespace {

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

using Table = std::vector<std::vector<double>>;

Table pairwise(const std::vector<FockMatrix>& states) {
  const std::size_t s = states.size();
  Table t(s, std::vector<double>(s, 0.0));
  for (std::size_t j = 0; j < s; ++j) {
    for (std::size_t k = j + 1; k < s; ++k) {
      t[j][k] = t[k][j] = trace_distance(states[j], states[k]);
    }
  }
  return t;
}

double lookup(const std::vector<Table>& tables, int n, std::size_t j, std::size_t k,
              const char* what) {
  if (n < 0 || static_cast<std::size_t>(n) >= tables.size() || tables[n].empty()) {
    throw DomainError(std::string("no ") + what + " trace distance for this photon number");
  }
  const auto& t = tables[static_cast<std::size_t>(n)];
  if (j >= t.size() || k >= t.size()) {
    throw DomainError(std::string(what) + " trace distance setting index out of range");
  }
  return t[j][k];
}

}  // namespace

double FockMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

FockMatrix fock_matrix(const RegionRule& rule, int n) {
  if (n < 0) throw DomainError("photon number must be non-negative");
  const std::size_t dim = static_cast<std::size_t>(n) + 1;

  // One pass over the nodes accumulates every (k, k') entry. The phi factor
  // depends only on k - k', so theta/I sums are kept per pair.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
  double norm = 0.0;
  std::vector<double> cpow(2 * dim), spow(2 * dim);
  for (const auto& nd : rule.nodes()) {
    const double i = nd.intensity;
    const double pn = i > 0.0 ? std::exp(-i + n * std::log(i) - std::lgamma(n + 1.0))
                              : (n == 0 ? 1.0 : 0.0);
    if (pn == 0.0) continue;
    const double w = nd.weight * pn;
    norm += w;
    cpow[0] = spow[0] = 1.0;
    for (std::size_t p = 1; p < 2 * dim; ++p) {
      cpow[p] = cpow[p - 1] * nd.cos_half;
      spow[p] = spow[p - 1] * nd.sin_half;
    }
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t kp = k; kp < dim; ++kp) {
        acc(k, kp) += w * cpow[2 * n - k - kp] * spow[k + kp];
      }
    }
  }
  const double phi0 = rule.phi_factor(0);
  if (!(norm * phi0 > std::numeric_limits<double>::min())) {
    throw QuadratureError(QuadratureError::Kind::Degenerate,
                          "n-photon weight of the region underflows");
  }
  FockMatrix out;
  out.n = n;
  out.rho = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t kp = k; kp < dim; ++kp) {
      const double coeff = std::exp(0.5 * (log_binomial(n, static_cast<int>(k)) +
                                           log_binomial(n, static_cast<int>(kp))));
      const double phi = rule.phi_factor(static_cast<int>(k) - static_cast<int>(kp));
      const double v = coeff * phi * acc(k, kp) / (phi0 * norm);
      out.rho(k, kp) = v;
      out.rho(kp, k) = v;
    }
  }
  return out;
}

FockMatrix fock_matrix(const RegionSpec& region, int n, double nu_t, double tol) {
  return fock_matrix(build_rule(geometry_of(region), nu_t, {.rel_tol = tol}), n);
}

FockMatrix mixed_basis_matrix(const FockMatrix& a, const FockMatrix& b) {
  if (a.n != b.n) throw DomainError("photon numbers of the two poles differ");
  return {a.n, 0.5 * (a.rho + b.rho)};
}

FockMatrix mixed_basis_matrix(const RegionSpec& region_r, const RegionSpec& region_l, int n,
                              double nu_t, double tol) {
  if (region_r.basis != Basis::Key || region_l.basis != Basis::Key ||
      region_r.pole != Pole::R || region_l.pole != Pole::L ||
      !(region_r.interval == region_l.interval)) {
    throw DomainError("mixed_basis_matrix needs the R and L regions of one key setting");
  }
  return mixed_basis_matrix(fock_matrix(region_r, n, nu_t, tol),
                            fock_matrix(region_l, n, nu_t, tol));
}

double trace_distance(const FockMatrix& a, const FockMatrix& b) {
  if (a.n != b.n || a.rho.rows() != b.rho.rows()) {
    throw DomainError("trace distance between matrices of different dimension");
  }
  const Eigen::MatrixXd diff = a.rho - b.rho;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(diff, Eigen::EigenvaluesOnly);
  return std::min(1.0, 0.5 * es.eigenvalues().cwiseAbs().sum());
}

double TdTables::key_td(int n, std::size_t j, std::size_t k) const {
  return lookup(key, n, j, k, "key");
}

double TdTables::test_td(int n, std::size_t j, std::size_t k) const {
  return lookup(test, n, j, k, "test");
}

TdTables td_tables(const std::vector<RegionRule>& key_r, const std::vector<RegionRule>& key_l,
                   const std::vector<RegionRule>& test_h, int n_cut) {
  if (n_cut < 1) throw DomainError("n_cut must be at least 1");
  if (key_r.size() != key_l.size()) throw DomainError("key pole rule lists differ in size");
  TdTables t;
  t.n_cut = n_cut;
  t.key.resize(static_cast<std::size_t>(n_cut) + 1);
  t.test.resize(static_cast<std::size_t>(n_cut) + 1);
  for (int n = 1; n <= n_cut; ++n) {
    if (n >= 2) {
      std::vector<FockMatrix> states;
      for (std::size_t j = 0; j < key_r.size(); ++j) {
        states.push_back(mixed_basis_matrix(fock_matrix(key_r[j], n), fock_matrix(key_l[j], n)));
      }
      t.key[static_cast<std::size_t>(n)] = pairwise(states);
    }
    std::vector<FockMatrix> states;
    for (const auto& r : test_h) states.push_back(fock_matrix(r, n));
    t.test[static_cast<std::size_t>(n)] = pairwise(states);
  }
  return t;
}

TdTables td_tables(const SourceConfig& cfg, int n_cut, double tol) {
  cfg.validate();
  const QuadratureOptions opts{.rel_tol = tol};
  std::vector<RegionRule> kr, kl, th;
  for (std::size_t j = 0; j < cfg.key_intervals.size(); ++j) {
    kr.push_back(build_rule(geometry_of(key_region(cfg, j, Pole::R)), cfg.nu_t, opts));
    kl.push_back(build_rule(geometry_of(key_region(cfg, j, Pole::L)), cfg.nu_t, opts));
  }
  for (std::size_t j = 0; j < cfg.test_intervals.size(); ++j) {
    th.push_back(build_rule(geometry_of(test_region(cfg, j, Pole::H)), cfg.nu_t, opts));
  }
  return td_tables(kr, kl, th, n_cut);
}

}  // namespace pqkd

#include "pqkd/source.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "pqkd/errors.hpp"
#include "pqkd/quadrature.hpp"

namespace pqkd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

// Inner Gauss-Legendre order for a given refinement level.
std::size_t inner_order(int level) { return static_cast<std::size_t>(4 + 2 * level); }

constexpr double kInnerPanelLength = 1.0;

// Appends the nodes of one theta panel at the given level.
void add_panel(double a, double b, double i_lo, double i_hi, double nu_t,
               int level, std::vector<QuadNode>& out) {
  const auto& gl = quad::gauss_legendre(inner_order(level));
  const auto outer = quad::tanh_sinh(a, b, level);
  for (const auto& p : outer) {
    const double theta = p.x;
    double cos_t;
    if (b == kHalfPi) {
      cos_t = std::sin(p.from_right);
    } else if (a == kHalfPi) {
      cos_t = -std::sin(p.from_left);
    } else {
      cos_t = std::cos(theta);
    }
    double sin_t;
    if (a == 0.0) {
      sin_t = std::sin(p.from_left);
    } else if (b == kPi) {
      sin_t = std::sin(p.from_right);
    } else {
      sin_t = std::sin(theta);
    }
    if (sin_t <= 0.0) continue;
    const double abs_cos = std::abs(cos_t);
    // alpha = I*_theta, beta = the other branch, delta = beta - alpha.
    const double alpha = 4.0 * nu_t / (1.0 + abs_cos);
    const double delta = std::max(8.0 * nu_t * abs_cos / (sin_t * sin_t), 1e-300);
    if (alpha <= i_lo) continue;
    const double top = std::min(i_hi, alpha);
    const double sqrt_delta = std::sqrt(delta);
    const double u_lo = std::sqrt(std::max(alpha - top, 0.0));
    const double u_hi = std::sqrt(alpha - i_lo);
    const double v_lo = std::asinh(u_lo / sqrt_delta);
    const double v_hi = std::asinh(u_hi / sqrt_delta);
    if (!(v_hi > v_lo)) continue;

    const double c_half = std::sqrt(0.5 * (1.0 + cos_t));
    const double s_half = std::sqrt(0.5 * (1.0 - cos_t));
    // f dI = 2 / (pi^2 sin(theta)) dI / sqrt((alpha - I)(beta - I))
    //      = 4 / (pi^2 sin(theta)) dv   with I = alpha - delta sinh^2 v
    const double pref = p.w * 4.0 / (kPi * kPi * sin_t);
    const int panels = std::max(1, static_cast<int>(std::ceil((v_hi - v_lo) / kInnerPanelLength)));
    const double dv = (v_hi - v_lo) / panels;
    for (int k = 0; k < panels; ++k) {
      const double v0 = v_lo + k * dv;
      for (const auto& q : gl) {
        const double v = v0 + 0.5 * dv * (q.x + 1.0);
        const double u = sqrt_delta * std::sinh(v);
        const double intensity = alpha - u * u;
        out.push_back({theta, intensity, pref * 0.5 * dv * q.w, c_half, s_half});
      }
    }
  }
}

std::vector<QuadNode> build_nodes(const RegionGeometry& g, double nu_t, int level) {
  const double i_lo = g.interval.lo * 4.0 * nu_t;
  const double i_hi = g.interval.hi * 4.0 * nu_t;

  std::vector<double> cuts{g.theta_lo, g.theta_hi, kHalfPi};
  for (double intensity : {i_lo, i_hi}) {
    if (intensity > 2.0 * nu_t && intensity < 4.0 * nu_t) {
      const double tk = 2.0 * std::acos(std::sqrt(2.0 * nu_t / intensity));
      cuts.push_back(tk);
      cuts.push_back(kPi - tk);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<QuadNode> nodes;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (a < g.theta_lo || b > g.theta_hi || !(b > a)) continue;
    const double mid = 0.5 * (a + b);
    if (max_intensity(mid, nu_t) <= i_lo) continue;
    add_panel(a, b, i_lo, i_hi, nu_t, level, nodes);
  }
  return nodes;
}

// Reference integrands used to decide convergence of the rule.
std::vector<double> reference_integrals(const std::vector<QuadNode>& nodes) {
  std::vector<double> acc(5, 0.0);
  for (const auto& n : nodes) {
    const double e = std::exp(-n.intensity);
    const double i = n.intensity;
    acc[0] += n.weight;
    acc[1] += n.weight * e * i;
    acc[2] += n.weight * e * i * i * i * i / 24.0;
    acc[3] += n.weight * e * i * n.cos_half * n.cos_half;
    acc[4] += n.weight * e * i * i * n.sin_half * n.cos_half;
  }
  return acc;
}

double poisson_term(double intensity, int n) {
  if (intensity <= 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-intensity + n * std::log(intensity) - std::lgamma(n + 1.0));
}

double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

// Raw (unnormalized) sums that make up RegionMoments.
struct RawMoments {
  double unit = 0.0;
  std::vector<double> poisson;
  double w1 = 0.0;
  double align = 0.0;

  explicit RawMoments(int n_max) : poisson(static_cast<std::size_t>(n_max) + 1, 0.0) {}

  void accumulate(const RegionRule& rule, Pole pole) {
    const int n_max = static_cast<int>(poisson.size()) - 1;
    std::vector<double> local(poisson.size(), 0.0);
    double u = 0.0;
    double w = 0.0;
    double cos_sum = 0.0;
    double sin_sum = 0.0;
    for (const auto& nd : rule.nodes()) {
      const double i = nd.intensity;
      const double e = std::exp(-i);
      u += nd.weight;
      // Poisson terms by recursion; e^{-I} I^n / n!
      double term = e;
      local[0] += nd.weight * term;
      for (int n = 1; n <= n_max; ++n) {
        term *= i / n;
        local[static_cast<std::size_t>(n)] += nd.weight * term;
      }
      const double ei = e * i;
      w += nd.weight * ei;
      const double cos_t = nd.cos_half * nd.cos_half - nd.sin_half * nd.sin_half;
      const double sin_t = 2.0 * nd.sin_half * nd.cos_half;
      cos_sum += nd.weight * ei * cos_t;
      sin_sum += nd.weight * ei * sin_t;
    }
    const double f0 = rule.phi_factor(0);
    unit += f0 * u;
    for (std::size_t n = 0; n < local.size(); ++n) poisson[n] += f0 * local[n];
    w1 += f0 * w;
    switch (pole) {
      case Pole::R: align += f0 * cos_sum; break;
      case Pole::L: align -= f0 * cos_sum; break;
      case Pole::H: align += rule.phi_factor(1) * sin_sum; break;
      case Pole::V: align -= rule.phi_factor(1) * sin_sum; break;
    }
  }

  RegionMoments finish() const {
    if (!(unit > 0.0)) {
      throw QuadratureError(QuadratureError::Kind::EmptyRegion,
                            "region has zero selection probability");
    }
    RegionMoments m;
    m.p_select = unit;
    m.pn.resize(poisson.size());
    for (std::size_t n = 0; n < poisson.size(); ++n) m.pn[n] = poisson[n] / unit;
    m.w1 = w1;
    m.lambda = w1 > 0.0 ? align / w1 : 0.0;
    return m;
  }
};

bool same_region_family(const RegionSpec& a, const RegionSpec& b) {
  if (a.basis != b.basis || a.pole != b.pole) return false;
  if (a.basis == Basis::Key) return a.dtheta_key == b.dtheta_key;
  return a.dtheta_test == b.dtheta_test && a.dphi_test == b.dphi_test;
}

}  // namespace

std::string to_string(Basis b) { return b == Basis::Key ? "key" : "test"; }

std::string to_string(Pole p) {
  switch (p) {
    case Pole::R: return "R";
    case Pole::L: return "L";
    case Pole::H: return "H";
    case Pole::V: return "V";
  }
  return "?";
}

void IntensityInterval::validate() const {
  require(std::isfinite(lo) && std::isfinite(hi), "intensity interval must be finite");
  require(lo >= 0.0 && lo < hi && hi <= 1.0,
          "intensity interval must satisfy 0 <= lo < hi <= 1");
}

void SourceConfig::validate() const {
  require(nu_t > 0.0 && std::isfinite(nu_t), "nu_t must be positive");
  require(dtheta_key > 0.0 && dtheta_key < kHalfPi, "dtheta_key must lie in (0, pi/2)");
  require(dtheta_test > 0.0 && dtheta_test < kHalfPi, "dtheta_test must lie in (0, pi/2)");
  require(dphi_test > 0.0 && dphi_test < kHalfPi, "dphi_test must lie in (0, pi/2)");
  require(!key_intervals.empty(), "at least one key interval is required");
  require(!test_intervals.empty(), "at least one test interval is required");
  for (const auto& iv : key_intervals) iv.validate();
  for (const auto& iv : test_intervals) iv.validate();
  for (std::size_t i = 0; i < key_intervals.size(); ++i) {
    for (std::size_t j = i + 1; j < key_intervals.size(); ++j) {
      const auto& a = key_intervals[i];
      const auto& b = key_intervals[j];
      const bool disjoint = a.hi <= b.lo || b.hi <= a.lo;
      if (!disjoint) {
        std::ostringstream os;
        os << "key intervals " << i << " and " << j << " overlap";
        throw DomainError(os.str());
      }
    }
  }
}

SourceConfig SourceConfig::with_width(double w, double nu_t, double dtheta_key,
                                      double dtheta_test, double dphi_test) {
  require(w > 0.0 && 3.0 * w < 1.0, "width parameter must satisfy 0 < 3w < 1");
  SourceConfig c;
  c.nu_t = nu_t;
  c.dtheta_key = dtheta_key;
  c.dtheta_test = dtheta_test;
  c.dphi_test = dphi_test;
  c.key_intervals = {{3 * w, 1.0}, {2 * w, 3 * w}, {w, 2 * w}, {0.0, w}};
  c.test_intervals = {{0.0, 1.0}, {0.0, 3 * w}, {0.0, 2 * w}, {0.0, w}};
  return c;
}

void RegionSpec::validate() const {
  interval.validate();
  if (basis == Basis::Key) {
    require(pole == Pole::R || pole == Pole::L, "key regions have poles R or L");
    require(dtheta_key > 0.0 && dtheta_key < kHalfPi, "dtheta_key must lie in (0, pi/2)");
  } else {
    require(pole == Pole::H || pole == Pole::V, "test regions have poles H or V");
    require(dtheta_test > 0.0 && dtheta_test < kHalfPi, "dtheta_test must lie in (0, pi/2)");
    require(dphi_test > 0.0 && dphi_test < kHalfPi, "dphi_test must lie in (0, pi/2)");
  }
}

RegionSpec key_region(const SourceConfig& cfg, std::size_t j, Pole pole) {
  require(j < cfg.key_intervals.size(), "key setting index out of range");
  RegionSpec r{Basis::Key, pole, cfg.key_intervals[j], cfg.dtheta_key,
               cfg.dtheta_test, cfg.dphi_test};
  r.validate();
  return r;
}

RegionSpec test_region(const SourceConfig& cfg, std::size_t j, Pole pole) {
  require(j < cfg.test_intervals.size(), "test setting index out of range");
  RegionSpec r{Basis::Test, pole, cfg.test_intervals[j], cfg.dtheta_key,
               cfg.dtheta_test, cfg.dphi_test};
  r.validate();
  return r;
}

RegionGeometry geometry_of(const RegionSpec& r) {
  r.validate();
  RegionGeometry g;
  g.interval = r.interval;
  switch (r.pole) {
    case Pole::R:
      g.theta_lo = 0.0;
      g.theta_hi = r.dtheta_key;
      g.phi_center = 0.0;
      g.phi_half_width = kPi;
      break;
    case Pole::L:
      g.theta_lo = kPi - r.dtheta_key;
      g.theta_hi = kPi;
      g.phi_center = 0.0;
      g.phi_half_width = kPi;
      break;
    case Pole::H:
    case Pole::V:
      g.theta_lo = kHalfPi - r.dtheta_test;
      g.theta_hi = kHalfPi + r.dtheta_test;
      g.phi_center = r.pole == Pole::H ? 0.0 : kPi;
      g.phi_half_width = r.dphi_test;
      break;
  }
  return g;
}

RegionGeometry full_domain() { return {0.0, kPi, 0.0, kPi, {0.0, 1.0}}; }

double max_intensity(double theta, double nu_t) {
  require(theta >= 0.0 && theta <= kPi, "theta must lie in [0, pi]");
  require(nu_t > 0.0, "nu_t must be positive");
  return 4.0 * nu_t / (1.0 + std::abs(std::cos(theta)));
}

double intensity_density(double theta, double intensity, double nu_t) {
  require(theta >= 0.0 && theta <= kPi, "theta must lie in [0, pi]");
  require(intensity >= 0.0, "intensity must be non-negative");
  const double i_star = max_intensity(theta, nu_t);
  require(intensity < i_star, "intensity must be below I*_theta");
  const double c2 = std::pow(std::cos(theta / 2.0), 2);
  const double s2 = std::pow(std::sin(theta / 2.0), 2);
  const double x = intensity / (2.0 * nu_t);
  return 1.0 / (2.0 * nu_t * kPi * kPi * std::sqrt(1.0 - x * c2) * std::sqrt(1.0 - x * s2));
}

double phi_factor(const RegionGeometry& g, int m) {
  const double h = g.phi_half_width;
  if (m == 0) return h / kPi;
  const double mm = static_cast<double>(m);
  const double imag = std::sin(mm * g.phi_center) * std::sin(mm * h) / (kPi * mm);
  if (std::abs(imag) > 1e-14) {
    throw DomainError("phi window is not symmetric about 0 or pi; averages would be complex");
  }
  return std::cos(mm * g.phi_center) * std::sin(mm * h) / (kPi * mm);
}

RegionRule::RegionRule(RegionGeometry g, double nu_t, std::vector<QuadNode> nodes, int level)
    : geom_(g), nu_t_(nu_t), nodes_(std::move(nodes)), level_(level) {}

RegionRule build_rule(const RegionGeometry& g, double nu_t, const QuadratureOptions& opts) {
  require(nu_t > 0.0 && std::isfinite(nu_t), "nu_t must be positive");
  require(opts.rel_tol > 0.0, "tolerance must be positive");
  g.interval.validate();
  require(g.theta_lo >= 0.0 && g.theta_hi <= kPi && g.theta_lo < g.theta_hi,
          "theta window must satisfy 0 <= lo < hi <= pi");

  auto prev = build_nodes(g, nu_t, opts.min_level);
  if (prev.empty()) {
    throw QuadratureError(QuadratureError::Kind::EmptyRegion,
                          "clipped region has zero measure");
  }
  auto prev_ref = reference_integrals(prev);
  for (int level = opts.min_level + 1; level <= opts.max_level; ++level) {
    auto next = build_nodes(g, nu_t, level);
    auto next_ref = reference_integrals(next);
    bool converged = true;
    for (std::size_t k = 0; k < next_ref.size(); ++k) {
      const double scale = std::max(std::abs(next_ref[k]), 1e-300);
      if (std::abs(next_ref[k] - prev_ref[k]) > opts.rel_tol * scale) converged = false;
    }
    if (converged) return RegionRule(g, nu_t, std::move(next), level);
    prev = std::move(next);
    prev_ref = std::move(next_ref);
  }
  throw QuadratureError(QuadratureError::Kind::ToleranceNotMet,
                        "quadrature refinement stalled before reaching tolerance");
}

double region_average(const RegionRule& rule, const IntegrandKind& g) {
  return std::visit(
      [&](const auto& kind) -> double {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, integrand::Unit>) {
          return rule.average([](const QuadNode&) { return 1.0; });
        } else if constexpr (std::is_same_v<T, integrand::Poisson>) {
          require(kind.n >= 0, "photon number must be non-negative");
          return rule.average([&](const QuadNode& n) { return poisson_term(n.intensity, kind.n); });
        } else if constexpr (std::is_same_v<T, integrand::IntensityWeight>) {
          return rule.average([](const QuadNode& n) { return std::exp(-n.intensity) * n.intensity; });
        } else if constexpr (std::is_same_v<T, integrand::PolarAlignment>) {
          return rule.average([](const QuadNode& n) {
            const double cos_t = n.cos_half * n.cos_half - n.sin_half * n.sin_half;
            return std::exp(-n.intensity) * n.intensity * cos_t;
          });
        } else if constexpr (std::is_same_v<T, integrand::EquatorialAlignment>) {
          return rule.phi_factor(1) * rule.integrate([](const QuadNode& n) {
            return std::exp(-n.intensity) * n.intensity * 2.0 * n.sin_half * n.cos_half;
          });
        } else {
          require(kind.n >= 0 && kind.k >= 0 && kind.kp >= 0 && kind.k <= kind.n && kind.kp <= kind.n,
                  "Fock element indices must satisfy 0 <= k, k' <= n");
          const double coeff = std::sqrt(binomial(kind.n, kind.k) * binomial(kind.n, kind.kp));
          const int pc = 2 * kind.n - kind.k - kind.kp;
          const int ps = kind.k + kind.kp;
          return rule.phi_factor(kind.k - kind.kp) * rule.integrate([&](const QuadNode& n) {
            return coeff * std::pow(n.cos_half, pc) * std::pow(n.sin_half, ps) *
                   poisson_term(n.intensity, kind.n);
          });
        }
      },
      g);
}

double region_average(const RegionGeometry& region, const IntegrandKind& g, double nu_t,
                      double tol) {
  return region_average(build_rule(region, nu_t, {.rel_tol = tol}), g);
}

double region_average(const RegionSpec& region, const IntegrandKind& g, double nu_t, double tol) {
  return region_average(geometry_of(region), g, nu_t, tol);
}

RegionMoments region_moments(const RegionRule& rule, Pole pole, int n_max) {
  require(n_max >= 1, "n_max must be at least 1");
  RawMoments raw(n_max);
  raw.accumulate(rule, pole);
  return raw.finish();
}

RegionMoments region_moments(const RegionSpec& region, int n_max, double nu_t, double tol) {
  return region_moments(build_rule(geometry_of(region), nu_t, {.rel_tol = tol}), region.pole,
                        n_max);
}

std::vector<IntensityInterval> merge_intervals(std::vector<IntensityInterval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const auto& a, const auto& b) { return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi); });
  std::vector<IntensityInterval> merged;
  for (const auto& iv : intervals) {
    if (!merged.empty() && iv.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    } else {
      merged.push_back(iv);
    }
  }
  return merged;
}

RegionMoments union_moments(const std::vector<RegionRule>& pieces, Pole pole, int n_max) {
  require(!pieces.empty(), "union of zero regions");
  require(n_max >= 1, "n_max must be at least 1");
  RawMoments raw(n_max);
  for (const auto& r : pieces) raw.accumulate(r, pole);
  return raw.finish();
}

RegionMoments union_moments(const std::vector<RegionSpec>& regions, double nu_t, double tol,
                            int n_max) {
  require(!regions.empty(), "union of zero regions");
  for (const auto& r : regions) {
    r.validate();
    if (!same_region_family(r, regions.front())) {
      throw DomainError("union_moments requires regions of one basis, pole and shape");
    }
  }
  std::vector<IntensityInterval> intervals;
  for (const auto& r : regions) intervals.push_back(r.interval);
  std::vector<RegionRule> pieces;
  for (const auto& iv : merge_intervals(std::move(intervals))) {
    RegionSpec piece = regions.front();
    piece.interval = iv;
    pieces.push_back(build_rule(geometry_of(piece), nu_t, {.rel_tol = tol}));
  }
  return union_moments(pieces, regions.front().pole, n_max);
}

}  // namespace pqkd

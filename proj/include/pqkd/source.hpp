#pragma once

// Output distribution of the fully passive source and weighted averages
// over post-selection regions of the (phi, theta, I) space.
//
// Averages <g>_Omega are taken with weight f(theta, I)/(2 pi). The phi
// integral is done analytically (regions are phi-windows and integrands
// depend on phi through e^{i m phi}); the (theta, I) integral uses a
// tanh-sinh rule in theta, split at the clipping kinks of I*_theta and at
// theta = pi/2, and a Gauss-Legendre rule in a variable that absorbs both
// square-root factors of f exactly.

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace pqkd {

enum class Basis { Key, Test };
enum class Pole { R, L, H, V };

std::string to_string(Basis b);
std::string to_string(Pole p);

/// Intensity window as fractions of I_max = 4 nu_t.
struct IntensityInterval {
  double lo = 0.0;
  double hi = 1.0;

  void validate() const;
  bool operator==(const IntensityInterval&) const = default;
};

struct SourceConfig {
  double nu_t = 0.2;         // nu * t, photon-number units
  double dtheta_key = 0.5;   // polar half-width of the key caps
  double dtheta_test = 0.2;  // polar half-width of the test stripes
  double dphi_test = 0.2;    // azimuthal half-width of the test stripes
  std::vector<IntensityInterval> key_intervals;
  std::vector<IntensityInterval> test_intervals;

  /// Throws DomainError on the first violated invariant.
  void validate() const;

  /// Key intervals [0,w),[w,2w),[2w,3w),[3w,1) and nested test intervals
  /// [0,w),[0,2w),[0,3w),[0,1), listed highest-intensity first.
  static SourceConfig with_width(double w, double nu_t, double dtheta_key,
                                 double dtheta_test, double dphi_test);
};

struct RegionSpec {
  Basis basis = Basis::Key;
  Pole pole = Pole::R;
  IntensityInterval interval;
  double dtheta_key = 0.5;
  double dtheta_test = 0.2;
  double dphi_test = 0.2;

  void validate() const;
};

RegionSpec key_region(const SourceConfig& cfg, std::size_t j, Pole pole);
RegionSpec test_region(const SourceConfig& cfg, std::size_t j, Pole pole);

/// Explicit region shape: theta window, phi window centred at phi_center
/// with half-width phi_half_width (pi means the full circle), and an
/// intensity window.
struct RegionGeometry {
  double theta_lo = 0.0;
  double theta_hi = 0.0;
  double phi_center = 0.0;
  double phi_half_width = 0.0;
  IntensityInterval interval;
};

RegionGeometry geometry_of(const RegionSpec& region);

/// The whole (phi, theta, I) domain.
RegionGeometry full_domain();

/// f(theta, I) of the passive source output.
double intensity_density(double theta, double intensity, double nu_t);

/// I*_theta = min{2 nu_t / cos^2(theta/2), 2 nu_t / sin^2(theta/2)}.
double max_intensity(double theta, double nu_t);

/// (1/2pi) * integral of e^{i m phi} over the phi window of the region.
/// Throws DomainError if the window produces an imaginary part.
double phi_factor(const RegionGeometry& g, int m);

struct QuadratureOptions {
  double rel_tol = 1e-9;
  int min_level = 3;
  int max_level = 8;
};

/// Node of a (theta, I) rule. The weight includes the source density f,
/// so that sum_i weight_i * h(theta_i, I_i) approximates
/// the integral of f h over the theta/I part of the region.
struct QuadNode {
  double theta;
  double intensity;
  double weight;
  double cos_half;  // cos(theta/2)
  double sin_half;  // sin(theta/2)
};

class RegionRule {
public:
  RegionRule() = default;
  RegionRule(RegionGeometry g, double nu_t, std::vector<QuadNode> nodes,
             int level);

  const RegionGeometry& geometry() const { return geom_; }
  double nu_t() const { return nu_t_; }
  const std::vector<QuadNode>& nodes() const { return nodes_; }
  int level() const { return level_; }

  double phi_factor(int m) const { return pqkd::phi_factor(geom_, m); }

  /// Integral of f(theta, I) h(theta, I) over the theta/I part.
  template <class H>
  double integrate(H&& h) const {
    double acc = 0.0;
    for (const auto& n : nodes_) acc += n.weight * h(n);
    return acc;
  }

  /// <h>_Omega for an integrand that does not depend on phi.
  template <class H>
  double average(H&& h) const {
    return phi_factor(0) * integrate(std::forward<H>(h));
  }

private:
  RegionGeometry geom_{};
  double nu_t_ = 0.0;
  std::vector<QuadNode> nodes_;
  int level_ = 0;
};

/// Builds a (theta, I) rule for a region, refining until reference
/// integrals agree to opts.rel_tol between consecutive levels.
/// Throws QuadratureError (EmptyRegion or ToleranceNotMet).
RegionRule build_rule(const RegionGeometry& g, double nu_t,
                      const QuadratureOptions& opts = {});

namespace integrand {
struct Unit {};
struct Poisson { int n; };
struct IntensityWeight {};      // e^{-I} I
struct PolarAlignment {};       // e^{-I} I cos(theta)
struct EquatorialAlignment {};  // e^{-I} I sin(theta) cos(phi)
struct FockElement { int n; int k; int kp; };
}  // namespace integrand

using IntegrandKind =
    std::variant<integrand::Unit, integrand::Poisson, integrand::IntensityWeight,
                 integrand::PolarAlignment, integrand::EquatorialAlignment,
                 integrand::FockElement>;

/// <g>_Omega evaluated on a prepared rule.
double region_average(const RegionRule& rule, const IntegrandKind& g);

/// <g>_Omega; builds a rule for the region at the given tolerance.
double region_average(const RegionSpec& region, const IntegrandKind& g,
                      double nu_t, double tol);
double region_average(const RegionGeometry& region, const IntegrandKind& g,
                      double nu_t, double tol);

struct RegionMoments {
  double p_select = 0.0;   // <1>_Omega
  std::vector<double> pn;  // p_{n|j}, n = 0..n_max
  double w1 = 0.0;         // <e^{-I} I>_Omega
  double lambda = 0.0;     // alignment with the region's own pole
};

inline constexpr int kDefaultNMax = 40;

RegionMoments region_moments(const RegionRule& rule, Pole pole,
                             int n_max = kDefaultNMax);
RegionMoments region_moments(const RegionSpec& region, int n_max, double nu_t,
                             double tol = 1e-9);

/// Moments over the set union of regions that share basis, pole and
/// angular parameters. Overlapping intensity windows are merged.
RegionMoments union_moments(const std::vector<RegionSpec>& regions, double nu_t,
                            double tol = 1e-9, int n_max = kDefaultNMax);

/// Same, from rules over disjoint pieces that share one pole.
RegionMoments union_moments(const std::vector<RegionRule>& pieces, Pole pole,
                            int n_max = kDefaultNMax);

/// Merges overlapping or touching intervals into a sorted disjoint list.
std::vector<IntensityInterval> merge_intervals(
    std::vector<IntensityInterval> intervals);

}  // namespace pqkd

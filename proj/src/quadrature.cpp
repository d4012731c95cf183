#include "pqkd/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace pqkd::quad {

namespace {

std::vector<Point> compute_gauss_legendre(std::size_t n) {
  std::vector<Point> pts(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess followed by Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (std::size_t k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    pts[i] = {-x, w};
    pts[n - 1 - i] = {x, w};
  }
  if (n % 2 == 1) pts[n / 2].x = 0.0;
  return pts;
}

}  // namespace

const std::vector<Point>& gauss_legendre(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Point>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) {
    if (n == 1) {
      it = cache.emplace(n, std::vector<Point>{{0.0, 2.0}}).first;
    } else {
      it = cache.emplace(n, compute_gauss_legendre(n)).first;
    }
  }
  return it->second;
}

std::vector<EndpointPoint> tanh_sinh(double a, double b, int level) {
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  // Beyond |t| = 3.2 the endpoint distance drops below ~1e-16 of the
  // panel and the weights below ~1e-14.
  constexpr double kTMax = 3.2;
  const double h = std::ldexp(1.0, -level);
  const double len = b - a;
  const int kmax = static_cast<int>(std::floor(kTMax / h));

  std::vector<EndpointPoint> pts;
  pts.reserve(2 * kmax + 1);
  for (int k = -kmax; k <= kmax; ++k) {
    const double t = k * h;
    const double u = kHalfPi * std::sinh(t);
    // (1 + x)/2 = 1/(1 + e^{-2u}), (1 - x)/2 = 1/(1 + e^{2u})
    const double left = len / (1.0 + std::exp(-2.0 * u));
    const double right = len / (1.0 + std::exp(2.0 * u));
    const double cu = std::cosh(u);
    const double w = h * kHalfPi * std::cosh(t) / (cu * cu) * (len / 2.0);
    if (left <= 0.0 || right <= 0.0) continue;
    const double x = (k <= 0) ? a + left : b - right;
    pts.push_back({x, left, right, w});
  }
  return pts;
}

}  // namespace pqkd::quad

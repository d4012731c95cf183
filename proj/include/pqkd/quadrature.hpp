#pragma once

#include <cstddef>
#include <vector>

namespace pqkd::quad {

/// Abscissa/weight pair on a reference interval.
struct Point {
  double x;
  double w;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Results are memoized per n.
const std::vector<Point>& gauss_legendre(std::size_t n);

/// Node of a tanh-sinh rule mapped onto [a, b]. The node position is
/// reported as a distance from the nearest endpoint so that callers can
/// evaluate integrands near endpoint singularities without cancellation.
struct EndpointPoint {
  double x;          // absolute position in [a, b]
  double from_left;  // x - a, computed without cancellation
  double from_right; // b - x, computed without cancellation
  double w;
};

/// Tanh-sinh (double exponential) rule on [a, b] with step 2^-level.
/// Handles integrable algebraic and logarithmic endpoint singularities.
std::vector<EndpointPoint> tanh_sinh(double a, double b, int level);

}  // namespace pqkd::quad

#pragma once

#include <functional>
#include <vector>

namespace riesz {

// Gauss-Legendre rule on [-1, 1]. Nodes/weights are computed once per order
// by Newton iteration on the Legendre polynomial (no transcribed tables) and
// cached; deterministic.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre(int order);

// Fixed-order Gauss integral of f over [a, b].
double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order);

// Adaptive panel-bisection quadrature: starts from `initial_panels` uniform
// panels over [a, b] (extra breakpoints may be supplied), bisects any panel
// whose two halves disagree with it beyond tol (relative to the running
// total), up to max_depth levels. Throws std::runtime_error if a panel still
// disagrees at the depth cap.
double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double tol, int initial_panels = 1,
                      const std::vector<double>& breakpoints = {},
                      int max_depth = 48, int order = 15);

} // namespace riesz

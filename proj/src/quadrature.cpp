#include "riesz/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace riesz {

namespace {

GaussRule compute_rule(int order) {
  GaussRule r;
  r.nodes.resize(order);
  r.weights.resize(order);
  const double pi = 3.14159265358979323846264338327950288;
  // Roots of P_n via Newton from the Chebyshev-like initial guess; P_n and
  // P_n' from the three-term recurrence.
  for (int i = 0; i < order; ++i) {
    double x = std::cos(pi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= order; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = order * (x * p1 - p0) / (x * x - 1.0);
    // Store in ascending order.
    r.nodes[order - 1 - i] = x;
    r.weights[order - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

} // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, compute_rule(order)).first;
  }
  return it->second;
}

double gauss_panel(const std::function<double(double)>& f, double a, double b,
                   int order) {
  const GaussRule& r = gauss_legendre(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < order; ++i) {
    s += r.weights[i] * f(mid + half * r.nodes[i]);
  }
  return s * half;
}

double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double tol, int initial_panels,
                      const std::vector<double>& breakpoints, int max_depth,
                      int order) {
  if (!(b > a)) return 0.0;
  if (initial_panels < 1) initial_panels = 1;

  // Panel edges: uniform split plus sorted interior breakpoints.
  std::vector<double> edges;
  edges.reserve(initial_panels + 1 + breakpoints.size());
  for (int i = 0; i <= initial_panels; ++i) {
    edges.push_back(a + (b - a) * i / initial_panels);
  }
  for (double x : breakpoints) {
    if (x > a && x < b) edges.push_back(x);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  struct Panel {
    double a, b, coarse;
    int depth;
  };
  std::vector<Panel> stack;
  double scale = 0.0;  // running magnitude estimate for the relative test
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double c = gauss_panel(f, edges[i], edges[i + 1], order);
    stack.push_back({edges[i], edges[i + 1], c, 0});
    scale += std::abs(c);
  }

  double total = 0.0;
  while (!stack.empty()) {
    const Panel p = stack.back();
    stack.pop_back();
    const double m = 0.5 * (p.a + p.b);
    const double left = gauss_panel(f, p.a, m, order);
    const double right = gauss_panel(f, m, p.b, order);
    const double refined = left + right;
    const double err = std::abs(refined - p.coarse);
    scale = std::max(scale, std::abs(refined));
    if (err <= tol * std::max(scale, 1e-300) ||
        err <= 1e-305) {  // absolute floor for identically-zero panels
      total += refined;
      continue;
    }
    if (p.depth >= max_depth) {
      throw std::runtime_error(
          "adaptive_gauss: tolerance not reached within subdivision depth");
    }
    stack.push_back({p.a, m, left, p.depth + 1});
    stack.push_back({m, p.b, right, p.depth + 1});
  }
  return total;
}

} // namespace riesz

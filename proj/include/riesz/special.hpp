#pragma once

#include <cstddef>
#include <vector>

namespace riesz {

// Euler Gamma on the positive axis via the Lanczos rational approximation
// (g = 6.0246..., 13 terms, double precision). Relative error <= 1e-12 on
// (0, 30]. Throws std::domain_error for x <= 0.
double gamma_fn(double x);

// Volume of the d-dimensional unit ball, pi^{d/2} / Gamma(d/2 + 1).
// Throws std::invalid_argument for d <= 0.
double ball_volume(int d);

// Deterministic pairwise (tree) summation. Order of operations depends only
// on n, never on thread count, and the rounding error grows like O(log n).
double pairwise_sum(const double* p, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

} // namespace riesz

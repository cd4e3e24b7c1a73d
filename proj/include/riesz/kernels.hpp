#pragma once

#include <array>
#include <memory>
#include <vector>

#include "riesz/grid.hpp"

namespace riesz {

// Radial kernel families:
//   Riesz(alpha):          |z|^{alpha-d}
//   TruncatedRiesz(a, R):  |z|^{alpha-d} on |z| <= R, else 0
//   TailRiesz(alpha):      |z|^{alpha-d} on |z| > 1, else 0
//   Log:                   log(1/|z|)
//   DiffQuotient(alpha):   (|z|^{alpha-d} - 1)/(d - alpha)
//   Constant:              1
// Riesz and DiffQuotient admit alpha in [1e-3, d-1e-3] (endpoint behaviour
// is reached only through the renormalized functionals). TruncatedRiesz and
// TailRiesz additionally admit alpha = 0 (the |z|^{-d} kernel); the alpha=0
// ball table exists only with the zero-origin-weight policy below.
enum class KernelKind { Riesz, TruncatedRiesz, TailRiesz, Log, DiffQuotient, Constant };

struct KernelSpec {
  KernelKind kind = KernelKind::Riesz;
  double alpha = 0.5;
  double R = 1.0;  // TruncatedRiesz only
  int dim = 1;

  static KernelSpec riesz(double a, int d) { return {KernelKind::Riesz, a, 0.0, d}; }
  static KernelSpec truncated(double a, double R, int d) {
    return {KernelKind::TruncatedRiesz, a, R, d};
  }
  static KernelSpec tail(double a, int d) { return {KernelKind::TailRiesz, a, 0.0, d}; }
  static KernelSpec log_kernel(int d) { return {KernelKind::Log, 0.0, 0.0, d}; }
  static KernelSpec diff_quotient(double a, int d) {
    return {KernelKind::DiffQuotient, a, 0.0, d};
  }
  static KernelSpec constant(int d) { return {KernelKind::Constant, 0.0, 0.0, d}; }
};

// Pointwise kernel value. Throws std::domain_error when z = 0 hits a
// singular kind and std::invalid_argument for inadmissible alpha.
double eval_kernel(const KernelSpec& spec, std::array<double, 2> z);
double eval_kernel(const KernelSpec& spec, double z);  // d = 1 convenience

// Cell-averaged kernel weights over the offset lattice [-(n-1), n-1]^d:
// weight(o) ~ h^{-d} * integral of k over cell(o). Symmetric under offset
// negation by construction.
struct KernelTable {
  std::shared_ptr<const Domain> domain;
  KernelSpec spec;
  double tol = 0.0;
  std::array<int, 2> reach{{0, 0}};  // n-1 per axis (0 for unused axis)
  std::vector<double> weights;       // row-major over offsets

  double at(int ox, int oy = 0) const {
    return weights[(ox + reach[0]) * (2 * reach[1] + 1) + (oy + reach[1])];
  }
  double& slot(int ox, int oy) {
    return weights[(ox + reach[0]) * (2 * reach[1] + 1) + (oy + reach[1])];
  }
};

// Whether the origin cell's weight carries its analytic mass or is pinned to
// zero. The zero policy backs the difference-structure sums (the Gagliardo
// part and the symmetric-difference operator), whose origin term vanishes
// identically; it is also the only way the alpha = 0 ball table exists.
enum class OriginPolicy { Include, Zero };

// Builds the table. d=1 uses exact antiderivatives for every kind; d=2 uses
// adaptive tensor Gauss away from the singular set and a polar-angular
// scheme (exact radial antiderivatives, adaptive in the angle) for cells at
// the origin, near it, or straddling a truncation circle. Throws
// std::runtime_error if the tensor refinement hits the depth cap (24).
KernelTable build_table(const KernelSpec& spec, std::shared_ptr<const Domain> dom,
                        double tol = 1e-10, OriginPolicy origin = OriginPolicy::Include);

// ||k^alpha_R||_{L^1} = (d omega_d / alpha) R^alpha. Requires alpha in (0,d).
double kernel_l1_truncated(double alpha, double R, int d);

// Constant c(alpha,d) = 2^alpha pi^{d/2} Gamma(alpha/2) / Gamma((d-alpha)/2)
// in F[k^alpha](xi) = c(alpha,d) |xi|^{-alpha}. Requires alpha in (0,d).
double fourier_constant(double alpha, int d);

// Checks the Fourier identity through Parseval with the Gaussian test
// function phi(x) = e^{-x^2}: lhs = int phi k^alpha, rhs = (2pi)^{-d}
// c(alpha,d) int F[phi](xi) |xi|^{-alpha} dxi. Both sides via adaptive
// quadrature seeded with quad_n base nodes (d = 1 only).
struct FourierCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_error = 0.0;
};
FourierCheck check_fourier_identity(double alpha, int d, int quad_n);

// |k~^alpha(z) - log(1/|z|)| / ((d-alpha) log^2(1/|z|)) for z_abs in (0,1];
// z_abs = 1 returns 0 by convention. Measures the uniform constant of the
// Taylor remainder of the difference-quotient kernel.
double taylor_defect(double alpha, double z_abs, int dim);

// S_1: sum over all nonzero lattice offsets of the cell-averaged
// TruncatedRiesz(alpha, 1) weights, i.e. h^{-d} * integral of k^alpha over
// B_1 minus the origin cell. Closed form; admits alpha = 0. This is the
// boundary constant of the zero-extended Gagliardo sums.
double lattice_sum_excl_origin(double alpha, const Domain& dom);

} // namespace riesz

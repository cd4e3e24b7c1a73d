#pragma once

#include <map>
#include <memory>
#include <string>

#include "riesz/convolve.hpp"
#include "riesz/grid.hpp"
#include "riesz/kernels.hpp"

namespace riesz {

// The eight interaction energies. All are quadratic forms in u.
//
//   J(alpha)    = -<u, u * |z|^{alpha-d}>                      (alpha in (0,d))
//   Jhat(alpha) = J(alpha) + (d omega_d / alpha) ||u||^2
//   G1(alpha)   = short-range (Gagliardo-type) part of Jhat    (alpha in [0,d))
//   J1(alpha)   = long-range tail part of Jhat                 (alpha in [0,d))
//   Jhat0       = G1(0) + J1(0)
//   Jd          = -(integral of u)^2
//   Jtilde(a)   = (J(a) - Jd) / (d - a)
//   JtildeD     = -<u, u * log(1/|z|)>
enum class EnergyTag { J, Jhat, G1, J1, Jhat0, Jd, Jtilde, JtildeD };

struct EnergyKind {
  EnergyTag tag = EnergyTag::J;
  double alpha = 0.5;  // meaningful for J, Jhat, G1, J1, Jtilde
  int sign = +1;       // overall +-1 multiplier

  static EnergyKind j(double a, int s = +1) { return {EnergyTag::J, a, s}; }
  static EnergyKind jhat(double a, int s = +1) { return {EnergyTag::Jhat, a, s}; }
  static EnergyKind g1(double a, int s = +1) { return {EnergyTag::G1, a, s}; }
  static EnergyKind j1(double a, int s = +1) { return {EnergyTag::J1, a, s}; }
  static EnergyKind jhat0(int s = +1) { return {EnergyTag::Jhat0, 0.0, s}; }
  static EnergyKind jd(int s = +1) { return {EnergyTag::Jd, 0.0, s}; }
  static EnergyKind jtilde(double a, int s = +1) { return {EnergyTag::Jtilde, a, s}; }
  static EnergyKind jtilde_d(int s = +1) { return {EnergyTag::JtildeD, 0.0, s}; }
};

const char* energy_name(EnergyTag tag);
bool energy_uses_alpha(EnergyTag tag);

enum class CertKind { Positivity, Convexity };

// Certificate that sign*E + (lambda/2)||.||^2 is convex (equivalently, for
// these quadratic energies, nonnegative). lambda = 2*witness_bound*1.01,
// with a small nominal lambda when the witness is 0.
struct ConvexityCertificate {
  double lambda = 0.0;
  CertKind kind = CertKind::Convexity;
  double witness_bound = 0.0;
};

// Sum of u over masked cells times the cell volume (the integral of u).
double mass(const GridField& u);

// Per-domain evaluator. Caches kernel tables and convolution plans, so it is
// NOT thread-safe: use one instance per concurrent task (e.g. per alpha in a
// sweep). Divergent values (G1 overflow) are reported as +-infinity markers,
// never as exceptions.
class EnergyEvaluator {
 public:
  explicit EnergyEvaluator(std::shared_ptr<const Domain> dom,
                           double table_tol = 1e-10);

  const std::shared_ptr<const Domain>& domain() const { return dom_; }

  double energy(const EnergyKind& kind, const GridField& u);
  GridField gradient(const EnergyKind& kind, const GridField& u);
  ConvexityCertificate certify(const EnergyKind& kind);

  // ||u||_{L2} + sqrt(2 G1(0, u)); infinity if G1(0) diverged.
  double h00_norm(const GridField& u);

  // Lattice sum of the ball-truncated cell weights, excluding the origin
  // (cached); exposed because flows and tests need the same constant.
  double lattice_s1(double alpha);

 private:
  friend class OperatorApplier;

  enum Which { kFull, kTail, kBall0, kLog };
  const ConvolutionPlan& plan(Which which, double alpha);

  void validate(const EnergyKind& kind) const;
  double raw_energy(EnergyTag tag, double alpha, const GridField& u);
  GridField raw_gradient(EnergyTag tag, double alpha, const GridField& u);
  double g1_value(double alpha, const GridField& u);

  std::shared_ptr<const Domain> dom_;
  double tol_;
  std::map<std::pair<int, double>, ConvolutionPlan> plans_;
  std::map<double, double> s1_;
};

// The concentration sequence v_n = n^{d/2} / log^{1/4}(n) * chi_{B_{1/n}(0)}
// sampled on the grid (cells whose center lies in the open ball). Requires
// 0 inside the domain box, h < 1/n per axis, and n >= 2.
GridField counterexample_sequence(int n, std::shared_ptr<const Domain> dom);

} // namespace riesz

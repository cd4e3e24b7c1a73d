#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "riesz/functionals.hpp"
#include "riesz/grid.hpp"

namespace riesz {

// Linear operators: the potentials and the energy gradients. Every Grad*
// kind is the exact discrete gradient of a (scaled/signed) energy, so every
// Cauchy problem reads u_t = -apply(grad_kind, u).
enum class OpTag {
  RieszPotential,  // 2 u * |z|^{alpha-d}
  Laplacian0,      // symmetric-difference ball part + tail part (grad of Jhat0)
  LogPotential,    // 2 u * log(1/|z|)
  GradScaledJ,     // grad of -alpha J(alpha)
  GradJhat,        // grad of Jhat(alpha)
  GradJ,           // grad of sign * J(alpha)
  GradJtilde,      // grad of sign * Jtilde(alpha)
  GradJtildeD,     // grad of sign * JtildeD
  GradJhat0,       // grad of Jhat0 (identical to Laplacian0)
  GradJd           // grad of sign * Jd
};

struct OperatorKind {
  OpTag tag = OpTag::RieszPotential;
  double alpha = 0.5;  // meaningful where the tag carries alpha
  int sign = +1;       // meaningful for GradJ, GradJtilde, GradJtildeD, GradJd

  static OperatorKind riesz_potential(double a) { return {OpTag::RieszPotential, a, +1}; }
  static OperatorKind laplacian0() { return {OpTag::Laplacian0, 0.0, +1}; }
  static OperatorKind log_potential() { return {OpTag::LogPotential, 0.0, +1}; }
  static OperatorKind grad_scaled_j(double a) { return {OpTag::GradScaledJ, a, +1}; }
  static OperatorKind grad_jhat(double a) { return {OpTag::GradJhat, a, +1}; }
  static OperatorKind grad_j(double a, int s) { return {OpTag::GradJ, a, s}; }
  static OperatorKind grad_jtilde(double a, int s) { return {OpTag::GradJtilde, a, s}; }
  static OperatorKind grad_jtilde_d(int s) { return {OpTag::GradJtildeD, 0.0, s}; }
  static OperatorKind grad_jhat0() { return {OpTag::GradJhat0, 0.0, +1}; }
  static OperatorKind grad_jd(int s) { return {OpTag::GradJd, 0.0, s}; }
};

const char* operator_name(OpTag tag);
bool operator_uses_alpha(OpTag tag);
bool operator_uses_sign(OpTag tag);
bool is_flow_generator(OpTag tag);

// For a Grad* kind, the energy it descends: apply(kind, u) equals
// scale * gradient(base, u), and the flow's driving energy is
// scale * energy(base, u). Throws for the plain potential kinds.
std::pair<EnergyKind, double> driving_energy(const OperatorKind& kind);

// Per-domain operator applier; wraps an EnergyEvaluator (and shares its
// cached plans). Not thread-safe: one instance per concurrent task.
class OperatorApplier {
 public:
  explicit OperatorApplier(std::shared_ptr<const Domain> dom,
                           double table_tol = 1e-10);

  const std::shared_ptr<const Domain>& domain() const { return eval_.domain(); }
  EnergyEvaluator& evaluator() { return eval_; }

  GridField apply(const OperatorKind& kind, const GridField& u);

  // Upper bound on the l2 operator norm of apply(kind, .).
  double norm_bound(const OperatorKind& kind);

 private:
  void validate(const OperatorKind& kind) const;
  EnergyEvaluator eval_;
};

// Directional-derivative verification: for each t, the defect
// |(E(u + t phi) - E(u))/t - <grad(u), phi>|. Since every energy is a pure
// quadratic, defect = t * |E(phi)| up to rounding, so defect/t is constant.
struct GradCheckRow {
  double t = 0.0;
  double defect = 0.0;
  double ratio = 0.0;  // defect / t
};

std::vector<GradCheckRow> gradient_check(EnergyEvaluator& eval,
                                         const EnergyKind& kind,
                                         const GridField& u,
                                         const GridField& phi,
                                         const std::vector<double>& t_list);

} // namespace riesz

#include "riesz/operators.hpp"

#include <cmath>
#include <stdexcept>

#include "riesz/convolve.hpp"
#include "riesz/special.hpp"

namespace riesz {

namespace {
constexpr double kAlphaMinClip = 1e-3;
} // namespace

const char* operator_name(OpTag tag) {
  switch (tag) {
    case OpTag::RieszPotential: return "RieszPotential";
    case OpTag::Laplacian0: return "Laplacian0";
    case OpTag::LogPotential: return "LogPotential";
    case OpTag::GradScaledJ: return "GradScaledJ";
    case OpTag::GradJhat: return "GradJhat";
    case OpTag::GradJ: return "GradJ";
    case OpTag::GradJtilde: return "GradJtilde";
    case OpTag::GradJtildeD: return "GradJtildeD";
    case OpTag::GradJhat0: return "GradJhat0";
    case OpTag::GradJd: return "GradJd";
  }
  return "?";
}

bool operator_uses_alpha(OpTag tag) {
  switch (tag) {
    case OpTag::RieszPotential:
    case OpTag::GradScaledJ:
    case OpTag::GradJhat:
    case OpTag::GradJ:
    case OpTag::GradJtilde:
      return true;
    default:
      return false;
  }
}

bool operator_uses_sign(OpTag tag) {
  switch (tag) {
    case OpTag::GradJ:
    case OpTag::GradJtilde:
    case OpTag::GradJtildeD:
    case OpTag::GradJd:
      return true;
    default:
      return false;
  }
}

bool is_flow_generator(OpTag tag) {
  switch (tag) {
    case OpTag::RieszPotential:
    case OpTag::Laplacian0:
    case OpTag::LogPotential:
      return false;
    default:
      return true;
  }
}

std::pair<EnergyKind, double> driving_energy(const OperatorKind& kind) {
  switch (kind.tag) {
    case OpTag::GradScaledJ:
      // descends -alpha J(alpha) = alpha * (-J)
      return {EnergyKind::j(kind.alpha, -1), kind.alpha};
    case OpTag::GradJhat:
      return {EnergyKind::jhat(kind.alpha), 1.0};
    case OpTag::GradJ:
      return {EnergyKind::j(kind.alpha, kind.sign), 1.0};
    case OpTag::GradJtilde:
      return {EnergyKind::jtilde(kind.alpha, kind.sign), 1.0};
    case OpTag::GradJtildeD:
      return {EnergyKind::jtilde_d(kind.sign), 1.0};
    case OpTag::GradJhat0:
      return {EnergyKind::jhat0(), 1.0};
    case OpTag::GradJd:
      return {EnergyKind::jd(kind.sign), 1.0};
    default:
      throw std::invalid_argument(
          "driving_energy: kind is a potential, not a flow generator");
  }
}

OperatorApplier::OperatorApplier(std::shared_ptr<const Domain> dom,
                                 double table_tol)
    : eval_(std::move(dom), table_tol) {}

void OperatorApplier::validate(const OperatorKind& kind) const {
  if (operator_uses_alpha(kind.tag)) {
    const double d = eval_.domain()->dim;
    if (!(kind.alpha >= kAlphaMinClip && kind.alpha <= d - kAlphaMinClip)) {
      throw std::invalid_argument(
          "operator: alpha outside admissible range [1e-3, d-1e-3]");
    }
  }
  if (kind.sign != 1 && kind.sign != -1) {
    throw std::invalid_argument("operator: sign must be +1 or -1");
  }
}

GridField OperatorApplier::apply(const OperatorKind& kind, const GridField& u) {
  validate(kind);
  if (!u.domain || !same_domain(*u.domain, *eval_.domain())) {
    throw std::invalid_argument("apply: field domain mismatch");
  }
  switch (kind.tag) {
    case OpTag::RieszPotential: {
      GridField v =
          convolve(eval_.plan(EnergyEvaluator::kFull, kind.alpha), u);
      scale(2.0, v);
      return v;
    }
    case OpTag::LogPotential: {
      GridField v = convolve(eval_.plan(EnergyEvaluator::kLog, 0.0), u);
      scale(2.0, v);
      return v;
    }
    case OpTag::Laplacian0:
      // Ball part 2 S1 h^d u - 2 u * W_ball0 plus tail part -2 u * W_tail:
      // exactly the gradient of Jhat0.
      return eval_.raw_gradient(EnergyTag::Jhat0, 0.0, u);
    default: {
      auto [base, sc] = driving_energy(kind);
      GridField v = eval_.gradient(base, u);
      if (sc != 1.0) scale(sc, v);
      return v;
    }
  }
}

double OperatorApplier::norm_bound(const OperatorKind& kind) {
  validate(kind);
  const Domain& dom = *eval_.domain();
  const int d = dom.dim;
  const double a = kind.alpha;
  auto opn = [&](EnergyEvaluator::Which which, double alpha) {
    return operator_norm_bound(eval_.plan(which, alpha).table);
  };
  switch (kind.tag) {
    case OpTag::RieszPotential:
      return 2.0 * opn(EnergyEvaluator::kFull, a);
    case OpTag::LogPotential:
      return 2.0 * opn(EnergyEvaluator::kLog, 0.0);
    case OpTag::Laplacian0:
    case OpTag::GradJhat0:
      return 2.0 * eval_.lattice_s1(0.0) * dom.cell_volume +
             2.0 * opn(EnergyEvaluator::kBall0, 0.0) +
             2.0 * opn(EnergyEvaluator::kTail, 0.0);
    case OpTag::GradScaledJ:
      return 2.0 * a * opn(EnergyEvaluator::kFull, a);
    case OpTag::GradJhat:
      return 2.0 * opn(EnergyEvaluator::kFull, a) +
             2.0 * d * ball_volume(d) / a;
    case OpTag::GradJ:
      return 2.0 * opn(EnergyEvaluator::kFull, a);
    case OpTag::GradJtilde:
      return (2.0 * opn(EnergyEvaluator::kFull, a) + 2.0 * dom.volume) /
             (d - a);
    case OpTag::GradJtildeD:
      return 2.0 * opn(EnergyEvaluator::kLog, 0.0);
    case OpTag::GradJd:
      return 2.0 * dom.volume;
  }
  return 0.0;
}

std::vector<GradCheckRow> gradient_check(EnergyEvaluator& eval,
                                         const EnergyKind& kind,
                                         const GridField& u,
                                         const GridField& phi,
                                         const std::vector<double>& t_list) {
  if (t_list.empty()) {
    throw std::invalid_argument("gradient_check: empty t list");
  }
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0)) {
      throw std::invalid_argument("gradient_check: t values must be positive");
    }
    if (i > 0 && !(t_list[i] < t_list[i - 1])) {
      throw std::invalid_argument("gradient_check: t values must decrease");
    }
  }

  const double e0 = eval.energy(kind, u);
  const GridField g = eval.gradient(kind, u);
  const double slope = inner_product(g, phi);

  std::vector<GradCheckRow> rows;
  rows.reserve(t_list.size());
  for (double t : t_list) {
    GridField ut = u;
    axpy(t, phi, ut);
    const double et = eval.energy(kind, ut);
    GradCheckRow row;
    row.t = t;
    row.defect = std::abs((et - e0) / t - slope);
    row.ratio = row.defect / t;
    rows.push_back(row);
  }
  return rows;
}

} // namespace riesz

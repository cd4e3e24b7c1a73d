#include "riesz/functionals.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "riesz/special.hpp"

namespace riesz {

namespace {

constexpr double kAlphaMinClip = 1e-3;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed form of int_{B_R} |log|z|| dz, the L1 witness for the log kernel.
double log_l1_ball(double R, int d) {
  if (d == 1) {
    if (R <= 1.0) return 2.0 * R * (1.0 - std::log(R));
    return 2.0 * (2.0 - R + R * std::log(R));
  }
  constexpr double kPi = 3.14159265358979323846264338327950288;
  if (R <= 1.0) return 0.5 * kPi * R * R * (1.0 - 2.0 * std::log(R));
  return 2.0 * kPi * (0.5 * R * R * std::log(R) - 0.25 * R * R + 0.5);
}

} // namespace

const char* energy_name(EnergyTag tag) {
  switch (tag) {
    case EnergyTag::J: return "J";
    case EnergyTag::Jhat: return "Jhat";
    case EnergyTag::G1: return "G1";
    case EnergyTag::J1: return "J1";
    case EnergyTag::Jhat0: return "Jhat0";
    case EnergyTag::Jd: return "Jd";
    case EnergyTag::Jtilde: return "Jtilde";
    case EnergyTag::JtildeD: return "JtildeD";
  }
  return "?";
}

bool energy_uses_alpha(EnergyTag tag) {
  switch (tag) {
    case EnergyTag::J:
    case EnergyTag::Jhat:
    case EnergyTag::G1:
    case EnergyTag::J1:
    case EnergyTag::Jtilde:
      return true;
    default:
      return false;
  }
}

double mass(const GridField& u) {
  return pairwise_sum(u.values) * u.domain->cell_volume;
}

EnergyEvaluator::EnergyEvaluator(std::shared_ptr<const Domain> dom,
                                 double table_tol)
    : dom_(std::move(dom)), tol_(table_tol) {
  if (!dom_) throw std::invalid_argument("EnergyEvaluator: null domain");
  if (!(tol_ > 0.0)) throw std::invalid_argument("EnergyEvaluator: tol > 0");
}

void EnergyEvaluator::validate(const EnergyKind& kind) const {
  if (kind.sign != 1 && kind.sign != -1) {
    throw std::invalid_argument("energy: sign must be +1 or -1");
  }
  const double d = dom_->dim;
  const double a = kind.alpha;
  if (!std::isfinite(a)) throw std::invalid_argument("energy: alpha not finite");
  switch (kind.tag) {
    case EnergyTag::J:
    case EnergyTag::Jhat:
    case EnergyTag::Jtilde:
      if (!(a >= kAlphaMinClip && a <= d - kAlphaMinClip)) {
        throw std::invalid_argument(
            "energy: alpha outside admissible range [1e-3, d-1e-3]");
      }
      break;
    case EnergyTag::G1:
    case EnergyTag::J1:
      if (a != 0.0 && !(a >= kAlphaMinClip && a <= d - kAlphaMinClip)) {
        throw std::invalid_argument(
            "energy: alpha outside {0} union [1e-3, d-1e-3]");
      }
      break;
    default:
      break;
  }
}

const ConvolutionPlan& EnergyEvaluator::plan(Which which, double alpha) {
  const auto key = std::make_pair(static_cast<int>(which), alpha);
  auto it = plans_.find(key);
  if (it != plans_.end()) return it->second;

  KernelSpec spec;
  OriginPolicy origin = OriginPolicy::Include;
  switch (which) {
    case kFull:
      spec = KernelSpec::riesz(alpha, dom_->dim);
      break;
    case kTail:
      spec = KernelSpec::tail(alpha, dom_->dim);
      break;
    case kBall0:
      spec = KernelSpec::truncated(alpha, 1.0, dom_->dim);
      origin = OriginPolicy::Zero;
      break;
    case kLog:
      spec = KernelSpec::log_kernel(dom_->dim);
      break;
  }
  KernelTable table = build_table(spec, dom_, tol_, origin);
  auto [pos, ok] = plans_.emplace(key, make_plan(dom_, std::move(table)));
  (void)ok;
  return pos->second;
}

double EnergyEvaluator::lattice_s1(double alpha) {
  auto it = s1_.find(alpha);
  if (it != s1_.end()) return it->second;
  const double v = lattice_sum_excl_origin(alpha, *dom_);
  s1_.emplace(alpha, v);
  return v;
}

double EnergyEvaluator::g1_value(double alpha, const GridField& u) {
  const KernelTable& W = plan(kBall0, alpha).table;
  const double s1 = lattice_s1(alpha);
  const Domain& dom = *dom_;
  const auto& cells = dom.cells;
  const std::size_t m = cells.size();
  const std::int64_t n1 = dom.dim == 2 ? dom.n[1] : 1;

  std::vector<double> acc(m);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < m; ++i) {
    const int i0 = static_cast<int>(cells[i] / n1);
    const int i1 = static_cast<int>(cells[i] % n1);
    const double ui = u.values[i];
    double pair = 0.0;
    double lam = 0.0;  // sum of in-domain weights around cell i
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      const int j0 = static_cast<int>(cells[j] / n1);
      const int j1 = static_cast<int>(cells[j] % n1);
      const double w = W.at(i0 - j0, i1 - j1);
      const double du = ui - u.values[j];
      pair += du * du * w;
      lam += w;
    }
    // Pairs with the zero extension outside the domain contribute u_i^2
    // times the remaining lattice weight.
    acc[i] = 0.5 * pair + ui * ui * (s1 - lam);
  }
  const double v = pairwise_sum(acc) * dom.cell_volume * dom.cell_volume;
  if (!std::isfinite(v) || v > 1e300) return kInf;
  return v;
}

double EnergyEvaluator::raw_energy(EnergyTag tag, double alpha,
                                   const GridField& u) {
  const double d = dom_->dim;
  switch (tag) {
    case EnergyTag::J:
      return -inner_product(u, convolve(plan(kFull, alpha), u));
    case EnergyTag::Jhat: {
      const double c = d * ball_volume(dom_->dim) / alpha;
      const double nrm = l2_norm(u);
      return raw_energy(EnergyTag::J, alpha, u) + c * nrm * nrm;
    }
    case EnergyTag::G1:
      return g1_value(alpha, u);
    case EnergyTag::J1:
      return -inner_product(u, convolve(plan(kTail, alpha), u));
    case EnergyTag::Jhat0: {
      const double g = g1_value(0.0, u);
      if (!std::isfinite(g)) return kInf;
      return g + raw_energy(EnergyTag::J1, 0.0, u);
    }
    case EnergyTag::Jd: {
      const double a = mass(u);
      return -a * a;
    }
    case EnergyTag::Jtilde:
      return (raw_energy(EnergyTag::J, alpha, u) -
              raw_energy(EnergyTag::Jd, alpha, u)) /
             (d - alpha);
    case EnergyTag::JtildeD:
      return -inner_product(u, convolve(plan(kLog, 0.0), u));
  }
  return 0.0;
}

GridField EnergyEvaluator::raw_gradient(EnergyTag tag, double alpha,
                                        const GridField& u) {
  const double d = dom_->dim;
  switch (tag) {
    case EnergyTag::J: {
      GridField v = convolve(plan(kFull, alpha), u);
      scale(-2.0, v);
      return v;
    }
    case EnergyTag::Jhat: {
      GridField v = convolve(plan(kFull, alpha), u);
      scale(-2.0, v);
      const double c = d * ball_volume(dom_->dim) / alpha;
      axpy(2.0 * c, u, v);
      return v;
    }
    case EnergyTag::G1: {
      GridField v = convolve(plan(kBall0, alpha), u);
      scale(-2.0, v);
      axpy(2.0 * lattice_s1(alpha) * dom_->cell_volume, u, v);
      return v;
    }
    case EnergyTag::J1: {
      GridField v = convolve(plan(kTail, alpha), u);
      scale(-2.0, v);
      return v;
    }
    case EnergyTag::Jhat0: {
      GridField v = raw_gradient(EnergyTag::G1, 0.0, u);
      GridField t = raw_gradient(EnergyTag::J1, 0.0, u);
      axpy(1.0, t, v);
      return v;
    }
    case EnergyTag::Jd: {
      GridField v = zero_field(dom_);
      const double a = mass(u);
      for (double& x : v.values) x = -2.0 * a;
      return v;
    }
    case EnergyTag::Jtilde: {
      GridField v = raw_gradient(EnergyTag::J, alpha, u);
      GridField t = raw_gradient(EnergyTag::Jd, alpha, u);
      axpy(-1.0, t, v);
      scale(1.0 / (d - alpha), v);
      return v;
    }
    case EnergyTag::JtildeD: {
      GridField v = convolve(plan(kLog, 0.0), u);
      scale(-2.0, v);
      return v;
    }
  }
  return zero_field(dom_);
}

double EnergyEvaluator::energy(const EnergyKind& kind, const GridField& u) {
  validate(kind);
  if (!u.domain || !same_domain(*u.domain, *dom_)) {
    throw std::invalid_argument("energy: field domain mismatch");
  }
  return kind.sign * raw_energy(kind.tag, kind.alpha, u);
}

GridField EnergyEvaluator::gradient(const EnergyKind& kind, const GridField& u) {
  validate(kind);
  if (!u.domain || !same_domain(*u.domain, *dom_)) {
    throw std::invalid_argument("gradient: field domain mismatch");
  }
  GridField v = raw_gradient(kind.tag, kind.alpha, u);
  if (kind.sign != 1) scale(static_cast<double>(kind.sign), v);
  return v;
}

ConvexityCertificate EnergyEvaluator::certify(const EnergyKind& kind) {
  validate(kind);
  const int d = dom_->dim;
  const double diam = dom_->diameter;
  const double vol = dom_->volume;
  const double hd = dom_->cell_volume;
  const double a = kind.alpha;
  const bool pos = kind.sign > 0;

  ConvexityCertificate cert;
  cert.kind = CertKind::Convexity;
  double witness = 0.0;
  switch (kind.tag) {
    case EnergyTag::J:
      // |J(u)| <= ||k^alpha||_{L1(B_diam)} ||u||^2, valid for either sign.
      witness = d * ball_volume(d) / a * std::pow(diam, a);
      break;
    case EnergyTag::Jhat:
      if (pos) {
        witness = vol;  // Jhat >= G1 - vol ||u||^2 >= -vol ||u||^2
      } else {
        witness = lattice_s1(a) * hd +
                  operator_norm_bound(plan(kBall0, a).table) + vol;
      }
      break;
    case EnergyTag::G1:
      if (pos) {
        witness = 0.0;  // G1 >= 0 identically
        cert.kind = CertKind::Positivity;
      } else {
        witness = lattice_s1(a) * hd + operator_norm_bound(plan(kBall0, a).table);
      }
      break;
    case EnergyTag::J1:
      witness = vol;  // |J1(u)| <= ||u||_{L1}^2 <= vol ||u||^2
      break;
    case EnergyTag::Jhat0:
      if (pos) {
        witness = vol;  // Jhat0 >= -vol ||u||^2 since G1(0) >= 0
        cert.kind = CertKind::Positivity;
      } else {
        witness = lattice_s1(0.0) * hd +
                  operator_norm_bound(plan(kBall0, 0.0).table) + vol;
      }
      break;
    case EnergyTag::Jd:
      witness = vol;  // (int u)^2 <= vol ||u||^2
      break;
    case EnergyTag::Jtilde:
      witness = (d * ball_volume(d) / a * std::pow(diam, a) + vol) / (d - a);
      break;
    case EnergyTag::JtildeD:
      witness = log_l1_ball(diam, d);
      break;
  }
  cert.witness_bound = witness;
  cert.lambda = witness == 0.0 ? 0.01 : 2.0 * witness * 1.01;
  return cert;
}

double EnergyEvaluator::h00_norm(const GridField& u) {
  if (!u.domain || !same_domain(*u.domain, *dom_)) {
    throw std::invalid_argument("h00_norm: field domain mismatch");
  }
  const double g = g1_value(0.0, u);
  if (!std::isfinite(g)) return kInf;
  return l2_norm(u) + std::sqrt(2.0 * g);
}

GridField counterexample_sequence(int n, std::shared_ptr<const Domain> dom) {
  if (!dom) throw std::invalid_argument("counterexample_sequence: null domain");
  if (n < 2) throw std::invalid_argument("counterexample_sequence: n >= 2");
  const double r = 1.0 / n;
  for (int ax = 0; ax < dom->dim; ++ax) {
    if (!(dom->lo[ax] < 0.0 && dom->hi[ax] > 0.0)) {
      throw std::invalid_argument(
          "counterexample_sequence: the domain box must contain 0");
    }
    if (!(dom->h[ax] < r)) {
      throw std::invalid_argument(
          "counterexample_sequence: grid does not resolve B_{1/n} (need h < 1/n)");
    }
  }
  const double value =
      std::pow(static_cast<double>(n), 0.5 * dom->dim) /
      std::pow(std::log(static_cast<double>(n)), 0.25);

  GridField v = zero_field(dom);
  const std::int64_t n1 = dom->dim == 2 ? dom->n[1] : 1;
  for (std::size_t i = 0; i < dom->cells.size(); ++i) {
    const int i0 = static_cast<int>(dom->cells[i] / n1);
    const int i1 = static_cast<int>(dom->cells[i] % n1);
    const double x = dom->center(0, i0);
    const double y = dom->dim == 2 ? dom->center(1, i1) : 0.0;
    const double dist = dom->dim == 2 ? std::hypot(x, y) : std::abs(x);
    if (dist < r) v.values[i] = value;
  }
  return v;
}

} // namespace riesz

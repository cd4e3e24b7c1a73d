#include "riesz/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "riesz/quadrature.hpp"
#include "riesz/special.hpp"

namespace riesz {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kAlphaMinClip = 1e-3;  // admissible range for plain kernels

void validate_spec(const KernelSpec& s) {
  if (s.dim != 1 && s.dim != 2) {
    throw std::invalid_argument("kernel: dim must be 1 or 2");
  }
  const double d = s.dim;
  switch (s.kind) {
    case KernelKind::Riesz:
    case KernelKind::DiffQuotient:
      if (!(s.alpha >= kAlphaMinClip && s.alpha <= d - kAlphaMinClip)) {
        throw std::invalid_argument(
            "kernel: alpha outside admissible range [1e-3, d-1e-3]");
      }
      break;
    case KernelKind::TruncatedRiesz:
      if (!(s.R > 0.0)) {
        throw std::invalid_argument("kernel: TruncatedRiesz requires R > 0");
      }
      [[fallthrough]];
    case KernelKind::TailRiesz:
      if (s.alpha != 0.0 &&
          !(s.alpha >= kAlphaMinClip && s.alpha <= d - kAlphaMinClip)) {
        throw std::invalid_argument(
            "kernel: alpha outside {0} union [1e-3, d-1e-3]");
      }
      break;
    case KernelKind::Log:
    case KernelKind::Constant:
      break;
  }
}

// ---------------------------------------------------------------------------
// d = 1: exact antiderivatives.

// F with F'(z) = |z|^{alpha-1}, odd; valid for alpha > 0.
double antider_riesz(double alpha, double z) {
  if (z == 0.0) return 0.0;
  const double s = z > 0.0 ? 1.0 : -1.0;
  return s * std::pow(std::abs(z), alpha) / alpha;
}

// F with F'(z) = 1/|z|, odd up to the additive convention; only ever used on
// intervals that do not touch 0.
double antider_inv(double z) {
  const double s = z > 0.0 ? 1.0 : -1.0;
  return s * std::log(std::abs(z));
}

// F with F'(z) = log(1/|z|), odd; F(0) = 0.
double antider_log(double z) {
  if (z == 0.0) return 0.0;
  const double s = z > 0.0 ? 1.0 : -1.0;
  const double a = std::abs(z);
  return s * a * (1.0 - std::log(a));
}

// Integral of |z|^{alpha-1} over [a, b] (alpha = 0 means 1/|z|; interval
// must then avoid 0).
double riesz_int_1d(double alpha, double a, double b) {
  if (b <= a) return 0.0;
  if (alpha == 0.0) return antider_inv(b) - antider_inv(a);
  return antider_riesz(alpha, b) - antider_riesz(alpha, a);
}

// Exact integral of the kernel over the cell [a, b].
double cell_integral_1d(const KernelSpec& s, double a, double b) {
  switch (s.kind) {
    case KernelKind::Constant:
      return b - a;
    case KernelKind::Riesz:
      return riesz_int_1d(s.alpha, a, b);
    case KernelKind::Log:
      return antider_log(b) - antider_log(a);
    case KernelKind::DiffQuotient:
      return (riesz_int_1d(s.alpha, a, b) - (b - a)) / (1.0 - s.alpha);
    case KernelKind::TruncatedRiesz: {
      const double lo = std::max(a, -s.R), hi = std::min(b, s.R);
      return riesz_int_1d(s.alpha, lo, hi);
    }
    case KernelKind::TailRiesz: {
      double v = 0.0;
      // piece in (-inf, -1)
      const double lo1 = a, hi1 = std::min(b, -1.0);
      v += riesz_int_1d(s.alpha, lo1, hi1);
      // piece in (1, inf)
      const double lo2 = std::max(a, 1.0), hi2 = b;
      v += riesz_int_1d(s.alpha, lo2, hi2);
      return v;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// d = 2 machinery.

struct Rect {
  double x0, x1, y0, y1;
};

// Radial profile value (smooth branch; caller guarantees r > 0 and that any
// indicator is constant over the evaluation region).
double radial_value(const KernelSpec& s, double r) {
  switch (s.kind) {
    case KernelKind::Constant:
      return 1.0;
    case KernelKind::Log:
      return -std::log(r);
    case KernelKind::DiffQuotient:
      return (std::pow(r, s.alpha - 2.0) - 1.0) / (2.0 - s.alpha);
    default:
      return std::pow(r, s.alpha - 2.0);  // Riesz family, alpha may be 0
  }
}

// Antiderivative K with K'(r) = k(r) * r (the polar radial factor), K(0+)=0
// where the limit exists. For the alpha = 0 Riesz family K(r) = log r, used
// only with strictly positive lower bounds.
double radial_antider(const KernelSpec& s, double r) {
  switch (s.kind) {
    case KernelKind::Constant:
      return 0.5 * r * r;
    case KernelKind::Log:
      return r == 0.0 ? 0.0 : r * r * (0.25 - 0.5 * std::log(r));
    case KernelKind::DiffQuotient:
      return r == 0.0 ? 0.0
                      : (std::pow(r, s.alpha) / s.alpha - 0.5 * r * r) /
                            (2.0 - s.alpha);
    default:
      if (s.alpha == 0.0) return std::log(r);
      return std::pow(r, s.alpha) / s.alpha;
  }
}

// Radial support clip [lo, hi] coming from the indicator part of the kernel.
void radial_clip(const KernelSpec& s, double* lo, double* hi) {
  *lo = 0.0;
  *hi = std::numeric_limits<double>::infinity();
  if (s.kind == KernelKind::TruncatedRiesz) *hi = s.R;
  if (s.kind == KernelKind::TailRiesz) *lo = 1.0;
}

// Exact-in-r, adaptive-in-angle integral of the kernel over a rectangle in
// the closed first quadrant (x0 >= 0, y0 >= 0). Handles the origin-corner
// case x0 = y0 = 0.
double polar_integral(const KernelSpec& s, const Rect& rc, double tol) {
  double clip_lo, clip_hi;
  radial_clip(s, &clip_lo, &clip_hi);

  const double theta_min = std::atan2(rc.y0, rc.x1);
  const double theta_max = std::atan2(rc.y1, rc.x0);  // pi/2 when x0 = 0
  if (!(theta_max > theta_min)) return 0.0;

  std::vector<double> brk;
  if (rc.x0 > 0.0 || rc.y0 > 0.0) brk.push_back(std::atan2(rc.y0, rc.x0));
  brk.push_back(std::atan2(rc.y1, rc.x1));
  // Angles where a truncation circle of radius c meets the slab constraints.
  for (double c : {clip_lo, clip_hi}) {
    if (!(c > 0.0) || !std::isfinite(c)) continue;
    for (double x : {rc.x0, rc.x1}) {
      const double t = x / c;
      if (t > 0.0 && t < 1.0) brk.push_back(std::acos(t));
    }
    for (double y : {rc.y0, rc.y1}) {
      const double t = y / c;
      if (t > 0.0 && t < 1.0) brk.push_back(std::asin(t));
    }
  }

  auto g = [&](double theta) -> double {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    // Gauss nodes are interior to (0, pi/2) subpanels, so ct, st > 0.
    double rin = 0.0;
    if (rc.x0 > 0.0) rin = rc.x0 / ct;
    if (rc.y0 > 0.0) rin = std::max(rin, rc.y0 / st);
    const double rout = std::min(rc.x1 / ct, rc.y1 / st);
    const double lo = std::max(rin, clip_lo);
    const double hi = std::min(rout, clip_hi);
    if (!(hi > lo)) return 0.0;
    return radial_antider(s, hi) - radial_antider(s, lo);
  };

  return adaptive_gauss(g, theta_min, theta_max, tol, 4, brk, 40, 15);
}

// Adaptive tensor Gauss (4x4 per panel, quad-split refinement) for cells on
// which the kernel profile is smooth. The acceptance scale is the |f| mass
// of the whole cell, so the criterion controls the absolute weight error
// relative to the cell's own magnitude.
class TensorAdaptive {
 public:
  TensorAdaptive(const KernelSpec& s, double tol, int depth_cap)
      : spec_(s), tol_(tol), cap_(depth_cap) {}

  double integrate(const Rect& rc) {
    double coarse_abs = 0.0;
    const double coarse = panel(rc, &coarse_abs);
    scale_ = std::max(coarse_abs, 1e-300);
    return refine(rc, coarse, 0);
  }

 private:
  double panel(const Rect& rc, double* abs_mass) const {
    const GaussRule& g = gauss_legendre(4);
    const double mx = 0.5 * (rc.x0 + rc.x1), hx = 0.5 * (rc.x1 - rc.x0);
    const double my = 0.5 * (rc.y0 + rc.y1), hy = 0.5 * (rc.y1 - rc.y0);
    double s = 0.0, sa = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double x = mx + hx * g.nodes[i];
      for (int j = 0; j < 4; ++j) {
        const double y = my + hy * g.nodes[j];
        const double v = radial_value(spec_, std::hypot(x, y));
        const double w = g.weights[i] * g.weights[j];
        s += w * v;
        sa += w * std::abs(v);
      }
    }
    if (abs_mass) *abs_mass = sa * hx * hy;
    return s * hx * hy;
  }

  double refine(const Rect& rc, double coarse, int depth) {
    const double mx = 0.5 * (rc.x0 + rc.x1);
    const double my = 0.5 * (rc.y0 + rc.y1);
    const Rect q[4] = {{rc.x0, mx, rc.y0, my},
                       {mx, rc.x1, rc.y0, my},
                       {rc.x0, mx, my, rc.y1},
                       {mx, rc.x1, my, rc.y1}};
    double fine[4];
    double refined = 0.0;
    for (int i = 0; i < 4; ++i) {
      fine[i] = panel(q[i], nullptr);
      refined += fine[i];
    }
    if (std::abs(refined - coarse) <= tol_ * std::max(std::abs(refined), scale_)) {
      return refined;
    }
    if (depth >= cap_) {
      throw std::runtime_error(
          "build_table: quadrature tolerance not reached within depth cap");
    }
    double out = 0.0;
    for (int i = 0; i < 4; ++i) out += refine(q[i], fine[i], depth + 1);
    return out;
  }

  KernelSpec spec_;
  double tol_;
  int cap_;
  double scale_ = 0.0;
};

// Minimum/maximum distance from the origin to a rectangle in Q1.
double rect_rmin(const Rect& rc) { return std::hypot(rc.x0, rc.y0); }
double rect_rmax(const Rect& rc) { return std::hypot(rc.x1, rc.y1); }

// Cell-average weight for offset (ox, oy) in d = 2.
double weight_2d(const KernelSpec& s, int ox, int oy, double h0, double h1,
                 double tol, OriginPolicy origin) {
  if (s.kind == KernelKind::Constant) return 1.0;

  const bool is_origin = (ox == 0 && oy == 0);
  if (is_origin && origin == OriginPolicy::Zero) return 0.0;

  // Fold onto the first quadrant; the kernel is radial, cells reflect.
  const int ax = std::abs(ox), ay = std::abs(oy);
  double mult = 1.0;
  Rect rc{ax * h0 - 0.5 * h0, ax * h0 + 0.5 * h0, ay * h1 - 0.5 * h1,
          ay * h1 + 0.5 * h1};
  if (ax == 0) {
    rc.x0 = 0.0;
    mult *= 2.0;
  }
  if (ay == 0) {
    rc.y0 = 0.0;
    mult *= 2.0;
  }

  const double rmin = rect_rmin(rc);
  const double rmax = rect_rmax(rc);

  bool straddle = false;
  if (s.kind == KernelKind::TruncatedRiesz) {
    if (rmin >= s.R) return 0.0;
    straddle = rmax > s.R;
  } else if (s.kind == KernelKind::TailRiesz) {
    if (rmax <= 1.0) return 0.0;
    straddle = rmin < 1.0;
  }

  const double near_band = 4.0 * std::max(h0, h1);
  const bool use_polar = is_origin || straddle || rmin <= near_band;

  const double cell_area = h0 * h1;
  if (use_polar) {
    return mult * polar_integral(s, rc, tol) / cell_area;
  }
  TensorAdaptive ta(s, tol, 24);
  return mult * ta.integrate(rc) / cell_area;
}

double weight_1d(const KernelSpec& s, int o, double h, OriginPolicy origin) {
  if (s.kind == KernelKind::Constant) return 1.0;
  if (o == 0 && origin == OriginPolicy::Zero) return 0.0;
  const double a = o * h - 0.5 * h;
  const double b = o * h + 0.5 * h;
  return cell_integral_1d(s, a, b) / h;
}

} // namespace

double eval_kernel(const KernelSpec& spec, std::array<double, 2> z) {
  validate_spec(spec);
  const double r = spec.dim == 2 ? std::hypot(z[0], z[1]) : std::abs(z[0]);
  const double d = spec.dim;
  switch (spec.kind) {
    case KernelKind::Constant:
      return 1.0;
    case KernelKind::TailRiesz:
      if (r <= 1.0) return 0.0;  // indicator kills the singularity
      return std::pow(r, spec.alpha - d);
    case KernelKind::TruncatedRiesz:
      if (r > spec.R) return 0.0;
      if (r == 0.0) throw std::domain_error("eval_kernel: z = 0 on singular kernel");
      return std::pow(r, spec.alpha - d);
    case KernelKind::Riesz:
      if (r == 0.0) throw std::domain_error("eval_kernel: z = 0 on singular kernel");
      return std::pow(r, spec.alpha - d);
    case KernelKind::Log:
      if (r == 0.0) throw std::domain_error("eval_kernel: z = 0 on singular kernel");
      return -std::log(r);
    case KernelKind::DiffQuotient:
      if (r == 0.0) throw std::domain_error("eval_kernel: z = 0 on singular kernel");
      return (std::pow(r, spec.alpha - d) - 1.0) / (d - spec.alpha);
  }
  return 0.0;
}

double eval_kernel(const KernelSpec& spec, double z) {
  return eval_kernel(spec, std::array<double, 2>{z, 0.0});
}

KernelTable build_table(const KernelSpec& spec, std::shared_ptr<const Domain> dom,
                        double tol, OriginPolicy origin) {
  validate_spec(spec);
  if (!dom) throw std::invalid_argument("build_table: null domain");
  if (spec.dim != dom->dim) {
    throw std::invalid_argument("build_table: kernel/domain dimension mismatch");
  }
  if (!(tol > 0.0)) throw std::invalid_argument("build_table: tol must be > 0");
  if (spec.alpha == 0.0 && spec.kind == KernelKind::TruncatedRiesz &&
      origin == OriginPolicy::Include) {
    throw std::invalid_argument(
        "build_table: alpha = 0 ball table exists only with a zero origin "
        "weight (the origin cell mass diverges)");
  }

  KernelTable t;
  t.domain = dom;
  t.spec = spec;
  t.tol = tol;
  t.reach = {dom->n[0] - 1, dom->dim == 2 ? dom->n[1] - 1 : 0};
  const int w1 = 2 * t.reach[1] + 1;
  t.weights.assign((2 * t.reach[0] + 1) * static_cast<std::size_t>(w1), 0.0);

  if (dom->dim == 1) {
    const double h = dom->h[0];
    const int r = t.reach[0];
#pragma omp parallel for schedule(dynamic)
    for (int o = 0; o <= r; ++o) {
      const double w = weight_1d(spec, o, h, origin);
      t.slot(o, 0) = w;
      t.slot(-o, 0) = w;
    }
    return t;
  }

  const double h0 = dom->h[0], h1 = dom->h[1];
  const bool square = h0 == h1;
  const int r0 = t.reach[0], r1 = t.reach[1];

  // Canonical offsets: one representative per symmetry orbit. Square cells
  // admit the full 8-fold (sign + swap) symmetry, rectangular cells only the
  // 4-fold sign symmetry.
  std::vector<std::array<int, 2>> canon;
  for (int ox = 0; ox <= r0; ++ox) {
    const int top = square ? std::min(ox, r1) : r1;
    for (int oy = 0; oy <= top; ++oy) canon.push_back({ox, oy});
  }

#pragma omp parallel for schedule(dynamic)
  for (std::size_t idx = 0; idx < canon.size(); ++idx) {
    const int ox = canon[idx][0], oy = canon[idx][1];
    const double w = weight_2d(spec, ox, oy, h0, h1, tol, origin);
    for (int sx : {-1, 1}) {
      for (int sy : {-1, 1}) {
        t.slot(sx * ox, sy * oy) = w;
        if (square && oy <= r0 && ox <= r1) t.slot(sx * oy, sy * ox) = w;
      }
    }
  }
  return t;
}

double kernel_l1_truncated(double alpha, double R, int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("kernel_l1_truncated: d in {1,2}");
  if (!(alpha > 0.0 && alpha < d)) {
    throw std::invalid_argument("kernel_l1_truncated: requires 0 < alpha < d");
  }
  if (!(R > 0.0)) throw std::invalid_argument("kernel_l1_truncated: R > 0");
  return d * ball_volume(d) / alpha * std::pow(R, alpha);
}

double fourier_constant(double alpha, int d) {
  if (d != 1 && d != 2) throw std::invalid_argument("fourier_constant: d in {1,2}");
  if (!(alpha > 0.0 && alpha < d)) {
    throw std::invalid_argument("fourier_constant: requires 0 < alpha < d");
  }
  return std::pow(2.0, alpha) * std::pow(kPi, 0.5 * d) * gamma_fn(0.5 * alpha) /
         gamma_fn(0.5 * (d - alpha));
}

FourierCheck check_fourier_identity(double alpha, int d, int quad_n) {
  if (d != 1) {
    throw std::invalid_argument("check_fourier_identity: verification runs in d = 1");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("check_fourier_identity: requires 0 < alpha < 1");
  }
  if (quad_n < 1) quad_n = 1;
  const int panels = std::max(1, quad_n / 15);
  const double tol = 1e-11;

  // lhs = int_R e^{-x^2} |x|^{alpha-1} dx. Substituting x = t^{1/alpha}
  // removes the endpoint singularity: lhs = (2/alpha) int_0^X e^{-t^{2/alpha}} dt.
  const double X = std::pow(35.0, alpha);
  const double lhs = 2.0 / alpha *
                     adaptive_gauss(
                         [&](double t) {
                           const double x = std::pow(t, 1.0 / alpha);
                           return std::exp(-x * x);
                         },
                         0.0, X, tol, panels, {}, 48, 15);

  // rhs = (2pi)^{-1} c(alpha,1) int_R sqrt(pi) e^{-xi^2/4} |xi|^{-alpha} dxi,
  // with xi = t^{1/(1-alpha)} smoothing the |xi|^{-alpha} endpoint.
  const double beta = 1.0 - alpha;
  const double Y = std::pow(70.0, beta);
  const double integral = 2.0 / beta *
                          adaptive_gauss(
                              [&](double t) {
                                const double xi = std::pow(t, 1.0 / beta);
                                return std::exp(-0.25 * xi * xi);
                              },
                              0.0, Y, tol, panels, {}, 48, 15);
  const double rhs = fourier_constant(alpha, 1) * std::sqrt(kPi) * integral /
                     (2.0 * kPi);

  FourierCheck out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.rel_error = std::abs(lhs - rhs) / std::abs(lhs);
  return out;
}

double taylor_defect(double alpha, double z_abs, int dim) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("taylor_defect: d in {1,2}");
  if (!(alpha > 0.0 && alpha < dim)) {
    throw std::invalid_argument("taylor_defect: requires 0 < alpha < d");
  }
  if (!(z_abs > 0.0 && z_abs <= 1.0)) {
    throw std::invalid_argument("taylor_defect: requires z_abs in (0, 1]");
  }
  if (z_abs == 1.0) return 0.0;  // both sides vanish
  const double beta = dim - alpha;
  const double L = -std::log(z_abs);
  // k~^alpha(z) = (e^{beta L} - 1)/beta; expm1 keeps the cancellation exact.
  const double diff = std::expm1(beta * L) / beta - L;
  return std::abs(diff) / (beta * L * L);
}

double lattice_sum_excl_origin(double alpha, const Domain& dom) {
  const int d = dom.dim;
  const double h0 = dom.h[0];
  const double h1 = d == 2 ? dom.h[1] : 0.0;
  const double cell_diag =
      d == 1 ? 0.5 * h0 : std::hypot(0.5 * h0, 0.5 * h1);
  if (cell_diag > 1.0) {
    throw std::invalid_argument(
        "lattice_sum_excl_origin: origin cell must fit inside B_1");
  }
  if (alpha != 0.0 && !(alpha >= kAlphaMinClip && alpha <= d - kAlphaMinClip)) {
    throw std::invalid_argument(
        "lattice_sum_excl_origin: alpha outside {0} union [1e-3, d-1e-3]");
  }

  if (d == 1) {
    if (alpha == 0.0) return 2.0 * std::log(2.0 / h0) / h0;
    // ( int_{B_1} - int_{cell_0} ) |z|^{alpha-1} / h
    const double full = 2.0 / alpha;
    const double cell0 = 2.0 * std::pow(0.5 * h0, alpha) / alpha;
    return (full - cell0) / h0;
  }

  if (alpha == 0.0) {
    if (h0 != h1) {
      throw std::invalid_argument(
          "lattice_sum_excl_origin: alpha = 0 in d = 2 needs square cells");
    }
    // int_{B_1 \ cell_0} r^{-2} = 2 pi log(2/h) - 8 * int_0^{pi/4} log(1/cos).
    static const double corner = adaptive_gauss(
        [](double th) { return -std::log(std::cos(th)); }, 0.0, 0.25 * kPi,
        1e-14, 4, {}, 48, 15);
    return (2.0 * kPi * std::log(2.0 / h0) - 8.0 * corner) / (h0 * h1);
  }

  // S_1 h^d = ||k^alpha chi_{B_1}||_{L^1} - int_{cell_0} k^alpha.
  const double full = kernel_l1_truncated(alpha, 1.0, 2);
  const KernelSpec rs = KernelSpec::riesz(alpha, 2);
  const Rect quarter{0.0, 0.5 * h0, 0.0, 0.5 * h1};
  const double cell0 = 4.0 * polar_integral(rs, quarter, 1e-13);
  return (full - cell0) / (h0 * h1);
}

} // namespace riesz

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "riesz/operators.hpp"
#include "riesz/quadrature.hpp"

using namespace riesz;

namespace {

GridField random_field(std::shared_ptr<const Domain> dom, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridField u = zero_field(dom);
  for (double& x : u.values) x = dist(rng);
  return u;
}

std::vector<OperatorKind> all_kinds(double a) {
  return {OperatorKind::riesz_potential(a), OperatorKind::laplacian0(),
          OperatorKind::log_potential(),   OperatorKind::grad_scaled_j(a),
          OperatorKind::grad_jhat(a),      OperatorKind::grad_j(a, -1),
          OperatorKind::grad_jtilde(a, +1), OperatorKind::grad_jtilde_d(-1),
          OperatorKind::grad_jhat0(),      OperatorKind::grad_jd(+1)};
}

} // namespace

TEST_CASE("Riesz potential of the indicator at the midpoint") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 1024, MaskSpec::full_box());
  OperatorApplier ops(dom);
  GridField chi = indicator_field(dom);
  GridField v = ops.apply(OperatorKind::riesz_potential(0.5), chi);
  // v(x) = 2 int_0^1 |x-y|^{-1/2} dy = 4(sqrt(x) + sqrt(1-x)); at the cell
  // center nearest 0.5 the value is 4 sqrt(2) up to O(h^2).
  const double want = 4.0 * std::sqrt(2.0);
  CHECK(std::abs(v[512] - want) <= 1e-3 * want);
}

TEST_CASE("log potential of the indicator at the midpoint") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 1024, MaskSpec::full_box());
  OperatorApplier ops(dom);
  GridField chi = indicator_field(dom);
  GridField v = ops.apply(OperatorKind::log_potential(), chi);
  // v(x) = 2 int_0^1 log(1/|x-y|) dy = 2(1 + log 2) at x = 1/2.
  const double want = 2.0 * (1.0 + std::log(2.0));
  CHECK(std::abs(v[512] - want) <= 1e-3 * want);
}

TEST_CASE("0-order operator matches continuum quadrature on a Gaussian") {
  const int n = 2048;
  auto dom = build_domain(1, {-2, 0}, {2, 0}, n, MaskSpec::full_box());
  GridField u =
      make_field(dom, [](double x, double) { return std::exp(-x * x); });
  OperatorApplier ops(dom);
  GridField Lu = ops.apply(OperatorKind::laplacian0(), u);

  auto uext = [&](double x) {
    return (x > -2.0 && x < 2.0) ? std::exp(-x * x) : 0.0;
  };
  double max_abs = 0.0;
  for (int k = 0; k < Lu.size(); ++k) max_abs = std::max(max_abs, std::abs(Lu[k]));

  for (int ci : {256, 640, 1024, 1424, 1696}) {
    const double x = dom->center(0, ci);
    const double ux = std::exp(-x * x);
    // Singular part: 2 int_{|z|<=1} (u(x) - u(x+z)) / |z| dz.
    const double ball = 2.0 * adaptive_gauss(
        [&](double z) { return (ux - uext(x + z)) / std::abs(z); }, -1.0, 1.0,
        1e-10, 8, {0.0});
    // Tail part: -2 int_{|z|>1} u(x+z)/|z| dz, restricted to the box.
    double tail = 0.0;
    if (2.0 - x > 1.0) {
      tail += adaptive_gauss([&](double z) { return uext(x + z) / z; }, 1.0,
                             2.0 - x, 1e-10, 4);
    }
    if (x + 2.0 > 1.0) {
      tail += adaptive_gauss([&](double z) { return uext(x + z) / (-z); },
                             -(x + 2.0), -1.0, 1e-10, 4);
    }
    const double oracle = ball - 2.0 * tail;
    CHECK(std::abs(Lu[ci] - oracle) <= 1e-2 * std::max(std::abs(oracle),
                                                       0.05 * max_abs));
  }
}

TEST_CASE("all operators are self-adjoint") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  OperatorApplier ops(dom);
  GridField u = random_field(dom, 3), v = random_field(dom, 4);
  for (const OperatorKind& kind : all_kinds(0.5)) {
    const double a = inner_product(ops.apply(kind, u), v);
    const double b = inner_product(u, ops.apply(kind, v));
    CHECK(std::abs(a - b) <= 1e-10 * std::max({std::abs(a), std::abs(b), 1.0}));
  }
}

TEST_CASE("Euler identity: <grad E(u), u> = 2 E(u) for every energy") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField u = random_field(dom, 8);
  for (EnergyKind kind :
       {EnergyKind::j(0.5), EnergyKind::jhat(0.5), EnergyKind::g1(0.5),
        EnergyKind::j1(0.5), EnergyKind::g1(0.0), EnergyKind::j1(0.0),
        EnergyKind::jhat0(), EnergyKind::jd(), EnergyKind::jtilde(0.5),
        EnergyKind::jtilde_d(), EnergyKind::jhat(0.5, -1)}) {
    const double e = ev.energy(kind, u);
    const double pairing = inner_product(ev.gradient(kind, u), u);
    CHECK(std::abs(pairing - 2.0 * e) <=
          1e-8 * std::max(std::abs(e), 1e-6));
  }
}

TEST_CASE("gradient check: defect is exactly linear in t") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField u = random_field(dom, 21), phi = random_field(dom, 22);
  const std::vector<double> ts = {1e-1, 1e-2, 1e-3};
  for (EnergyKind kind :
       {EnergyKind::j(0.5), EnergyKind::jhat(0.5), EnergyKind::g1(0.5),
        EnergyKind::j1(0.5), EnergyKind::jhat0(), EnergyKind::jd(),
        EnergyKind::jtilde(0.5), EnergyKind::jtilde_d()}) {
    const double ref = std::abs(ev.energy(kind, phi));
    const auto rows = gradient_check(ev, kind, u, phi, ts);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) {
      CHECK(std::abs(r.ratio - ref) <= 1e-6 * std::max(ref, 1e-12));
      CHECK(r.defect == doctest::Approx(r.t * r.ratio).epsilon(1e-12));
    }
  }
}

TEST_CASE("gradient check closed-form example for the mass-square energy") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField chi = indicator_field(dom);
  // E = Jd, u = phi = chi: (E(u + t u) - E(u))/t - <grad, u>
  //   = (-(1+t)^2 + 1)/t + 2 = t, so defect(t=0.1) = 0.1 exactly.
  const auto rows = gradient_check(ev, EnergyKind::jd(), chi, chi, {0.1});
  CHECK(rows[0].defect == doctest::Approx(0.1).epsilon(1e-10));
  CHECK(rows[0].ratio == doctest::Approx(1.0).epsilon(1e-10));
  // Zero direction: zero slope, zero defect.
  GridField zero = zero_field(dom);
  const auto zr = gradient_check(ev, EnergyKind::jtilde_d(), chi, zero, {0.1});
  CHECK(zr[0].defect == 0.0);
}

TEST_CASE("gradient check validates its t list") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 16, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField chi = indicator_field(dom);
  CHECK_THROWS_AS(gradient_check(ev, EnergyKind::jd(), chi, chi, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gradient_check(ev, EnergyKind::jd(), chi, chi, {-0.1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(gradient_check(ev, EnergyKind::jd(), chi, chi, {1e-3, 1e-2}),
                  std::invalid_argument);
}

TEST_CASE("norm bounds dominate measured operator norms") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 48, MaskSpec::full_box());
  OperatorApplier ops(dom);
  for (const OperatorKind& kind : all_kinds(0.4)) {
    const double bound = ops.norm_bound(kind);
    CHECK(bound > 0.0);
    for (unsigned seed = 1; seed <= 5; ++seed) {
      GridField u = random_field(dom, seed);
      const double ratio = l2_norm(ops.apply(kind, u)) / l2_norm(u);
      CHECK(ratio <= bound * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("gradient kinds descend their driving energies") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 48, MaskSpec::full_box());
  OperatorApplier ops(dom);
  GridField u = random_field(dom, 14);
  for (const OperatorKind& kind : all_kinds(0.5)) {
    if (!is_flow_generator(kind.tag)) {
      CHECK_THROWS_AS(driving_energy(kind), std::invalid_argument);
      continue;
    }
    const auto [base, scl] = driving_energy(kind);
    GridField lhs = ops.apply(kind, u);
    GridField rhs = ops.evaluator().gradient(base, u);
    scale(scl, rhs);
    for (int k = 0; k < lhs.size(); ++k) {
      CHECK(std::abs(lhs[k] - rhs[k]) <= 1e-12 * std::max(std::abs(rhs[k]), 1.0));
    }
  }
  // The 0-order operator and the gradient of its energy coincide exactly.
  GridField a = ops.apply(OperatorKind::laplacian0(), u);
  GridField b = ops.apply(OperatorKind::grad_jhat0(), u);
  for (int k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
}

TEST_CASE("operator metadata") {
  CHECK(is_flow_generator(OpTag::GradJhat));
  CHECK(is_flow_generator(OpTag::GradJd));
  CHECK(!is_flow_generator(OpTag::RieszPotential));
  CHECK(!is_flow_generator(OpTag::LogPotential));
  CHECK(operator_uses_alpha(OpTag::GradJ));
  CHECK(!operator_uses_alpha(OpTag::GradJd));
  CHECK(operator_uses_sign(OpTag::GradJtilde));
  CHECK(!operator_uses_sign(OpTag::GradJhat));
}

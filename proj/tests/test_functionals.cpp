#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "riesz/functionals.hpp"
#include "riesz/special.hpp"

using namespace riesz;

namespace {

GridField random_field(std::shared_ptr<const Domain> dom, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridField u = zero_field(dom);
  for (double& x : u.values) x = dist(rng);
  return u;
}

} // namespace

TEST_CASE("closed-form energies of the unit-interval indicator") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 256, MaskSpec::full_box());
  GridField chi = indicator_field(dom);
  EnergyEvaluator ev(dom);

  // J(a, chi) = -2/(a(a+1)), Jhat(a, chi) = 2/(a+1) on Omega = (0,1).
  for (double a : {0.25, 0.5, 0.75}) {
    const double j = ev.energy(EnergyKind::j(a), chi);
    const double jhat = ev.energy(EnergyKind::jhat(a), chi);
    CHECK(std::abs(j + 2.0 / (a * (a + 1.0))) <= 1e-3 * 2.0 / (a * (a + 1.0)));
    CHECK(std::abs(jhat - 2.0 / (a + 1.0)) <= 1e-3 * 2.0 / (a + 1.0));
  }
  CHECK(std::abs(ev.energy(EnergyKind::jhat0(), chi) - 2.0) <= 1e-2);
  CHECK(std::abs(ev.energy(EnergyKind::jtilde_d(), chi) + 1.5) <= 1e-2);
  // mass(chi) = 1 exactly on this grid, so Jd(chi) = -1 exactly.
  CHECK(mass(chi) == 1.0);
  CHECK(ev.energy(EnergyKind::jd(), chi) == -1.0);
  // Jtilde at alpha near d: -(a+2)/(a(a+1)).
  const double jt = ev.energy(EnergyKind::jtilde(0.99), chi);
  CHECK(std::abs(jt + 2.99 / (0.99 * 1.99)) <= 2e-3 * std::abs(jt));
  // The tail part vanishes identically when diam(Omega) < 1.
  CHECK(ev.energy(EnergyKind::j1(0.5), chi) == 0.0);
  // h00 norm: ||chi|| + sqrt(2 * G1(0, chi)) = 1 + 2 in the continuum.
  CHECK(std::abs(ev.h00_norm(chi) - 3.0) <= 1e-2);
}

TEST_CASE("split identity: Jhat = G1 + J1") {
  auto dom1 = build_domain(1, {0, 0}, {1, 0}, 128, MaskSpec::full_box());
  EnergyEvaluator ev1(dom1);
  for (double a : {0.3, 0.7}) {
    GridField u = random_field(dom1, 17);
    const double lhs = ev1.energy(EnergyKind::jhat(a), u);
    const double rhs =
        ev1.energy(EnergyKind::g1(a), u) + ev1.energy(EnergyKind::j1(a), u);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs));
  }
  auto dom2 = build_domain(2, {0, 0}, {1, 1}, 12, MaskSpec::full_box());
  EnergyEvaluator ev2(dom2);
  GridField u2 = random_field(dom2, 19);
  const double lhs2 = ev2.energy(EnergyKind::jhat(0.6), u2);
  const double rhs2 =
      ev2.energy(EnergyKind::g1(0.6), u2) + ev2.energy(EnergyKind::j1(0.6), u2);
  CHECK(std::abs(lhs2 - rhs2) <= 1e-6 * std::abs(lhs2));
}

TEST_CASE("negativity of the plain interaction energy") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  for (unsigned seed = 1; seed <= 20; ++seed) {
    GridField u = random_field(dom, seed);
    CHECK(ev.energy(EnergyKind::j(0.5), u) <= 1e-8);
  }
  auto dom2 = build_domain(2, {0, 0}, {1, 1}, 8, MaskSpec::full_box());
  EnergyEvaluator ev2(dom2);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    GridField u = random_field(dom2, seed);
    CHECK(ev2.energy(EnergyKind::j(1.1), u) <= 1e-8);
  }
}

TEST_CASE("quadratic scaling") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 96, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField u = random_field(dom, 31);
  GridField u2 = u, u3 = u;
  scale(2.0, u2);
  scale(3.0, u3);
  for (EnergyKind kind :
       {EnergyKind::j(0.4), EnergyKind::jhat(0.4), EnergyKind::g1(0.4),
        EnergyKind::j1(0.4), EnergyKind::jhat0(), EnergyKind::jd(),
        EnergyKind::jtilde(0.4), EnergyKind::jtilde_d()}) {
    const double e = ev.energy(kind, u);
    // Doubling is exact in floating point; factor 3 within rounding.
    CHECK(ev.energy(kind, u2) == 4.0 * e);
    CHECK(std::abs(ev.energy(kind, u3) - 9.0 * e) <=
          1e-12 * std::max(std::abs(9.0 * e), 1e-12));
  }
}

TEST_CASE("interaction energy is bounded and Lipschitz on L2 balls") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  const double alpha = 0.5;
  // |J(u)| <= (d omega_d / alpha) diam^alpha ||u||^2 (= 4 ||u||^2 here).
  const double C = 2.0 / alpha * std::pow(dom->diameter, alpha);
  for (unsigned seed = 1; seed <= 10; ++seed) {
    GridField u = random_field(dom, seed);
    GridField v = random_field(dom, seed + 100);
    const double ju = ev.energy(EnergyKind::j(alpha), u);
    const double jv = ev.energy(EnergyKind::j(alpha), v);
    CHECK(std::abs(ju) <= C * inner_product(u, u) * (1 + 1e-12));
    GridField diff = u;
    axpy(-1.0, v, diff);
    const double lip =
        C * (l2_norm(u) + l2_norm(v)) * l2_norm(diff) * (1 + 1e-12);
    CHECK(std::abs(ju - jv) <= lip);
  }
}

TEST_CASE("certificates: lambda-positivity and midpoint lambda-convexity") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 48, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  std::vector<EnergyKind> kinds;
  for (int s : {+1, -1}) {
    kinds.push_back(EnergyKind::j(0.5, s));
    kinds.push_back(EnergyKind::jhat(0.5, s));
    kinds.push_back(EnergyKind::g1(0.5, s));
    kinds.push_back(EnergyKind::j1(0.5, s));
    kinds.push_back(EnergyKind::jtilde(0.5, s));
    kinds.push_back(EnergyKind::jhat0(s));
    kinds.push_back(EnergyKind::jd(s));
    kinds.push_back(EnergyKind::jtilde_d(s));
  }
  for (const EnergyKind& kind : kinds) {
    const ConvexityCertificate cert = ev.certify(kind);
    CHECK(cert.lambda > 0.0);
    for (unsigned seed = 1; seed <= 100; ++seed) {
      GridField u = random_field(dom, seed);
      const double nu2 = inner_product(u, u);
      const double e = ev.energy(kind, u);
      // lambda-positivity: E(u) + (lambda/2)||u||^2 >= 0.
      CHECK(e + 0.5 * cert.lambda * nu2 >= -1e-10 * std::max(nu2, 1.0));
      // Midpoint lambda-convexity against a second sample.
      GridField v = random_field(dom, seed + 1000);
      GridField mid = u, diff = u;
      axpy(1.0, v, mid);
      scale(0.5, mid);
      axpy(-1.0, v, diff);
      const double gap = 0.5 * ev.energy(kind, u) + 0.5 * ev.energy(kind, v) -
                         ev.energy(kind, mid) +
                         cert.lambda / 8.0 * inner_product(diff, diff);
      CHECK(gap >= -1e-10 * std::max(inner_product(diff, diff), 1.0));
    }
  }
}

TEST_CASE("pointwise limits of the energy families") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 256, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField u = make_field(dom, [](double x, double) {
    return std::exp(-16.0 * (x - 0.5) * (x - 0.5));
  });

  // alpha -> 0: -alpha J(alpha, u) -> d omega_d ||u||^2.
  const double lim0 = 2.0 * inner_product(u, u);
  double prev = 1e300;
  for (double a : {0.4, 0.1, 0.01}) {
    const double err = std::abs(-a * ev.energy(EnergyKind::j(a), u) - lim0);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 0.02 * lim0);

  // alpha -> d: J -> Jd and Jtilde -> JtildeD.
  const double jd = ev.energy(EnergyKind::jd(), u);
  const double jtd = ev.energy(EnergyKind::jtilde_d(), u);
  CHECK(std::abs(ev.energy(EnergyKind::j(0.99), u) - jd) <
        std::abs(ev.energy(EnergyKind::j(0.9), u) - jd));
  CHECK(std::abs(ev.energy(EnergyKind::jtilde(0.99), u) - jtd) <
        std::abs(ev.energy(EnergyKind::jtilde(0.9), u) - jtd));
  CHECK(std::abs(ev.energy(EnergyKind::j(0.99), u) - jd) <= 0.05 * std::abs(jd));
}

TEST_CASE("certificate closed-form examples") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  // diam((0,1)) = 1 exactly on every grid of this box.
  CHECK(dom->diameter == 1.0);
  CHECK(ev.certify(EnergyKind::j(0.5)).lambda ==
        doctest::Approx(8.08).epsilon(1e-12));
  CHECK(ev.certify(EnergyKind::jhat(0.5)).lambda ==
        doctest::Approx(2.02).epsilon(1e-12));
  CHECK(ev.certify(EnergyKind::jtilde_d()).lambda ==
        doctest::Approx(4.04).epsilon(1e-12));
  CHECK(ev.certify(EnergyKind::g1(0.5)).kind == CertKind::Positivity);
  CHECK(ev.certify(EnergyKind::jhat0()).kind == CertKind::Positivity);
  CHECK(ev.certify(EnergyKind::g1(0.5, -1)).kind == CertKind::Convexity);
}

TEST_CASE("concentration sequence: exact norms and growing G1") {
  // Per-n domain: box (-2/n, 2/n), 8 cells, h = 1/(2n) < 1/n.
  const int n = 4;
  auto dom = build_domain(1, {-0.5, 0}, {0.5, 0}, 8, MaskSpec::full_box());
  GridField v = counterexample_sequence(n, dom);
  // Four cell centers lie in (-1/4, 1/4): value n^{1/2}/log^{1/4} n there.
  int nonzero = 0;
  for (int k = 0; k < v.size(); ++k) {
    if (v[k] != 0.0) ++nonzero;
  }
  CHECK(nonzero == 4);
  const double expected_norm2 = 2.0 / std::sqrt(std::log(4.0));
  CHECK(inner_product(v, v) ==
        doctest::Approx(expected_norm2).epsilon(1e-13));

  // G1 grows as alpha decreases (for fixed v): the renormalized energy is
  // unbounded along the diagonal n -> infinity, alpha -> 0.
  EnergyEvaluator ev(dom);
  const double g_small = ev.energy(EnergyKind::g1(0.05), v);
  const double g_large = ev.energy(EnergyKind::g1(0.4), v);
  CHECK(g_small > g_large);
  CHECK(g_large > 0.0);
}

TEST_CASE("concentration sequence validation") {
  auto dom = build_domain(1, {-0.5, 0}, {0.5, 0}, 8, MaskSpec::full_box());
  CHECK_THROWS_AS(counterexample_sequence(1, dom), std::invalid_argument);
  // h = 1/8 is not < 1/n for n = 16.
  CHECK_THROWS_AS(counterexample_sequence(16, dom), std::invalid_argument);
  // 0 outside the box.
  auto shifted = build_domain(1, {1, 0}, {2, 0}, 8, MaskSpec::full_box());
  CHECK_THROWS_AS(counterexample_sequence(4, shifted), std::invalid_argument);
}

TEST_CASE("divergence marker instead of overflow") {
  auto dom = build_domain(1, {-0.5, 0}, {0.5, 0}, 8, MaskSpec::full_box());
  GridField huge = indicator_field(dom);
  scale(1e200, huge);
  EnergyEvaluator ev(dom);
  const double g = ev.energy(EnergyKind::g1(0.1), huge);
  CHECK(std::isinf(g));
  CHECK(g > 0.0);
  // Jhat0 = G1(0) + J1(0) propagates the marker.
  CHECK(std::isinf(ev.energy(EnergyKind::jhat0(), huge)));
  CHECK(std::isinf(ev.h00_norm(huge)));
}

TEST_CASE("evaluator validation") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 16, MaskSpec::full_box());
  EnergyEvaluator ev(dom);
  GridField chi = indicator_field(dom);
  CHECK_THROWS_AS(ev.energy(EnergyKind::j(0.0), chi), std::invalid_argument);
  CHECK_THROWS_AS(ev.energy(EnergyKind::j(1.0), chi), std::invalid_argument);
  CHECK_THROWS_AS(ev.energy(EnergyKind::jtilde(1.0), chi),
                  std::invalid_argument);
  // G1 admits alpha = 0 but not the plain kinds.
  CHECK_NOTHROW(ev.energy(EnergyKind::g1(0.0), chi));
  auto other = build_domain(1, {0, 0}, {1, 0}, 8, MaskSpec::full_box());
  GridField w = indicator_field(other);
  CHECK_THROWS_AS(ev.energy(EnergyKind::j(0.5), w), std::invalid_argument);
}

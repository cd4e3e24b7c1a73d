#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riesz/flows.hpp"

using namespace riesz;

namespace {

GridField random_field(std::shared_ptr<const Domain> dom, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridField u = zero_field(dom);
  for (double& x : u.values) x = dist(rng);
  return u;
}

double state_gap(const GridField& a, const GridField& b) {
  GridField d = a;
  axpy(-1.0, b, d);
  return l2_norm(d);
}

} // namespace

TEST_CASE("zero initial datum stays zero") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  FlowSolver fs(dom);
  FlowProblem p{OperatorKind::grad_jhat(0.5), zero_field(dom), 0.05, 1e-2,
                Scheme::MinimizingMovements, 1};
  FlowTrajectory traj = fs.solve(p);
  REQUIRE(traj.states.size() == traj.times.size());
  for (const GridField& s : traj.states) {
    CHECK(l2_norm(s) == 0.0);
  }
  for (double e : traj.energies) CHECK(e == 0.0);
}

TEST_CASE("minimizing-movements step has the known closed form for Jd") {
  // E = Jd: grad E(v) = -2 mass(v) chi, so the implicit step solves
  // v = u + 2 tau a0/(1 - 2 tau |Omega|) chi exactly.
  auto dom = build_domain(1, {0, 0}, {1, 0}, 128, MaskSpec::full_box());
  GridField u0 = make_field(dom, [](double x, double) {
    return std::exp(-8.0 * (x - 0.4) * (x - 0.4));
  });
  const double tau = 0.1;
  FlowSolver fs(dom);
  FlowProblem p{OperatorKind::grad_jd(+1), u0, 0.5, tau,
                Scheme::MinimizingMovements, 1};
  GridField v = fs.step(p, u0);
  const double a0 = mass(u0);
  const double shift = 2.0 * tau * a0 / (1.0 - 2.0 * tau * dom->volume);
  GridField want = u0;
  for (double& x : want.values) x += shift;
  CHECK(state_gap(v, want) <= 1e-9);
}

TEST_CASE("explicit Euler and minimizing movements converge at rate tau") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 128, MaskSpec::full_box());
  GridField u0 = indicator_field(dom);
  const OperatorKind kind = OperatorKind::grad_scaled_j(0.3);
  auto gap_at = [&](double tau) {
    FlowSolver fs(dom);
    FlowProblem pe{kind, u0, 0.2, tau, Scheme::ExplicitEuler, 1000000};
    FlowProblem pm{kind, u0, 0.2, tau, Scheme::MinimizingMovements, 1000000};
    FlowTrajectory a = fs.solve(pe);
    FlowTrajectory b = fs.solve(pm);
    return state_gap(a.states.back(), b.states.back());
  };
  const double g1 = gap_at(4e-3);
  const double g2 = gap_at(2e-3);
  CHECK(g1 > 0.0);
  const double ratio = g1 / g2;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
}

TEST_CASE("the flow map of a quadratic energy is linear") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  GridField a = random_field(dom, 1), b = random_field(dom, 2);
  GridField sum = a;
  axpy(1.0, b, sum);
  const OperatorKind kind = OperatorKind::grad_jhat(0.3);
  auto final_state = [&](const GridField& u0) {
    FlowSolver fs(dom);
    FlowProblem p{kind, u0, 0.05, 1e-2, Scheme::MinimizingMovements, 1000000};
    return fs.solve(p).states.back();
  };
  GridField fa = final_state(a), fb = final_state(b), fs2 = final_state(sum);
  axpy(1.0, fb, fa);  // fa := S(a) + S(b)
  CHECK(state_gap(fs2, fa) <= 1e-8);
}

TEST_CASE("minimizing movements dissipates the driving energy") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  FlowSolver fs(dom);
  for (OperatorKind kind :
       {OperatorKind::grad_jhat(0.4), OperatorKind::grad_scaled_j(0.4),
        OperatorKind::grad_jhat0(), OperatorKind::grad_j(0.5, +1),
        OperatorKind::grad_jtilde_d(-1)}) {
    GridField u0 = random_field(dom, 77);
    const double tau = std::min(1e-2, 0.5 / fs.driving_lambda(kind));
    FlowProblem p{kind, u0, 50 * tau, tau, Scheme::MinimizingMovements, 10};
    FlowTrajectory traj = fs.solve(p);
    CHECK(traj.max_scaled_increase <= 1e-12);
    for (std::size_t k = 0; k + 1 < traj.energies.size(); ++k) {
      CHECK(traj.energies[k + 1] <=
            traj.energies[k] + 1e-12 * std::abs(traj.energies[k]));
    }
  }
}

TEST_CASE("the scaled flow contracts the L2 norm") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  FlowSolver fs(dom);
  GridField u0 = indicator_field(dom);
  FlowProblem p{OperatorKind::grad_scaled_j(0.4), u0, 0.3, 1e-3,
                Scheme::MinimizingMovements, 1000000};
  FlowTrajectory traj = fs.solve(p);
  CHECK(l2_norm(traj.states.back()) < l2_norm(u0));
}

TEST_CASE("closed-form decay trajectory") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  GridField u0 = random_field(dom, 5);
  GridField d1 = closed_form_decay(u0, 0.25, 1);
  for (int k = 0; k < u0.size(); ++k) {
    CHECK(d1[k] == doctest::Approx(u0[k] * std::exp(-1.0)).epsilon(1e-14));
  }
  GridField d2 = closed_form_decay(u0, 1.0, 2);
  const double pi = 3.14159265358979323846;
  for (int k = 0; k < u0.size(); ++k) {
    CHECK(d2[k] == doctest::Approx(u0[k] * std::exp(-4.0 * pi)).epsilon(1e-12));
  }
}

TEST_CASE("closed-form averaged-growth trajectory") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  GridField chi = indicator_field(dom);
  GridField at0 = closed_form_average(chi, 0.0, +1);
  for (int k = 0; k < chi.size(); ++k) CHECK(at0[k] == chi[k]);
  // |Omega| = 1, a0 = 1, t = 1/2: u = chi * (1 + (e^{1} - 1)) = e chi.
  GridField at = closed_form_average(chi, 0.5, +1);
  for (int k = 0; k < chi.size(); ++k) {
    CHECK(at[k] == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  }
  // Mean-zero data are stationary.
  GridField mz = make_field(dom, [](double x, double) { return x - 0.5; });
  GridField mzt = closed_form_average(mz, 0.7, -1);
  for (int k = 0; k < mz.size(); ++k) {
    CHECK(std::abs(mzt[k] - mz[k]) <= 1e-14);
  }
}

TEST_CASE("trajectory recording grid and dissipation") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  FlowSolver fs(dom);
  GridField u0 = indicator_field(dom);
  FlowProblem p{OperatorKind::grad_jhat(0.5), u0, 1e-2, 1e-3,
                Scheme::MinimizingMovements, 3};
  FlowTrajectory traj = fs.solve(p);
  // 10 steps recorded every 3 steps plus the final one: t/tau = 0,3,6,9,10.
  REQUIRE(traj.times.size() == 5);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.times[1] == doctest::Approx(3e-3).epsilon(1e-12));
  CHECK(traj.times.back() == doctest::Approx(1e-2).epsilon(1e-12));
  CHECK(traj.states.size() == 5);
  CHECK(traj.energies.size() == 5);
  CHECK(traj.dissipation.size() == 5);
  CHECK(traj.dissipation[0] == 0.0);
  for (std::size_t k = 1; k < traj.dissipation.size(); ++k) {
    CHECK(traj.dissipation[k] > 0.0);
  }
}

TEST_CASE("compare_trajectories") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  FlowSolver fs(dom);
  GridField u0 = indicator_field(dom);
  FlowProblem p{OperatorKind::grad_jhat(0.5), u0, 0.02, 1e-3,
                Scheme::MinimizingMovements, 1};
  FlowTrajectory a = fs.solve(p);
  TrajectoryGap self = compare_trajectories(a, a);
  CHECK(self.sup_state_gap == 0.0);
  CHECK(self.max_energy_gap == 0.0);
  // Versus the closed-form decay path on the same grid: finite gap, and the
  // NaN energies of the closed form are skipped without poisoning the max.
  FlowTrajectory cf = closed_form_decay_trajectory(u0, a.times);
  TrajectoryGap g = compare_trajectories(a, cf);
  CHECK(g.sup_state_gap > 0.0);
  CHECK(std::isfinite(g.max_energy_gap));
  FlowProblem p2 = p;
  p2.tau = 2e-3;
  FlowTrajectory b = fs.solve(p2);
  CHECK_THROWS_AS(compare_trajectories(a, b), std::invalid_argument);
}

TEST_CASE("flow results do not depend on the OpenMP thread count") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 200, MaskSpec::full_box());
  GridField u0 = random_field(dom, 55);
  auto run = [&]() {
    FlowSolver fs(dom);
    FlowProblem p{OperatorKind::grad_jhat(0.3), u0, 0.02, 2e-3,
                  Scheme::MinimizingMovements, 1000000};
    return fs.solve(p).states.back();
  };
#ifdef _OPENMP
  omp_set_num_threads(1);
  GridField s1 = run();
  omp_set_num_threads(2);
  GridField s2 = run();
  omp_set_num_threads(4);
  GridField s4 = run();
  for (int k = 0; k < s1.size(); ++k) {
    CHECK(s1[k] == s2[k]);
    CHECK(s1[k] == s4[k]);
  }
#else
  GridField s1 = run(), s2 = run();
  for (int k = 0; k < s1.size(); ++k) CHECK(s1[k] == s2[k]);
#endif
}

TEST_CASE("flow validation") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 32, MaskSpec::full_box());
  FlowSolver fs(dom);
  GridField u0 = indicator_field(dom);

  FlowProblem p{OperatorKind::riesz_potential(0.5), u0, 0.1, 1e-2,
                Scheme::MinimizingMovements, 1};
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);  // not a gradient

  p.grad = OperatorKind::grad_jhat(0.5);
  p.tau = 0.0;
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);
  p.tau = 0.2;
  p.T = 0.1;
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);  // T < tau
  p.T = 10.0;
  p.tau = 0.9;  // tau * lambda >= 1 for Jhat's certified lambda (2.02)
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);
  p.tau = 0.9;
  p.scheme = Scheme::ExplicitEuler;  // far beyond the explicit step bound
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);
  p.scheme = Scheme::MinimizingMovements;
  p.tau = 1e-2;
  p.record_every = 0;
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);
  p.record_every = 1;
  auto other = build_domain(1, {0, 0}, {1, 0}, 16, MaskSpec::full_box());
  p.u0 = indicator_field(other);
  CHECK_THROWS_AS(fs.solve(p), std::invalid_argument);
}

TEST_CASE("driving lambda and energy value agree with the evaluator") {
  auto dom = build_domain(1, {0, 0}, {1, 0}, 64, MaskSpec::full_box());
  FlowSolver fs(dom);
  CHECK(dom->diameter == 1.0);
  // grad of -alpha J(alpha): scale alpha times lambda(J, -1) = 10.1.
  CHECK(fs.driving_lambda(OperatorKind::grad_scaled_j(0.4)) ==
        doctest::Approx(0.4 * 10.1).epsilon(1e-12));
  GridField u = random_field(dom, 9);
  EnergyEvaluator ev(dom);
  const double e = fs.driving_energy_value(OperatorKind::grad_scaled_j(0.4), u);
  CHECK(e == doctest::Approx(0.4 * ev.energy(EnergyKind::j(0.4, -1), u))
                 .epsilon(1e-13));
}

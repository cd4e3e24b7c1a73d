#include "riesz/flows.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "riesz/special.hpp"

namespace riesz {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

FlowSolver::FlowSolver(std::shared_ptr<const Domain> dom, double table_tol)
    : ops_(std::move(dom), table_tol) {}

double FlowSolver::driving_lambda(const OperatorKind& grad) {
  auto [base, sc] = driving_energy(grad);
  return std::abs(sc) * ops_.evaluator().certify(base).lambda;
}

double FlowSolver::driving_energy_value(const OperatorKind& grad,
                                        const GridField& u) {
  auto [base, sc] = driving_energy(grad);
  return sc * ops_.evaluator().energy(base, u);
}

void FlowSolver::validate(const FlowProblem& problem) {
  if (!is_flow_generator(problem.grad.tag)) {
    throw std::invalid_argument("flow: grad kind is not a flow generator");
  }
  if (!(problem.tau > 0.0)) throw std::invalid_argument("flow: tau > 0 required");
  if (!(problem.T >= problem.tau)) {
    throw std::invalid_argument("flow: T >= tau required");
  }
  if (problem.record_every < 1) {
    throw std::invalid_argument("flow: record_every >= 1 required");
  }
  if (!problem.u0.domain ||
      !same_domain(*problem.u0.domain, *ops_.domain())) {
    throw std::invalid_argument("flow: u0 domain mismatch");
  }
  if (problem.scheme == Scheme::MinimizingMovements) {
    const double lambda = driving_lambda(problem.grad);
    if (!(problem.tau * lambda < 1.0)) {
      throw std::invalid_argument(
          "flow: minimizing movements requires tau * lambda < 1");
    }
  } else {
    const double bound = ops_.norm_bound(problem.grad);
    if (!(problem.tau <= 1.0 / (2.0 * bound))) {
      throw std::invalid_argument(
          "flow: explicit Euler requires tau <= 1/(2 * operator norm bound)");
    }
  }
}

GridField FlowSolver::mm_step(const OperatorKind& grad, double tau,
                              const GridField& u) {
  // Solve (1/tau) (v - u) + grad(v) = 0, i.e. M v = u / tau with
  // M = (1/tau) Id + G, G the (symmetric) linear gradient map. M is positive
  // definite because tau * lambda < 1. Conjugate gradients, warm start at u.
  const double inv_tau = 1.0 / tau;
  auto apply_m = [&](const GridField& x) {
    GridField y = ops_.apply(grad, x);
    axpy(inv_tau, x, y);
    return y;
  };

  const double unorm = l2_norm(u);
  const double thresh = 1e-12 * unorm;  // residual target (tighter than needed)

  GridField x = u;
  GridField r = apply_m(x);
  scale(-1.0, r);
  axpy(inv_tau, u, r);  // r = u/tau - M x
  double rs = inner_product(r, r);
  if (std::sqrt(rs) <= thresh) return x;

  GridField p = r;
  const std::size_t max_iters = 10 * std::max<std::size_t>(1, u.values.size());
  for (std::size_t it = 0; it < max_iters; ++it) {
    GridField q = apply_m(p);
    const double pq = inner_product(p, q);
    if (!(pq > 0.0)) {
      throw std::runtime_error(
          "flow: CG curvature failure (is tau * lambda < 1?)");
    }
    const double a = rs / pq;
    axpy(a, p, x);
    axpy(-a, q, r);
    const double rs_new = inner_product(r, r);
    if (std::sqrt(rs_new) <= thresh) return x;
    const double beta = rs_new / rs;
    rs = rs_new;
    scale(beta, p);
    axpy(1.0, r, p);
  }
  throw std::runtime_error("flow: CG did not converge within 10 N iterations");
}

GridField FlowSolver::step(const FlowProblem& problem, const GridField& u) {
  validate(problem);
  if (!u.domain || !same_domain(*u.domain, *ops_.domain())) {
    throw std::invalid_argument("flow: state domain mismatch");
  }
  if (problem.scheme == Scheme::ExplicitEuler) {
    GridField g = ops_.apply(problem.grad, u);
    GridField v = u;
    axpy(-problem.tau, g, v);
    return v;
  }
  return mm_step(problem.grad, problem.tau, u);
}

FlowTrajectory FlowSolver::solve(const FlowProblem& problem) {
  validate(problem);

  const double tau = problem.tau;
  const long nsteps =
      static_cast<long>(std::ceil(problem.T / tau - 1e-12));

  FlowTrajectory traj;
  traj.max_energy_increase = -std::numeric_limits<double>::infinity();
  traj.max_scaled_increase = -std::numeric_limits<double>::infinity();

  GridField u = problem.u0;
  double e_prev = driving_energy_value(problem.grad, u);

  traj.times.push_back(0.0);
  traj.states.push_back(u);
  traj.energies.push_back(e_prev);
  traj.dissipation.push_back(0.0);

  for (long k = 1; k <= nsteps; ++k) {
    GridField next;
    if (problem.scheme == Scheme::ExplicitEuler) {
      GridField g = ops_.apply(problem.grad, u);
      next = u;
      axpy(-tau, g, next);
    } else {
      next = mm_step(problem.grad, tau, u);
    }

    const double e_next = driving_energy_value(problem.grad, next);
    const double unorm = l2_norm(u);
    const double increase = e_next - e_prev;
    traj.max_energy_increase = std::max(traj.max_energy_increase, increase);
    traj.max_scaled_increase = std::max(
        traj.max_scaled_increase, increase / std::max(unorm * unorm, 1e-300));

    GridField diff = next;
    axpy(-1.0, u, diff);
    const double diss = inner_product(diff, diff) / tau;

    u = std::move(next);
    e_prev = e_next;

    if (k % problem.record_every == 0 || k == nsteps) {
      traj.times.push_back(k * tau);
      traj.states.push_back(u);
      traj.energies.push_back(e_next);
      traj.dissipation.push_back(diss);
    }
  }
  return traj;
}

GridField closed_form_decay(const GridField& u0, double t, int d) {
  if (!(t >= 0.0)) throw std::invalid_argument("closed_form_decay: t >= 0");
  if (d != 1 && d != 2) throw std::invalid_argument("closed_form_decay: d in {1,2}");
  GridField v = u0;
  scale(std::exp(-2.0 * d * ball_volume(d) * t), v);
  return v;
}

GridField closed_form_average(const GridField& u0, double t, int sign) {
  if (!(t >= 0.0)) throw std::invalid_argument("closed_form_average: t >= 0");
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("closed_form_average: sign must be +1 or -1");
  }
  const double vol = u0.domain->volume;
  const double a0 = mass(u0);
  const double shift = a0 / vol * std::expm1(sign * 2.0 * vol * t);
  GridField v = u0;
  for (double& x : v.values) x += shift;
  return v;
}

namespace {

FlowTrajectory sample_closed_form(const GridField& u0,
                                  const std::vector<double>& times,
                                  const std::function<GridField(double)>& f) {
  if (times.empty() || times[0] != 0.0) {
    throw std::invalid_argument("closed-form trajectory: times must start at 0");
  }
  FlowTrajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  for (double t : times) {
    traj.states.push_back(f(t));
    traj.energies.push_back(kNaN);
    traj.dissipation.push_back(0.0);
  }
  traj.states[0] = u0;
  return traj;
}

} // namespace

FlowTrajectory closed_form_decay_trajectory(const GridField& u0,
                                            const std::vector<double>& times) {
  const int d = u0.domain->dim;
  return sample_closed_form(
      u0, times, [&](double t) { return closed_form_decay(u0, t, d); });
}

FlowTrajectory closed_form_average_trajectory(const GridField& u0,
                                              const std::vector<double>& times,
                                              int sign) {
  return sample_closed_form(
      u0, times, [&](double t) { return closed_form_average(u0, t, sign); });
}

TrajectoryGap compare_trajectories(const FlowTrajectory& a,
                                   const FlowTrajectory& b) {
  if (a.times.size() != b.times.size()) {
    throw std::invalid_argument("compare_trajectories: time grids differ");
  }
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (a.times[i] != b.times[i]) {
      throw std::invalid_argument("compare_trajectories: time grids differ");
    }
  }
  TrajectoryGap gap;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    GridField diff = a.states[i];
    axpy(-1.0, b.states[i], diff);
    gap.sup_state_gap = std::max(gap.sup_state_gap, l2_norm(diff));
    const double ea = a.energies[i], eb = b.energies[i];
    if (std::isfinite(ea) && std::isfinite(eb)) {
      gap.max_energy_gap = std::max(gap.max_energy_gap, std::abs(ea - eb));
    }
  }
  return gap;
}

} // namespace riesz

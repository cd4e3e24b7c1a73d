#pragma once

#include <memory>
#include <vector>

#include "riesz/grid.hpp"
#include "riesz/operators.hpp"

namespace riesz {

enum class Scheme { ExplicitEuler, MinimizingMovements };

struct FlowProblem {
  OperatorKind grad;  // one of the Grad* kinds
  GridField u0;
  double T = 0.5;
  double tau = 1e-3;
  Scheme scheme = Scheme::MinimizingMovements;
  int record_every = 1;
};

struct FlowTrajectory {
  std::vector<double> times;        // recorded times, times[0] = 0
  std::vector<GridField> states;    // states[0] = u0
  std::vector<double> energies;     // driving energy at recorded times
  std::vector<double> dissipation;  // ||u_k - u_{k-1}||^2 / tau for the step
                                    //   ending at each record (0 at t = 0)

  // Diagnostics over ALL steps (not just recorded ones):
  double max_energy_increase = 0.0;  // max of E_{k+1} - E_k (<= 0 when monotone)
  double max_scaled_increase = 0.0;  // max of (E_{k+1}-E_k)/max(||u_k||^2, tiny)
};

// Per-domain flow integrator; wraps an OperatorApplier. Not thread-safe:
// one instance per concurrent flow.
class FlowSolver {
 public:
  explicit FlowSolver(std::shared_ptr<const Domain> dom, double table_tol = 1e-10);

  OperatorApplier& ops() { return ops_; }

  // One step of the scheme. Validates the problem invariants:
  //   minimizing movements: tau * lambda < 1 for the certified lambda of the
  //     driving energy (the proximal problem is then strictly convex);
  //   explicit Euler: tau <= 1 / (2 * norm_bound(grad)).
  GridField step(const FlowProblem& problem, const GridField& u);

  // Integrate to T (ceil(T/tau) steps), recording every record_every steps
  // and always recording the final state. Driving energy is evaluated at
  // every step for the monotonicity diagnostics.
  FlowTrajectory solve(const FlowProblem& problem);

  // Certified lambda of the problem's driving energy (|scale|-weighted).
  double driving_lambda(const OperatorKind& grad);

  // Driving energy value of the problem at state u.
  double driving_energy_value(const OperatorKind& grad, const GridField& u);

 private:
  void validate(const FlowProblem& problem);
  GridField mm_step(const OperatorKind& grad, double tau, const GridField& u);
  OperatorApplier ops_;
};

// u(t) = e^{-2 d omega_d t} u0, the alpha->0 limit dynamics of the scaled flow.
GridField closed_form_decay(const GridField& u0, double t, int d);

// u(t) = u0 + (a0/vol)(e^{sign 2 vol t} - 1) chi_Omega with a0 = integral of
// u0: the alpha->d limit dynamics of the plain flow.
GridField closed_form_average(const GridField& u0, double t, int sign);

// Closed-form trajectories sampled on a given time grid (energies are NaN).
FlowTrajectory closed_form_decay_trajectory(const GridField& u0,
                                            const std::vector<double>& times);
FlowTrajectory closed_form_average_trajectory(const GridField& u0,
                                              const std::vector<double>& times,
                                              int sign);

struct TrajectoryGap {
  double sup_state_gap = 0.0;   // max over times of ||a(t) - b(t)||_{L2}
  double max_energy_gap = 0.0;  // max over times of |Ea - Eb|, NaN pairs skipped
};

// Requires identical time grids.
TrajectoryGap compare_trajectories(const FlowTrajectory& a,
                                   const FlowTrajectory& b);

} // namespace riesz

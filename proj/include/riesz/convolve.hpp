#pragma once

#include <memory>

#include "riesz/grid.hpp"
#include "riesz/kernels.hpp"

namespace riesz {

enum class ConvMethod { Auto, Direct, Fast };

struct FastPlanImpl;  // opaque: hides the FFT backend from this header

// A reusable plan for computing v_i = sum_j u_j w_{i-j} h^d over the masked
// cells of a fixed domain with a fixed weight table.
struct ConvolutionPlan {
  std::shared_ptr<const Domain> domain;
  KernelTable table;
  ConvMethod method = ConvMethod::Auto;   // resolved to Direct or Fast
  std::shared_ptr<FastPlanImpl> fast;     // set iff method == Fast

  ConvolutionPlan() = default;
};

// Build a plan. Auto picks Direct for small grids (max per-axis n <= 128)
// and the padded-FFT path otherwise. The table must live on `dom`.
ConvolutionPlan make_plan(std::shared_ptr<const Domain> dom, KernelTable table,
                          ConvMethod method = ConvMethod::Auto);

// Apply the plan to a field on the same domain.
GridField convolve(const ConvolutionPlan& plan, const GridField& u);

// Direct-summation reference implementations (serial and OpenMP twin).
// Both produce bit-identical results; the OpenMP version parallelizes over
// output cells while keeping each inner accumulation in a fixed serial order.
GridField convolve_direct_serial(const KernelTable& table, const GridField& u);
GridField convolve_direct_openmp(const KernelTable& table, const GridField& u);

// Upper bound on the operator norm of u -> u * W h^d on l2(masked cells):
// sum over table offsets of |w| * h^d (Young's inequality / Schur test).
double operator_norm_bound(const KernelTable& table);

} // namespace riesz

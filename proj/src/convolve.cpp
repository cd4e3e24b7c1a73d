#include "riesz/convolve.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "riesz/special.hpp"

namespace riesz {

namespace {

// FFTW's planner (creation/destruction) is not thread-safe; executing plans
// through the new-array interface is. One global mutex serializes planning.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int next_pow2(int x) {
  int p = 1;
  while (p < x) p *= 2;
  return p;
}

} // namespace

struct FastPlanImpl {
  int p0 = 1, p1 = 1;           // padded extents (p1 = 1 in d = 1)
  std::size_t npad = 1;
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~FastPlanImpl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

std::shared_ptr<FastPlanImpl> build_fast(const Domain& dom,
                                         const KernelTable& table) {
  auto impl = std::make_shared<FastPlanImpl>();
  impl->p0 = next_pow2(2 * dom.n[0] - 1);
  impl->p1 = dom.dim == 2 ? next_pow2(2 * dom.n[1] - 1) : 1;
  impl->npad = static_cast<std::size_t>(impl->p0) * impl->p1;

  std::vector<std::complex<double>> in(impl->npad), out(impl->npad);
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    if (dom.dim == 1) {
      impl->forward = fftw_plan_dft_1d(impl->p0, as_fftw(in.data()),
                                       as_fftw(out.data()), FFTW_FORWARD, flags);
      impl->backward = fftw_plan_dft_1d(impl->p0, as_fftw(in.data()),
                                        as_fftw(out.data()), FFTW_BACKWARD, flags);
    } else {
      impl->forward = fftw_plan_dft_2d(impl->p0, impl->p1, as_fftw(in.data()),
                                       as_fftw(out.data()), FFTW_FORWARD, flags);
      impl->backward = fftw_plan_dft_2d(impl->p0, impl->p1, as_fftw(in.data()),
                                        as_fftw(out.data()), FFTW_BACKWARD, flags);
    }
  }
  if (!impl->forward || !impl->backward) {
    throw std::runtime_error("convolve: FFT planning failed");
  }

  // Scatter the weight table onto the padded torus (negative offsets wrap)
  // and take its spectrum once.
  std::vector<std::complex<double>> ker(impl->npad, 0.0);
  const int r0 = table.reach[0], r1 = table.reach[1];
  for (int ox = -r0; ox <= r0; ++ox) {
    const int ix = ox >= 0 ? ox : ox + impl->p0;
    for (int oy = -r1; oy <= r1; ++oy) {
      const int iy = oy >= 0 ? oy : oy + impl->p1;
      ker[static_cast<std::size_t>(ix) * impl->p1 + iy] = table.at(ox, oy);
    }
  }
  impl->kernel_hat.assign(impl->npad, 0.0);
  fftw_execute_dft(impl->forward, as_fftw(ker.data()),
                   as_fftw(impl->kernel_hat.data()));
  return impl;
}

void run_direct(const KernelTable& table, const GridField& u, GridField& v,
                bool parallel) {
  const Domain& dom = *u.domain;
  const auto& cells = dom.cells;
  const std::size_t m = cells.size();
  const double hvol = dom.cell_volume;
  const std::int64_t n1 = dom.dim == 2 ? dom.n[1] : 1;

#pragma omp parallel for schedule(static) if (parallel)
  for (std::size_t a = 0; a < m; ++a) {
    const int a0 = static_cast<int>(cells[a] / n1);
    const int a1 = static_cast<int>(cells[a] % n1);
    double acc = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const int b0 = static_cast<int>(cells[b] / n1);
      const int b1 = static_cast<int>(cells[b] % n1);
      acc += u.values[b] * table.at(a0 - b0, a1 - b1);
    }
    v.values[a] = acc * hvol;
  }
}

} // namespace

ConvolutionPlan make_plan(std::shared_ptr<const Domain> dom, KernelTable table,
                          ConvMethod method) {
  if (!dom) throw std::invalid_argument("make_plan: null domain");
  if (!table.domain || !same_domain(*table.domain, *dom)) {
    throw std::invalid_argument("make_plan: table was built on a different domain");
  }
  ConvolutionPlan plan;
  plan.domain = dom;
  plan.table = std::move(table);

  if (method == ConvMethod::Auto) {
    const int nmax = dom->dim == 2 ? std::max(dom->n[0], dom->n[1]) : dom->n[0];
    method = nmax <= 128 ? ConvMethod::Direct : ConvMethod::Fast;
  }
  plan.method = method;
  if (method == ConvMethod::Fast) {
    plan.fast = build_fast(*dom, plan.table);
  }
  return plan;
}

GridField convolve(const ConvolutionPlan& plan, const GridField& u) {
  if (!u.domain || !plan.domain || !same_domain(*u.domain, *plan.domain)) {
    throw std::invalid_argument("convolve: field domain does not match plan");
  }
  GridField v = zero_field(u.domain);

  if (plan.method == ConvMethod::Direct) {
    run_direct(plan.table, u, v, true);
    return v;
  }

  const FastPlanImpl& f = *plan.fast;
  const Domain& dom = *u.domain;
  const std::int64_t n1 = dom.dim == 2 ? dom.n[1] : 1;

  std::vector<std::complex<double>> a(f.npad, 0.0), b(f.npad, 0.0);
  for (std::size_t j = 0; j < dom.cells.size(); ++j) {
    const int j0 = static_cast<int>(dom.cells[j] / n1);
    const int j1 = static_cast<int>(dom.cells[j] % n1);
    a[static_cast<std::size_t>(j0) * f.p1 + j1] = u.values[j];
  }
  fftw_execute_dft(f.forward, as_fftw(a.data()), as_fftw(b.data()));
  for (std::size_t k = 0; k < f.npad; ++k) b[k] *= f.kernel_hat[k];
  fftw_execute_dft(f.backward, as_fftw(b.data()), as_fftw(a.data()));

  const double scale = dom.cell_volume / static_cast<double>(f.npad);
  for (std::size_t i = 0; i < dom.cells.size(); ++i) {
    const int i0 = static_cast<int>(dom.cells[i] / n1);
    const int i1 = static_cast<int>(dom.cells[i] % n1);
    v.values[i] = a[static_cast<std::size_t>(i0) * f.p1 + i1].real() * scale;
  }
  return v;
}

GridField convolve_direct_serial(const KernelTable& table, const GridField& u) {
  if (!u.domain || !table.domain || !same_domain(*u.domain, *table.domain)) {
    throw std::invalid_argument("convolve_direct: field/table domain mismatch");
  }
  GridField v = zero_field(u.domain);
  run_direct(table, u, v, false);
  return v;
}

GridField convolve_direct_openmp(const KernelTable& table, const GridField& u) {
  if (!u.domain || !table.domain || !same_domain(*u.domain, *table.domain)) {
    throw std::invalid_argument("convolve_direct: field/table domain mismatch");
  }
  GridField v = zero_field(u.domain);
  run_direct(table, u, v, true);
  return v;
}

double operator_norm_bound(const KernelTable& table) {
  std::vector<double> mags(table.weights.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(table.weights[i]);
  return pairwise_sum(mags) * table.domain->cell_volume;
}

} // namespace riesz

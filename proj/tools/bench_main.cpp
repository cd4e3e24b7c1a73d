#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "riesz/convolve.hpp"
#include "riesz/functionals.hpp"

namespace {

using riesz::GridField;

double time_once(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

double median_ms(int reps, const std::function<void()>& body) {
  std::vector<double> t(reps);
  for (int r = 0; r < reps; ++r) t[r] = time_once(body);
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

GridField random_field(std::shared_ptr<const riesz::Domain> dom,
                       unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  GridField u = riesz::zero_field(dom);
  for (double& x : u.values) x = dist(rng);
  return u;
}

void bench_convolution(int dim, int n, int reps) {
  auto dom = riesz::build_domain(dim, {0.0, 0.0}, {1.0, 1.0}, n,
                                 riesz::MaskSpec::full_box());
  const riesz::KernelTable table =
      riesz::build_table(riesz::KernelSpec::riesz(0.5, dim), dom, 1e-10);
  const GridField u = random_field(dom, 7u);

  volatile double sink = 0.0;
  const double t_serial = median_ms(reps, [&] {
    sink = riesz::convolve_direct_serial(table, u).values[0];
  });
  const double t_omp = median_ms(reps, [&] {
    sink = riesz::convolve_direct_openmp(table, u).values[0];
  });
  const auto plan = riesz::make_plan(dom, table, riesz::ConvMethod::Fast);
  const double t_fft =
      median_ms(reps, [&] { sink = riesz::convolve(plan, u).values[0]; });
  (void)sink;

  std::printf("convolve d=%d n=%-6d serial %10.3f ms | openmp %10.3f ms "
              "(x%.2f) | fft %10.3f ms (x%.1f)\n",
              dim, n, t_serial, t_omp, t_serial / t_omp, t_fft,
              t_serial / t_fft);
}

void bench_g1(int dim, int n, int reps) {
  auto dom = riesz::build_domain(dim, {0.0, 0.0}, {1.0, 1.0}, n,
                                 riesz::MaskSpec::full_box());
  const GridField u = random_field(dom, 11u);
  riesz::EnergyEvaluator ev(dom);
  volatile double sink = 0.0;
  ev.energy(riesz::EnergyKind::g1(0.5), u);  // warm up the kernel table
  const double t =
      median_ms(reps, [&] { sink = ev.energy(riesz::EnergyKind::g1(0.5), u); });
  (void)sink;
  std::printf("g1 pair-sum d=%d n=%-6d %35.3f ms\n", dim, n, t);
}

} // namespace

int main(int argc, char** argv) {
  int reps = 5;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--reps" && i + 1 < argc) reps = std::atoi(argv[++i]);
  }
#ifdef _OPENMP
  std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
  std::printf("openmp: not enabled\n");
#endif
  std::printf("medians over %d repetitions\n\n", reps);
  for (int n : {256, 512, 1024, 2048}) bench_convolution(1, n, reps);
  for (int n : {32, 64, 96}) bench_convolution(2, n, reps);
  std::printf("\n");
  bench_g1(1, 1024, reps);
  bench_g1(2, 48, reps);
  return 0;
}

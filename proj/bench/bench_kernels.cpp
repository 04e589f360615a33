// Timings for the data-parallel kernels: serial reference vs OpenMP.
#include <chrono>
#include <cstdio>
#include <vector>

#include "ckis/compression.hpp"
#include "ckis/embedding.hpp"
#include "ckis/kernel.hpp"
#include "ckis/rng.hpp"

using namespace ckis;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Embedding random_embedding(int m, int p, double h, Rng& rng) {
  Kernel k(h, p);
  PointMatrix pts(p, m);
  Eigen::VectorXd g(m);
  for (int i = 0; i < m; ++i) {
    for (int d = 0; d < p; ++d) pts(d, i) = rng.uniform(-3.0, 3.0);
    g(i) = rng.uniform(0.1, 2.0);
  }
  return Embedding(std::move(pts), std::move(g), k);
}

template <typename F>
double best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  Rng rng(12345);
  std::printf("%-28s %10s %10s %8s\n", "kernel", "serial ms", "openmp ms", "speedup");

  for (int m : {128, 256, 512}) {
    Embedding e = random_embedding(m, 1, 0.05, rng);
    volatile double sink = 0.0;
    const double ts = best_of(5, [&] { sink = sink + serial::gram(e.kernel, e.points)(0, 0); });
    const double tp = best_of(5, [&] { sink = sink + gram(e.kernel, e.points, Exec::Parallel)(0, 0); });
    std::printf("%-22s m=%-4d %10.3f %10.3f %8.2fx\n", "gram", m, ts, tp, ts / tp);
  }

  for (int m : {128, 256, 512}) {
    Embedding e = random_embedding(m, 1, 0.05, rng);
    const GramMatrix k_tt = gram(e.kernel, e.points);
    const Eigen::VectorXd b = k_tt * e.coefficients;
    const double c = e.coefficients.dot(b);
    std::vector<int> kept(m);
    for (int i = 0; i < m; ++i) kept[i] = i;
    Eigen::VectorXd gs, gp;
    const double ts =
        best_of(5, [&] { detail::candidate_errors(k_tt, b, c, kept, gs, Exec::Serial); });
    const double tp =
        best_of(5, [&] { detail::candidate_errors(k_tt, b, c, kept, gp, Exec::Parallel); });
    std::printf("%-22s m=%-4d %10.3f %10.3f %8.2fx\n", "candidate_sweep", m, ts, tp, ts / tp);
    if (gs != gp) std::printf("  WARNING: serial/parallel sweep results differ\n");
  }

  for (int m : {128, 256, 512}) {
    Embedding e = random_embedding(m, 1, 0.05, rng);
    const double eps = 0.25;
    const double ts = best_of(3, [&] { mmd_omp(e, eps, Exec::Serial); });
    const double tp = best_of(3, [&] { mmd_omp(e, eps, Exec::Parallel); });
    std::printf("%-22s m=%-4d %10.3f %10.3f %8.2fx\n", "mmd_omp", m, ts, tp, ts / tp);
  }
  return 0;
}

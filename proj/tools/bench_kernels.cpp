// Times the serial reference kernels against the OpenMP front-ends and
// checks that both produce bit-identical results at every size.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <vector>

#include "sdsp/kernels.hpp"
#include "sdsp/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace sdsp;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

template <class F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

std::vector<double> random_vec(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.normal();
  return v;
}

void report(const char* name, double serial_ms, double parallel_ms,
            bool identical) {
  std::printf("%-28s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              identical ? "bitwise-equal" : "MISMATCH");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP with %d threads\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel mode falls back to serial\n\n");
#endif
  Rng rng(99);

  for (const std::size_t n : {128u, 256u, 512u}) {
    const auto a = random_vec(n * n, rng);
    const auto b = random_vec(n * n, rng);
    std::vector<double> c_serial(n * n), c_parallel(n * n);
    const double t_serial = time_best_of(3, [&] {
      kernels::serial::matmul(a.data(), b.data(), c_serial.data(), n, n, n);
    });
    kernels::set_mode(kernels::Mode::Parallel);
    const double t_parallel = time_best_of(3, [&] {
      kernels::matmul(a.data(), b.data(), c_parallel.data(), n, n, n);
    });
    char name[64];
    std::snprintf(name, sizeof name, "matmul %zux%zu", n, n);
    report(name, t_serial, t_parallel,
           std::memcmp(c_serial.data(), c_parallel.data(),
                       n * n * sizeof(double)) == 0);
  }

  {
    const std::size_t rows = 4096, cols = 512;
    const auto a = random_vec(rows * cols, rng);
    const auto b = random_vec(rows * cols, rng);
    std::vector<double> g_serial(cols * cols), g_parallel(cols * cols);
    const double t_serial = time_best_of(3, [&] {
      kernels::serial::matmul_tn(a.data(), b.data(), g_serial.data(), rows,
                                 cols, cols);
    });
    const double t_parallel = time_best_of(3, [&] {
      kernels::matmul_tn(a.data(), b.data(), g_parallel.data(), rows, cols,
                         cols);
    });
    report("matmul_tn 4096x512", t_serial, t_parallel,
           std::memcmp(g_serial.data(), g_parallel.data(),
                       cols * cols * sizeof(double)) == 0);
  }

  {
    const std::size_t n = 1 << 22;
    const auto a = random_vec(n, rng);
    const auto b = random_vec(n, rng);
    std::vector<double> y_serial(n), y_parallel(n);
    const double t_serial = time_best_of(5, [&] {
      kernels::serial::mul(a.data(), b.data(), y_serial.data(), n);
    });
    const double t_parallel = time_best_of(5, [&] {
      kernels::mul(a.data(), b.data(), y_parallel.data(), n);
    });
    report("elementwise mul 4M", t_serial, t_parallel,
           std::memcmp(y_serial.data(), y_parallel.data(),
                       n * sizeof(double)) == 0);
  }

  {
    const std::size_t n = 1024, d = 64;
    const auto x = random_vec(n * d, rng);
    std::vector<double> d_serial(n * n), d_parallel(n * n);
    const double t_serial = time_best_of(3, [&] {
      kernels::serial::pairwise_sq_dists(x.data(), n, d, d_serial.data());
    });
    const double t_parallel = time_best_of(3, [&] {
      kernels::pairwise_sq_dists(x.data(), n, d, d_parallel.data());
    });
    report("pairwise dists 1024x64", t_serial, t_parallel,
           std::memcmp(d_serial.data(), d_parallel.data(),
                       n * n * sizeof(double)) == 0);
  }

  return 0;
}

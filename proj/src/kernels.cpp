#include "sdsp/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdsp::kernels {

namespace {

using i64 = std::int64_t;

std::atomic<Mode> g_mode{Mode::Parallel};

// Work thresholds below which the parallel front-ends stay serial; the fork
// overhead dwarfs the loop body for the small per-sample matrices used in
// training.
constexpr std::size_t kMatmulMinWork = 32768;
constexpr std::size_t kMapMinWork = 16384;

bool parallel_enabled() {
#ifdef _OPENMP
  return g_mode.load(std::memory_order_relaxed) == Mode::Parallel;
#else
  return false;
#endif
}

}  // namespace

void set_mode(Mode mode) { g_mode.store(mode, std::memory_order_relaxed); }
Mode mode() { return g_mode.load(std::memory_order_relaxed); }

namespace serial {

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k; ++l) s += a[i * k + l] * b[l * n + j];
      if (accumulate)
        c[i * n + j] += s;
      else
        c[i * n + j] = s;
    }
  }
}

void matmul_nt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < p; ++l) s += a[i * p + l] * b[j * p + l];
      if (accumulate)
        c[i * q + j] += s;
      else
        c[i * q + j] = s;
    }
  }
}

void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate) {
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < m; ++l) s += a[l * p + i] * b[l * q + j];
      if (accumulate)
        c[i * q + j] += s;
      else
        c[i * q + j] = s;
    }
  }
}

void add(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] + b[i];
}

void sub(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] - b[i];
}

void mul(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void scale(const double* a, double c, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = c * a[i];
}

void tanh(const double* a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(a[i]);
}

void relu(const double* a, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void mul_acc(const double* a, const double* b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * b[i];
}

void pairwise_sq_dists(const double* x, std::size_t n, std::size_t d,
                       double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        out[i * n + j] = 0.0;
        continue;
      }
      double s = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double t = x[i * d + l] - x[j * d + l];
        s += t * t;
      }
      out[i * n + j] = s;
    }
  }
}

}  // namespace serial

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate) {
  if (!parallel_enabled() || m * k * n < kMatmulMinWork || m < 2) {
    serial::matmul(a, b, c, m, k, n, accumulate);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(m); ++i)
    serial::matmul(a + i * k, b, c + i * n, 1, k, n, accumulate);
#endif
}

void matmul_nt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate) {
  if (!parallel_enabled() || m * p * q < kMatmulMinWork || m < 2) {
    serial::matmul_nt(a, b, c, m, p, q, accumulate);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(m); ++i)
    serial::matmul_nt(a + i * p, b, c + i * q, 1, p, q, accumulate);
#endif
}

void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate) {
  if (!parallel_enabled() || m * p * q < kMatmulMinWork || p < 2) {
    serial::matmul_tn(a, b, c, m, p, q, accumulate);
    return;
  }
#ifdef _OPENMP
  // Output row i reads column i of a; rows are independent.
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(p); ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < m; ++l) s += a[l * p + i] * b[l * q + j];
      if (accumulate)
        c[i * q + j] += s;
      else
        c[i * q + j] = s;
    }
  }
#endif
}

void add(const double* a, const double* b, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::add(a, b, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = a[i] + b[i];
#endif
}

void sub(const double* a, const double* b, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::sub(a, b, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = a[i] - b[i];
#endif
}

void mul(const double* a, const double* b, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::mul(a, b, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = a[i] * b[i];
#endif
}

void scale(const double* a, double c, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::scale(a, c, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = c * a[i];
#endif
}

void tanh(const double* a, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::tanh(a, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = std::tanh(a[i]);
#endif
}

void relu(const double* a, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::relu(a, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] = a[i] > 0.0 ? a[i] : 0.0;
#endif
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::axpy(alpha, x, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] += alpha * x[i];
#endif
}

void mul_acc(const double* a, const double* b, double* y, std::size_t n) {
  if (!parallel_enabled() || n < kMapMinWork) {
    serial::mul_acc(a, b, y, n);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) y[i] += a[i] * b[i];
#endif
}

void pairwise_sq_dists(const double* x, std::size_t n, std::size_t d,
                       double* out) {
  if (!parallel_enabled() || n * n * d < kMatmulMinWork || n < 2) {
    serial::pairwise_sq_dists(x, n, d, out);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 8)
  for (i64 i = 0; i < static_cast<i64>(n); ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (static_cast<std::size_t>(i) == j) {
        out[i * n + j] = 0.0;
        continue;
      }
      double s = 0.0;
      for (std::size_t l = 0; l < d; ++l) {
        const double t = x[i * d + l] - x[j * d + l];
        s += t * t;
      }
      out[i * n + j] = s;
    }
  }
#endif
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace sdsp::kernels

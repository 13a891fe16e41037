#pragma once

#include <cstddef>

// Dense kernels behind the autodiff engine and the evaluation code.
//
// Every kernel exists twice: a plain serial implementation under
// kernels::serial (the reference used by tests and the benchmark) and a
// dispatching front-end that parallelizes the outer loop with OpenMP when the
// work is large enough to pay for it. The parallel variants split only over
// independent output elements and keep every per-element summation order
// identical to the serial code, so results are bitwise identical for any
// thread count.
namespace sdsp::kernels {

enum class Mode { Serial, Parallel };

void set_mode(Mode mode);
Mode mode();

namespace serial {

// c = a[m x k] * b[k x n], row-major; accumulate adds into c instead.
void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate = false);
// c[m x q] = a[m x p] * b^T with b stored [q x p].
void matmul_nt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate = false);
// c[p x q] = a^T * b with a stored [m x p], b stored [m x q].
void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate = false);

void add(const double* a, const double* b, double* y, std::size_t n);
void sub(const double* a, const double* b, double* y, std::size_t n);
void mul(const double* a, const double* b, double* y, std::size_t n);
void scale(const double* a, double c, double* y, std::size_t n);
void tanh(const double* a, double* y, std::size_t n);
void relu(const double* a, double* y, std::size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
// y += a .* b
void mul_acc(const double* a, const double* b, double* y, std::size_t n);

// out[i*n + j] = squared Euclidean distance between rows i and j of x[n x d].
void pairwise_sq_dists(const double* x, std::size_t n, std::size_t d,
                       double* out);

}  // namespace serial

void matmul(const double* a, const double* b, double* c, std::size_t m,
            std::size_t k, std::size_t n, bool accumulate = false);
void matmul_nt(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate = false);
void matmul_tn(const double* a, const double* b, double* c, std::size_t m,
               std::size_t p, std::size_t q, bool accumulate = false);

void add(const double* a, const double* b, double* y, std::size_t n);
void sub(const double* a, const double* b, double* y, std::size_t n);
void mul(const double* a, const double* b, double* y, std::size_t n);
void scale(const double* a, double c, double* y, std::size_t n);
void tanh(const double* a, double* y, std::size_t n);
void relu(const double* a, double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void mul_acc(const double* a, const double* b, double* y, std::size_t n);

void pairwise_sq_dists(const double* x, std::size_t n, std::size_t d,
                       double* out);

// Single fixed-order reduction; identical in both modes so that scalar
// results never depend on the thread count.
double dot(const double* a, const double* b, std::size_t n);

}  // namespace sdsp::kernels

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

QrResult householder_qr(const std::vector<double>& a, std::size_t rows,
                        std::size_t cols) {
  if (rows < cols) throw std::invalid_argument("householder_qr: rows < cols");
  std::vector<double> r = a;  // rows x cols, reduced in place
  std::vector<std::vector<double>> reflectors;

  for (std::size_t k = 0; k < cols; ++k) {
    // Householder vector for column k below the diagonal.
    double norm = 0.0;
    for (std::size_t i = k; i < rows; ++i) norm += r[i * cols + k] * r[i * cols + k];
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      reflectors.emplace_back();  // nothing to eliminate
      continue;
    }
    const double alpha = r[k * cols + k] >= 0.0 ? -norm : norm;
    std::vector<double> v(rows, 0.0);
    for (std::size_t i = k; i < rows; ++i) v[i] = r[i * cols + k];
    v[k] -= alpha;
    double vnorm2 = 0.0;
    for (std::size_t i = k; i < rows; ++i) vnorm2 += v[i] * v[i];
    if (vnorm2 == 0.0) {
      reflectors.emplace_back();
      continue;
    }
    // Apply I - 2 v v^T / (v^T v) to the remaining columns.
    for (std::size_t j = k; j < cols; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < rows; ++i) dot += v[i] * r[i * cols + j];
      const double c = 2.0 * dot / vnorm2;
      for (std::size_t i = k; i < rows; ++i) r[i * cols + j] -= c * v[i];
    }
    reflectors.push_back(std::move(v));
  }

  // Q = H_0 H_1 ... H_{cols-1} applied to the first `cols` columns of I.
  QrResult out;
  out.q.assign(rows * cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    std::vector<double> e(rows, 0.0);
    e[j] = 1.0;
    for (std::size_t k = cols; k-- > 0;) {
      const auto& v = reflectors[k];
      if (v.empty()) continue;
      double vnorm2 = 0.0, dot = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        vnorm2 += v[i] * v[i];
        dot += v[i] * e[i];
      }
      const double c = 2.0 * dot / vnorm2;
      for (std::size_t i = 0; i < rows; ++i) e[i] -= c * v[i];
    }
    for (std::size_t i = 0; i < rows; ++i) out.q[i * cols + j] = e[i];
  }

  out.r.assign(cols * cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i)
    for (std::size_t j = i; j < cols; ++j) out.r[i * cols + j] = r[i * cols + j];

  // Fix signs so diag(R) >= 0 (flip Q columns to compensate).
  for (std::size_t k = 0; k < cols; ++k) {
    if (out.r[k * cols + k] < 0.0) {
      for (std::size_t j = k; j < cols; ++j) out.r[k * cols + j] = -out.r[k * cols + j];
      for (std::size_t i = 0; i < rows; ++i) out.q[i * cols + k] = -out.q[i * cols + k];
    }
  }
  return out;
}

std::vector<double> jacobi_singular_values(std::vector<double> a,
                                           std::size_t rows,
                                           std::size_t cols) {
  // One-sided Jacobi: rotate column pairs until all are orthogonal.
  for (std::size_t sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < cols; ++p) {
      for (std::size_t q = p + 1; q < cols; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          const double x = a[i * cols + p];
          const double y = a[i * cols + q];
          app += x * x;
          aqq += y * y;
          apq += x * y;
        }
        off = std::max(off, std::abs(apq) / std::sqrt(app * aqq + 1e-300));
        if (std::abs(apq) < 1e-14 * std::sqrt(app * aqq) + 1e-300) continue;
        const double tau = (aqq - app) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < rows; ++i) {
          const double x = a[i * cols + p];
          const double y = a[i * cols + q];
          a[i * cols + p] = c * x - s * y;
          a[i * cols + q] = s * x + c * y;
        }
      }
    }
    if (off < 1e-14) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < rows; ++i) s += a[i * cols + j] * a[i * cols + j];
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), [](double x, double y) { return x > y; });
  return sv;
}

std::vector<double> solve_least_squares(const std::vector<double>& a,
                                        std::size_t rows, std::size_t cols,
                                        const std::vector<double>& b) {
  // Normal equations: (A^T A) x = A^T b, Cholesky factorization.
  std::vector<double> ata(cols * cols, 0.0), atb(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      atb[j] += a[i * cols + j] * b[i];
      for (std::size_t k = 0; k < cols; ++k)
        ata[j * cols + k] += a[i * cols + j] * a[i * cols + k];
    }
  }
  // Cholesky: ata = L L^T
  std::vector<double> l(cols * cols, 0.0);
  for (std::size_t i = 0; i < cols; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = ata[i * cols + j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i * cols + k] * l[j * cols + k];
      if (i == j) {
        if (s <= 0.0)
          throw std::runtime_error("least squares: matrix not positive definite");
        l[i * cols + i] = std::sqrt(s);
      } else {
        l[i * cols + j] = s / l[j * cols + j];
      }
    }
  }
  // Forward then back substitution.
  std::vector<double> y(cols), x(cols);
  for (std::size_t i = 0; i < cols; ++i) {
    double s = atb[i];
    for (std::size_t k = 0; k < i; ++k) s -= l[i * cols + k] * y[k];
    y[i] = s / l[i * cols + i];
  }
  for (std::size_t i = cols; i-- > 0;) {
    double s = y[i];
    for (std::size_t k = i + 1; k < cols; ++k) s -= l[k * cols + i] * x[k];
    x[i] = s / l[i * cols + i];
  }
  return x;
}

}  // namespace oracles

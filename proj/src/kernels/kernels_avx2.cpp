// Compiled with -mavx2 -mfma; only reached after a CPUID check.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace signcop::kernels::detail {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* p, std::size_t rows, std::size_t cols, const double* v, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = dot(p + i * cols, v, cols);
}

void gemv_t(const double* p, std::size_t rows, std::size_t cols, const double* w, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy(w[i], p + i * cols, out, cols);
}

// Two rows per pass halves the traffic on `s`, which dominates for d ≥ 32.
void syrk_weighted(const double* p, std::size_t rows, std::size_t cols, const double* w,
                   double* s) {
  std::size_t i = 0;
  for (; i + 2 <= rows; i += 2) {
    const double* p0 = p + i * cols;
    const double* p1 = p0 + cols;
    for (std::size_t a = 0; a < cols; ++a) {
      const __m256d c0 = _mm256_set1_pd(w[i] * p0[a]);
      const __m256d c1 = _mm256_set1_pd(w[i + 1] * p1[a]);
      const double s0 = w[i] * p0[a];
      const double s1 = w[i + 1] * p1[a];
      double* sa = s + a * cols;
      std::size_t b = 0;
      for (; b + 4 <= cols; b += 4) {
        __m256d acc = _mm256_loadu_pd(sa + b);
        acc = _mm256_fmadd_pd(c0, _mm256_loadu_pd(p0 + b), acc);
        acc = _mm256_fmadd_pd(c1, _mm256_loadu_pd(p1 + b), acc);
        _mm256_storeu_pd(sa + b, acc);
      }
      for (; b < cols; ++b) sa[b] += s0 * p0[b] + s1 * p1[b];
    }
  }
  for (; i < rows; ++i) {
    const double* pi = p + i * cols;
    for (std::size_t a = 0; a < cols; ++a) axpy(w[i] * pi[a], pi, s + a * cols, cols);
  }
}

void row_sq_norms(const double* p, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = dot(p + i * cols, p + i * cols, cols);
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{dot, axpy, gemv, gemv_t, syrk_weighted, row_sq_norms, hadamard};
  return t;
}

}  // namespace signcop::kernels::detail

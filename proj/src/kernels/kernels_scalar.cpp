#include "kernels_internal.hpp"

namespace signcop::kernels::detail {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* p, std::size_t rows, std::size_t cols, const double* v, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = dot(p + i * cols, v, cols);
}

void gemv_t(const double* p, std::size_t rows, std::size_t cols, const double* w, double* out) {
  for (std::size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy(w[i], p + i * cols, out, cols);
}

void syrk_weighted(const double* p, std::size_t rows, std::size_t cols, const double* w,
                   double* s) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* pi = p + i * cols;
    for (std::size_t a = 0; a < cols; ++a) axpy(w[i] * pi[a], pi, s + a * cols, cols);
  }
}

void row_sq_norms(const double* p, std::size_t rows, std::size_t cols, double* out) {
  for (std::size_t i = 0; i < rows; ++i) out[i] = dot(p + i * cols, p + i * cols, cols);
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{dot, axpy, gemv, gemv_t, syrk_weighted, row_sq_norms, hadamard};
  return t;
}

}  // namespace signcop::kernels::detail

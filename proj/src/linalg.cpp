#include "signcop/linalg.hpp"

#include <cmath>
#include <string>

#include "signcop/error.hpp"
#include "signcop/kernels.hpp"

namespace signcop {

std::optional<Cholesky> Cholesky::factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("Cholesky: matrix is not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) return std::nullopt;
    const double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (std::size_t k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      l(i, j) = v / ljj;
    }
  }
  return Cholesky(std::move(l));
}

Cholesky Cholesky::factor_or_throw(const Matrix& a, const char* what) {
  auto c = factor(a);
  if (!c) throw NumericalError(std::string(what) + " is not positive definite");
  return std::move(*c);
}

double Cholesky::log_det() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += std::log(lower_(i, i));
  return 2.0 * s;
}

void Cholesky::forward_in_place(std::span<double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw DimensionError("Cholesky solve: length mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= lower_(i, k) * x[k];
    x[i] = v / lower_(i, i);
  }
}

void Cholesky::backward_in_place(std::span<double> x) const {
  const std::size_t n = size();
  if (x.size() != n) throw DimensionError("Cholesky solve: length mismatch");
  for (std::size_t ii = n; ii-- > 0;) {
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= lower_(k, ii) * x[k];
    x[ii] = v / lower_(ii, ii);
  }
}

void Cholesky::solve_in_place(std::span<double> x) const {
  forward_in_place(x);
  backward_in_place(x);
}

std::vector<double> Cholesky::solve(std::span<const double> b) const {
  std::vector<double> x(b.begin(), b.end());
  solve_in_place(x);
  return x;
}

Matrix Cholesky::solve(const Matrix& b) const {
  if (b.rows() != size()) throw DimensionError("Cholesky solve: row mismatch");
  Matrix x(b.rows(), b.cols());
  std::vector<double> col(b.rows());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
    solve_in_place(col);
    for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
  }
  return x;
}

Matrix Cholesky::inverse() const { return solve(Matrix::identity(size())); }

Matrix multiply_abt(ConstMatrixView a, ConstMatrixView b) {
  if (a.cols != b.cols) throw DimensionError("multiply_abt: inner dimension mismatch");
  Matrix c(a.rows, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j) c(i, j) = kernels::dot(a.row(i), b.row(j));
  return c;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) kernels::axpy(a(i, k), b.row(k), c.row(i));
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

}  // namespace signcop

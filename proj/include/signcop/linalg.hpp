#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "signcop/matrix.hpp"

namespace signcop {

// Lower-triangular Cholesky factor A = L·Lᵀ of a symmetric positive-definite
// matrix. Only the lower triangle of the input is read.
class Cholesky {
 public:
  // Returns nullopt if a pivot is not strictly positive.
  static std::optional<Cholesky> factor(const Matrix& a);
  // Like factor() but throws NumericalError naming `what` on failure.
  static Cholesky factor_or_throw(const Matrix& a, const char* what);

  std::size_t size() const noexcept { return lower_.rows(); }
  const Matrix& lower() const noexcept { return lower_; }

  double log_det() const;
  // x := A⁻¹ x
  void solve_in_place(std::span<double> x) const;
  std::vector<double> solve(std::span<const double> b) const;
  // Solves A X = B column by column; B is n×k.
  Matrix solve(const Matrix& b) const;
  // x := L⁻¹ x   (forward substitution only)
  void forward_in_place(std::span<double> x) const;
  // x := L⁻ᵀ x   (back substitution only)
  void backward_in_place(std::span<double> x) const;
  Matrix inverse() const;

 private:
  explicit Cholesky(Matrix l) : lower_(std::move(l)) {}
  Matrix lower_;
};

// C = A·Bᵀ for row-major A (n×d) and B (k×d).
Matrix multiply_abt(ConstMatrixView a, ConstMatrixView b);
// C = A·B.
Matrix multiply(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

}  // namespace signcop

#pragma once

// Gramian correlation matrices in factor form.
//
// From an edge embedding Q (n×d) and ε > 0, Σ = QQᵀ + εI is normalized to
// unit diagonal: D_ii = sqrt(‖Q_i‖² + ε), R = D⁻¹ΣD⁻¹ = PPᵀ + diag(K) with
// P = D⁻¹Q and K_i = ε / D_ii². R is never materialized outside tests.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "signcop/graph.hpp"
#include "signcop/matrix.hpp"

namespace signcop {

inline constexpr std::size_t kDenseGuard = 5000;
inline constexpr double kDefaultEpsilon = 0.04;

// Non-owning R = PPᵀ + diag(K) over a contiguous row range.
struct FactorView {
  ConstMatrixView P;
  std::span<const double> K;

  std::size_t rows() const noexcept { return P.rows; }
  std::size_t rank() const noexcept { return P.cols; }
  FactorView row_block(std::size_t begin, std::size_t count) const;
};

struct CorrelationFactor {
  Matrix P;
  std::vector<double> K_diag;
  std::vector<double> D_diag;
  double epsilon = kDefaultEpsilon;

  std::size_t rows() const noexcept { return P.rows(); }
  std::size_t rank() const noexcept { return P.cols(); }
  FactorView view() const { return {P.view(), K_diag}; }
  operator FactorView() const { return view(); }
};

// Throws ConfigError for ε ≤ 0 and DimensionError for an empty Q.
CorrelationFactor build_factor(const Matrix& Q, double epsilon);
// The factor of Q = 0: P = 0 (n×d), K = 1, R = I.
CorrelationFactor identity_factor(std::size_t n, std::size_t d, double epsilon = kDefaultEpsilon);

// Backpropagates dL/dP and dL/dK of the factor built from Q to dL/dQ.
Matrix factor_backward(const Matrix& Q, const CorrelationFactor& f, const Matrix& grad_P,
                       std::span<const double> grad_K);

// PPᵀ + diag(K). Throws SizeGuardError if rows exceed `guard`.
Matrix dense_R(FactorView f, std::size_t guard = kDenseGuard);

struct BlockFactor {
  Matrix P0, P1;
  std::vector<double> K0_diag, K1_diag;

  FactorView observed() const { return {P0.view(), K0_diag}; }
  FactorView unobserved() const { return {P1.view(), K1_diag}; }
};

// Row split at m. Throws DimensionError unless 0 < m < n.
BlockFactor partition(FactorView f, std::size_t m);

// R*_ij = +1 for i = j or for edges sharing an endpoint with equal signs,
// -1 for edges sharing an endpoint with different signs, 0 otherwise.
// Rows follow g.edges order. Throws SizeGuardError above `guard` edges.
Matrix ideal_correlation(const SignedGraph& g, std::size_t guard = kDenseGuard);

struct NearestFactorOptions {
  std::size_t d = 16;
  double epsilon = kDefaultEpsilon;
  std::size_t steps = 2000;
  // Applied to the gradient of ‖R(Q) − R*‖²_F / n.
  double step_size = 1.0;
  std::size_t max_halvings = 30;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  std::size_t guard = kDenseGuard;
};

struct NearestFactorFit {
  Matrix Q;
  // ‖R(Q) − R*‖²_F / n² at the initial and returned iterates.
  double initial_objective = 0.0;
  double final_objective = 0.0;
  std::size_t steps_taken = 0;
  std::vector<double> objective_trace;
};

// ‖R(Q) − R*‖²_F / n² for R(Q) built with ε.
double nearest_factor_objective(const Matrix& Q, const Matrix& R_star, double epsilon);

// Backtracking gradient descent from Q₀ = init_scale·N(0, 1). A step that
// would increase the objective is halved, up to max_halvings times; if no
// halving helps the iteration stops. Throws Error for non-square or
// non-symmetric R*.
NearestFactorFit fit_nearest_factor(const Matrix& R_star, const NearestFactorOptions& opt);

// Text dump: n lines of P rows, one line of K, then `n d epsilon`.
void write_factor(std::ostream& out, const CorrelationFactor& f);
CorrelationFactor read_factor(std::istream& in);
void save_factor(const std::filesystem::path& path, const CorrelationFactor& f);
CorrelationFactor load_factor(const std::filesystem::path& path);

// Reorders the rows of a factor: output row i is input row order[i].
CorrelationFactor permute_rows(const CorrelationFactor& f, std::span<const std::size_t> order);

}  // namespace signcop

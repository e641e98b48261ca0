#pragma once

// Gaussian copula with R = PPᵀ + diag(K), evaluated through the capacitance
// matrix S = I_d + PᵀK⁻¹P:
//   log det R = log det S + Σ log K_i
//   zᵀR⁻¹z   = zᵀK⁻¹z − bᵀS⁻¹b,   b = PᵀK⁻¹z
// No n×n matrix is formed.

#include <cstddef>
#include <span>
#include <vector>

#include "signcop/correlation.hpp"
#include "signcop/linalg.hpp"
#include "signcop/marginal.hpp"
#include "signcop/matrix.hpp"

namespace signcop {

using LatentVector = std::vector<double>;

// Cholesky of S for one factor, reused across logdet, solves and gradients.
class Capacitance {
 public:
  // Throws NumericalError if S is not positive definite, which signals a
  // corrupted factor (S ⪰ I for any finite P and positive K).
  explicit Capacitance(FactorView f);

  const Cholesky& chol() const noexcept { return chol_; }
  double log_det_R() const noexcept { return log_det_R_; }
  // zᵀR⁻¹z; optionally writes v = R⁻¹z.
  double quad(std::span<const double> z, std::span<double> v_out = {}) const;

 private:
  FactorView f_;
  Cholesky chol_;
  double log_det_R_ = 0.0;
};

// z_i = Φ⁻¹(F(ȳ_i; a_i, t_i)). u and 1 − u are both formed in closed form,
// so the quantile keeps full precision in either tail.
LatentVector z_transform(const SmoothLabels& labels, const MarginalParams& params);

double lowrank_logdet(FactorView f);
double lowrank_quad(std::span<const double> z, FactorView f);

// log c(u) = −½ log det R − ½ (zᵀR⁻¹z − zᵀz), z = Φ⁻¹(u).
double copula_log_density(std::span<const double> u, FactorView f);

struct LossValue {
  double total = 0.0;
  double logdet_term = 0.0;    // log det R00
  double quad_term = 0.0;      // z_obsᵀ(R00⁻¹ − I) z_obs
  double marginal_term = 0.0;  // Σ log f_i(ȳ_i)
};

// ½ logdet + ½ quad − marginal over the observed edges.
LossValue nll_loss(const SmoothLabels& labels, const MarginalParams& params, FactorView f);

// Gradient of C(z, R) = ½ log det R + ½ (zᵀR⁻¹z − zᵀz) in factor coordinates.
struct CopulaGradient {
  double logdet = 0.0;
  double quad = 0.0;  // zᵀ(R⁻¹ − I)z
  Matrix dP;
  std::vector<double> dK;
  std::vector<double> dz;
};

// `logdet_gradient_scale` multiplies the log-determinant contribution to dP
// and dK; it exists only for mutation self-tests and is 1 otherwise.
CopulaGradient copula_term_gradient(std::span<const double> z, FactorView f,
                                    double logdet_gradient_scale = 1.0);

// ½R⁻¹ − ½R⁻¹zzᵀR⁻¹ for a dense PD R. Throws SizeGuardError above `guard`
// rows and NumericalError if R is not positive definite.
Matrix grad_R_dense(std::span<const double> z, const Matrix& R, std::size_t guard = kDenseGuard);

}  // namespace signcop

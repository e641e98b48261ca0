#include "signcop/copula.hpp"

#include <cmath>

#include "signcop/error.hpp"
#include "signcop/kernels.hpp"
#include "signcop/normal.hpp"

namespace signcop {
namespace {

Matrix capacitance_matrix(FactorView f) {
  const std::size_t d = f.rank();
  std::vector<double> inv_k(f.rows());
  for (std::size_t i = 0; i < f.rows(); ++i) {
    if (!(f.K[i] > 0.0)) throw NumericalError("correlation factor has a non-positive K entry");
    inv_k[i] = 1.0 / f.K[i];
  }
  Matrix s = Matrix::identity(d);
  kernels::syrk_weighted(f.P, inv_k, s.values());
  return s;
}

}  // namespace

Capacitance::Capacitance(FactorView f)
    : f_(f), chol_(Cholesky::factor_or_throw(capacitance_matrix(f), "capacitance matrix")) {
  double s = chol_.log_det();
  for (double k : f.K) s += std::log(k);
  log_det_R_ = s;
}

double Capacitance::quad(std::span<const double> z, std::span<double> v_out) const {
  const std::size_t n = f_.rows();
  if (z.size() != n) throw DimensionError("quadratic form: z length does not match factor");
  std::vector<double> w(n);
  double zkz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = z[i] / f_.K[i];
    zkz += z[i] * w[i];
  }
  std::vector<double> b(f_.rank(), 0.0);
  kernels::gemv_t(f_.P, w, b);
  std::vector<double> c(b);
  chol_.solve_in_place(c);
  if (!v_out.empty()) {
    if (v_out.size() != n) throw DimensionError("quadratic form: output length mismatch");
    kernels::gemv(f_.P, c, v_out);
    for (std::size_t i = 0; i < n; ++i) v_out[i] = w[i] - v_out[i] / f_.K[i];
  }
  return zkz - kernels::dot(b, c);
}

LatentVector z_transform(const SmoothLabels& labels, const MarginalParams& params) {
  params.validate();
  if (labels.size() != params.size()) throw DimensionError("z_transform: length mismatch");
  LatentVector z(labels.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double y = labels.values[i];
    if (!(y > 0.0 && y < 1.0)) throw DomainError("z_transform: labels must lie in (0, 1)");
    // u = 1 / (1 + a((1−y)/y)ᵗ) = σ(−x), 1 − u = σ(x).
    const double x = std::log(params.a[i]) + params.t[i] * (std::log1p(-y) - std::log(y));
    z[i] = std_normal_icdf(sigmoid(-x), sigmoid(x));
  }
  return z;
}

double lowrank_logdet(FactorView f) { return Capacitance(f).log_det_R(); }

double lowrank_quad(std::span<const double> z, FactorView f) { return Capacitance(f).quad(z); }

double copula_log_density(std::span<const double> u, FactorView f) {
  if (u.size() != f.rows()) throw DimensionError("copula density: length mismatch");
  std::vector<double> z(u.size());
  double zz = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    z[i] = std_normal_icdf(u[i]);
    zz += z[i] * z[i];
  }
  const Capacitance cap(f);
  return -0.5 * cap.log_det_R() - 0.5 * (cap.quad(z) - zz);
}

LossValue nll_loss(const SmoothLabels& labels, const MarginalParams& params, FactorView f) {
  if (labels.size() != f.rows()) throw DimensionError("nll_loss: labels do not match factor");
  const LatentVector z = z_transform(labels, params);
  const Capacitance cap(f);
  LossValue v;
  v.logdet_term = cap.log_det_R();
  v.quad_term = cap.quad(z) - kernels::dot(z, z);
  for (std::size_t i = 0; i < z.size(); ++i)
    v.marginal_term += rb_log_pdf(labels.values[i], params.a[i], params.t[i]);
  v.total = 0.5 * v.logdet_term + 0.5 * v.quad_term - v.marginal_term;
  return v;
}

CopulaGradient copula_term_gradient(std::span<const double> z, FactorView f,
                                    double logdet_gradient_scale) {
  const std::size_t n = f.rows();
  const std::size_t d = f.rank();
  const Capacitance cap(f);
  CopulaGradient g;
  std::vector<double> v(n);
  g.logdet = cap.log_det_R();
  g.quad = cap.quad(z, v) - kernels::dot(z, z);

  const Matrix S_inv = cap.chol().inverse();
  g.dz.resize(n);
  g.dK.resize(n);
  g.dP = Matrix(n, d);
  std::vector<double> pm(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto pi = f.P.row(i);
    const double inv_k = 1.0 / f.K[i];
    // pm = S⁻¹ p_i, so row i of R⁻¹P is pmᵀ / K_i and diag(R⁻¹)_i is
    // 1/K_i − p_iᵀS⁻¹p_i / K_i².
    kernels::gemv(S_inv, pi, pm);
    const double r_inv_ii = inv_k - kernels::dot(pi, pm) * inv_k * inv_k;
    g.dK[i] = 0.5 * logdet_gradient_scale * r_inv_ii - 0.5 * v[i] * v[i];
    g.dz[i] = v[i] - z[i];
    auto dpi = g.dP.row(i);
    for (std::size_t k = 0; k < d; ++k) dpi[k] = logdet_gradient_scale * pm[k] * inv_k;
  }
  // −v (vᵀP)
  std::vector<double> vp(d, 0.0);
  kernels::gemv_t(f.P, v, vp);
  for (std::size_t i = 0; i < n; ++i) kernels::axpy(-v[i], vp, g.dP.row(i));
  return g;
}

Matrix grad_R_dense(std::span<const double> z, const Matrix& R, std::size_t guard) {
  const std::size_t n = R.rows();
  if (n > guard) throw SizeGuardError("dense gradient refused: matrix exceeds the size guard");
  if (R.cols() != n || z.size() != n) throw DimensionError("grad_R_dense: shape mismatch");
  const Cholesky chol = Cholesky::factor_or_throw(R, "correlation matrix");
  Matrix g = chol.inverse();
  const std::vector<double> v = chol.solve(z);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = 0.5 * g(i, j) - 0.5 * v[i] * v[j];
  return g;
}

}  // namespace signcop

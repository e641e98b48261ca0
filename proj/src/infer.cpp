#include "signcop/infer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "signcop/copula.hpp"
#include "signcop/error.hpp"
#include "signcop/kernels.hpp"
#include "signcop/linalg.hpp"
#include "signcop/normal.hpp"
#include "signcop/rng.hpp"

namespace signcop {

Matrix LowRankGaussian::dense_covariance(std::size_t guard) const {
  if (size() > guard) throw SizeGuardError("dense covariance refused: exceeds the size guard");
  Matrix c = multiply_abt(cov_factor, cov_factor);
  for (std::size_t i = 0; i < size(); ++i) c(i, i) += cov_diag[i];
  return c;
}

DenseGaussian conditional_direct(const Matrix& R, std::size_t m, std::span<const double> z_obs,
                                 std::size_t guard) {
  const std::size_t n = R.rows();
  if (n > guard) throw SizeGuardError("dense conditional refused: exceeds the size guard");
  if (R.cols() != n || m == 0 || m >= n || z_obs.size() != m)
    throw DimensionError("conditional_direct: shape mismatch");
  const std::size_t u = n - m;
  Matrix r00(m, m), r01(m, u);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) r00(i, j) = R(i, j);
    for (std::size_t j = 0; j < u; ++j) r01(i, j) = R(i, m + j);
  }
  const Cholesky chol = Cholesky::factor_or_throw(r00, "observed correlation block");
  const std::vector<double> alpha = chol.solve(z_obs);
  const Matrix x = chol.solve(r01);  // R00⁻¹ R01
  DenseGaussian g;
  g.mean.assign(u, 0.0);
  g.cov = Matrix(u, u);
  for (std::size_t i = 0; i < u; ++i) {
    for (std::size_t k = 0; k < m; ++k) g.mean[i] += R(m + i, k) * alpha[k];
    for (std::size_t j = 0; j < u; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += R(m + i, k) * x(k, j);
      g.cov(i, j) = R(m + i, m + j) - s;
    }
  }
  return g;
}

LowRankGaussian conditional_woodbury(FactorView observed, FactorView unobserved,
                                     std::span<const double> z_obs) {
  const std::size_t d = observed.rank();
  if (unobserved.rank() != d) throw DimensionError("conditional_woodbury: rank mismatch");
  if (z_obs.size() != observed.rows())
    throw DimensionError("conditional_woodbury: z_obs length does not match observed rows");
  const Capacitance cap(observed);
  const Cholesky& chol = cap.chol();

  std::vector<double> w(z_obs.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = z_obs[i] / observed.K[i];
  std::vector<double> c(d, 0.0);
  kernels::gemv_t(observed.P, w, c);
  chol.solve_in_place(c);

  LowRankGaussian g;
  const std::size_t u = unobserved.rows();
  g.mean.resize(u);
  kernels::gemv(unobserved.P, c, g.mean);
  // With S0 = L_s L_sᵀ, L = L_s⁻ᵀ satisfies L Lᵀ = S0⁻¹, so row i of P1·L is
  // (L_s⁻¹ p_i)ᵀ.
  g.cov_factor = Matrix(u, d);
  for (std::size_t i = 0; i < u; ++i) {
    auto row = g.cov_factor.row(i);
    const auto src = unobserved.P.row(i);
    std::copy(src.begin(), src.end(), row.begin());
    chol.forward_in_place(row);
  }
  g.cov_diag.assign(unobserved.K.begin(), unobserved.K.end());
  return g;
}

LowRankGaussian conditional_woodbury(const BlockFactor& b, std::span<const double> z_obs) {
  return conditional_woodbury(b.observed(), b.unobserved(), z_obs);
}

double score_from_latent(double z, double a, double t) {
  return rb_icdf_from_logit(std_normal_logit_cdf(z), a, t);
}

Prediction predict(const LowRankGaussian& g, const MarginalParams& params,
                   const PredictOptions& opt) {
  const std::size_t n = g.size();
  if (params.size() != n) throw DimensionError("predict: params do not match the Gaussian");
  params.validate();
  Prediction p;
  p.scores.assign(n, 0.0);
  if (opt.mode == InferenceMode::Mean) {
    for (std::size_t j = 0; j < n; ++j) p.scores[j] = score_from_latent(g.mean[j], params.a[j], params.t[j]);
  } else {
    if (opt.samples == 0) throw ConfigError("predict: sample mode needs at least one draw");
    const std::size_t d = g.cov_factor.cols();
    Rng rng(opt.seed);
    std::vector<double> g1(d), z(n);
    for (std::size_t s = 0; s < opt.samples; ++s) {
      for (double& v : g1) v = rng.normal();
      kernels::gemv(g.cov_factor, g1, z);
      for (std::size_t j = 0; j < n; ++j) {
        const double zj = g.mean[j] + z[j] + std::sqrt(g.cov_diag[j]) * rng.normal();
        p.scores[j] += score_from_latent(zj, params.a[j], params.t[j]);
      }
    }
    for (double& v : p.scores) v /= static_cast<double>(opt.samples);
  }
  p.labels.resize(n);
  for (std::size_t j = 0; j < n; ++j) p.labels[j] = p.scores[j] >= 0.5 ? 1 : -1;
  return p;
}

void write_predictions(std::ostream& out, std::span<const SignedEdge> edges, const Prediction& p) {
  if (edges.size() != p.scores.size()) throw DimensionError("write_predictions: length mismatch");
  char buf[32];
  for (std::size_t i = 0; i < edges.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.scores[i]);
    out << edges[i].src << ' ' << edges[i].dst << ' ' << buf << ' ' << p.labels[i] << '\n';
  }
}

}  // namespace signcop

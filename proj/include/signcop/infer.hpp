#pragma once

// Conditional Gaussian inference of unobserved latents given observed ones,
// and sign prediction from the conditional.
//
// For R partitioned at m into observed (0) and unobserved (1) rows,
//   z₁ | z₀ ~ N(R10 R00⁻¹ z₀, R11 − R10 R00⁻¹ R01).
// With R = PPᵀ + K and S0 = I + P0ᵀK0⁻¹P0 this is
//   N(P1 S0⁻¹ P0ᵀ K0⁻¹ z₀, P1 S0⁻¹ P1ᵀ + K1),
// which needs O(nd + d³) time and never allocates an m×m block.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "signcop/correlation.hpp"
#include "signcop/graph.hpp"
#include "signcop/marginal.hpp"
#include "signcop/matrix.hpp"

namespace signcop {

// N(mean, cov_factor·cov_factorᵀ + diag(cov_diag)).
struct LowRankGaussian {
  std::vector<double> mean;
  Matrix cov_factor;
  std::vector<double> cov_diag;

  std::size_t size() const noexcept { return mean.size(); }
  Matrix dense_covariance(std::size_t guard = kDenseGuard) const;
};

struct DenseGaussian {
  std::vector<double> mean;
  Matrix cov;
};

// Dense reference: solves with R00 directly. R is the full n×n matrix.
// Throws SizeGuardError above `guard` rows, NumericalError if R00 is not PD.
DenseGaussian conditional_direct(const Matrix& R, std::size_t m, std::span<const double> z_obs,
                                 std::size_t guard = kDenseGuard);

// cov_factor = P1·L with L·Lᵀ = S0⁻¹ and cov_diag = K1.
LowRankGaussian conditional_woodbury(FactorView observed, FactorView unobserved,
                                     std::span<const double> z_obs);
LowRankGaussian conditional_woodbury(const BlockFactor& b, std::span<const double> z_obs);

enum class InferenceMode { Mean, Sample };

struct PredictOptions {
  InferenceMode mode = InferenceMode::Mean;
  std::size_t samples = 1;  // joint draws averaged in Sample mode
  std::uint64_t seed = 0;
};

struct Prediction {
  std::vector<double> scores;  // s_j ∈ [0, 1]
  std::vector<int> labels;     // +1 iff s_j ≥ 0.5
};

// s_j = F⁻¹(Φ(z_j); a_j, t_j) with z the conditional mean (Mean) or the
// average score over joint draws z = mean + cov_factor·g₁ + sqrt(cov_diag)⊙g₂.
Prediction predict(const LowRankGaussian& g, const MarginalParams& params,
                   const PredictOptions& opt = {});
// Score of a single latent value; strictly increasing in z.
double score_from_latent(double z, double a, double t);

// One line `src dst score label` per edge, in the order given.
void write_predictions(std::ostream& out, std::span<const SignedEdge> edges, const Prediction& p);

}  // namespace signcop

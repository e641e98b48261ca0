#pragma once

// Relaxed Bernoulli marginals on (0, 1) with location a > 0 and temperature
// t ∈ (0, 1):
//   F(x; a, t)  = xᵗ / (a(1−x)ᵗ + xᵗ)
//   f(x; a, t)  = a t x^{t−1} (1−x)^{t−1} / (a(1−x)ᵗ + xᵗ)²
//   F⁻¹(u; a, t) = u^{1/t} / (a^{−1/t}(1−u)^{1/t} + u^{1/t})
// a > 1 moves mass toward 1 (a positive sign), a < 1 toward 0.

#include <cstddef>
#include <span>
#include <vector>

namespace signcop {

// Below this distance from 0 or 1, powers are evaluated in log space.
inline constexpr double kLogSpaceCutoff = 1e-12;

struct MarginalParams {
  std::vector<double> a;  // location, > 0
  std::vector<double> t;  // temperature, in (0, 1)

  std::size_t size() const noexcept { return a.size(); }
  // Throws DomainError if lengths differ or any value is out of domain.
  void validate() const;
  MarginalParams slice(std::size_t begin, std::size_t count) const;
};

struct SmoothLabels {
  std::vector<double> values;  // each exactly eta or 1 - eta
  double eta = 0.01;

  std::size_t size() const noexcept { return values.size(); }
};

// Throws DomainError unless 0 < x < 1.
double rb_pdf(double x, double a, double t);
double rb_log_pdf(double x, double a, double t);
// Defined on [0, 1]; exactly 0 at x = 0 and 1 at x = 1.
double rb_cdf(double x, double a, double t);
// Defined on [0, 1]; exactly 0 at u = 0 and 1 at u = 1.
double rb_icdf(double u, double a, double t);
// F⁻¹ evaluated from logit(u) = log(u / (1 − u)). Avoids forming u when it
// would round to 0 or 1.
double rb_icdf_from_logit(double logit_u, double a, double t);

// y = -1 ↦ eta, y = +1 ↦ 1 - eta. Throws ConfigError unless 0 < eta < 0.5.
double smooth_label(int y, double eta);
SmoothLabels smooth_labels(std::span<const int> hard, double eta);
void check_eta(double eta);

// Numerically stable logistic function and its log.
double sigmoid(double x);
double log_sigmoid(double x);

}  // namespace signcop

#include "signcop/marginal.hpp"

#include <cmath>
#include <string>

#include "signcop/error.hpp"

namespace signcop {
namespace {

void check_params(double a, double t) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("relaxed Bernoulli: a must be > 0");
  if (!(t > 0.0 && t < 1.0)) throw DomainError("relaxed Bernoulli: t must lie in (0, 1)");
}

bool near_boundary(double x) { return x < kLogSpaceCutoff || 1.0 - x < kLogSpaceCutoff; }

double log_add_exp(double x, double y) {
  const double m = std::max(x, y);
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

}  // namespace

void MarginalParams::validate() const {
  if (a.size() != t.size()) throw DomainError("marginal params: a and t lengths differ");
  for (std::size_t i = 0; i < a.size(); ++i) check_params(a[i], t[i]);
}

MarginalParams MarginalParams::slice(std::size_t begin, std::size_t count) const {
  if (begin + count > a.size()) throw DimensionError("marginal params: slice out of range");
  return {{a.begin() + begin, a.begin() + begin + count},
          {t.begin() + begin, t.begin() + begin + count}};
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double rb_log_pdf(double x, double a, double t) {
  check_params(a, t);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("relaxed Bernoulli pdf: x must lie in (0, 1)");
  const double lx = std::log(x);
  const double l1x = std::log1p(-x);
  const double log_den = log_add_exp(std::log(a) + t * l1x, t * lx);
  return std::log(a) + std::log(t) + (t - 1.0) * (lx + l1x) - 2.0 * log_den;
}

double rb_pdf(double x, double a, double t) {
  check_params(a, t);
  if (!(x > 0.0 && x < 1.0)) throw DomainError("relaxed Bernoulli pdf: x must lie in (0, 1)");
  if (near_boundary(x)) return std::exp(rb_log_pdf(x, a, t));
  const double xt = std::pow(x, t);
  const double yt = std::pow(1.0 - x, t);
  const double den = a * yt + xt;
  return a * t * (xt / x) * (yt / (1.0 - x)) / (den * den);
}

double rb_cdf(double x, double a, double t) {
  check_params(a, t);
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("relaxed Bernoulli cdf: x must lie in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  if (near_boundary(x)) {
    // 1 / (1 + a ((1−x)/x)ᵗ)
    return sigmoid(-(std::log(a) + t * (std::log1p(-x) - std::log(x))));
  }
  const double xt = std::pow(x, t);
  return xt / (a * std::pow(1.0 - x, t) + xt);
}

double rb_icdf_from_logit(double logit_u, double a, double t) {
  check_params(a, t);
  if (std::isnan(logit_u)) throw DomainError("relaxed Bernoulli icdf: NaN input");
  return sigmoid((logit_u + std::log(a)) / t);
}

double rb_icdf(double u, double a, double t) {
  check_params(a, t);
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("relaxed Bernoulli icdf: u must lie in [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return 1.0;
  // u^{1/t} overflows the exponent range for small t; the logistic form
  // is the same expression divided through by u^{1/t}.
  return rb_icdf_from_logit(std::log(u) - std::log1p(-u), a, t);
}

void check_eta(double eta) {
  if (!(eta > 0.0 && eta < 0.5)) throw ConfigError("eta must lie in (0, 0.5)");
}

double smooth_label(int y, double eta) {
  check_eta(eta);
  if (y == -1) return eta;
  if (y == 1) return 1.0 - eta;
  throw DomainError("label must be -1 or +1, got " + std::to_string(y));
}

SmoothLabels smooth_labels(std::span<const int> hard, double eta) {
  SmoothLabels s;
  s.eta = eta;
  s.values.reserve(hard.size());
  for (int y : hard) s.values.push_back(smooth_label(y, eta));
  return s;
}

}  // namespace signcop

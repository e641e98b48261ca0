#pragma once

namespace signcop {

// Φ(x), via erfc; accurate to a few ulps in both tails.
double std_normal_cdf(double x);
// Φ⁻¹(u) for u ∈ (0, 1); throws DomainError at 0, 1 or outside.
// Wichura's AS 241 (PPND16) rational approximation, ~1e-16 relative.
double std_normal_icdf(double u);
// Φ⁻¹ given both u and 1 − u. The smaller of the two drives the tail branch,
// so u close to 1 keeps full precision when 1 − u is known exactly.
double std_normal_icdf(double u, double one_minus_u);
double std_normal_log_pdf(double x);
// log Φ(x) − log Φ(−x), finite for |x| < ~37.
double std_normal_logit_cdf(double x);

}  // namespace signcop

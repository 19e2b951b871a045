#pragma once

namespace kfdp {

/// Standard normal CDF, full relative accuracy in the lower tail.
double normal_cdf(double x);
/// 1 - Phi(x), full relative accuracy in the upper tail.
double normal_sf(double x);
/// Phi^{-1}(p) for p in (0, 1); +-infinity at the endpoints.
double normal_quantile(double p);
/// z such that 1 - Phi(z) = q, accurate for small q.
double normal_upper_quantile(double q);

/// 2 (1 - Phi(|z|)).
double two_sided_pvalue(double z);

}  // namespace kfdp

#include "kfdp/normal.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kfdp/errors.hpp"

namespace kfdp {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt2Pi = 2.5066282746310002;  // sqrt(2 pi)

// Acklam's rational approximation (relative error ~1.2e-9) for the lower
// half p <= 0.5; refined by one Halley step below.
double acklam_lower(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// Solve Phi(x) = p for p <= 0.5.
double lower_half_quantile(double p) {
  const double x = acklam_lower(p);
  const double e = normal_cdf(x) - p;
  const double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double normal_quantile(double p) {
  if (std::isnan(p) || p < 0.0 || p > 1.0) throw DomainError("normal_quantile needs p in [0, 1]");
  if (p == 0.0) return -std::numeric_limits<double>::infinity();
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (p <= 0.5) return lower_half_quantile(p);
  return -lower_half_quantile(1.0 - p);
}

double normal_upper_quantile(double q) {
  if (std::isnan(q) || q < 0.0 || q > 1.0) throw DomainError("normal_upper_quantile needs q in [0, 1]");
  if (q == 0.0) return std::numeric_limits<double>::infinity();
  if (q == 1.0) return -std::numeric_limits<double>::infinity();
  if (q <= 0.5) return -lower_half_quantile(q);
  return lower_half_quantile(1.0 - q);
}

double two_sided_pvalue(double z) { return std::erfc(std::abs(z) / kSqrt2); }

}  // namespace kfdp

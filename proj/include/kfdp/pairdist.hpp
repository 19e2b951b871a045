#pragma once

// Common pairwise joint distribution F(u, v) = Pr(P_i <= u, P_j <= v) of two
// null p-values, plus the bivariate normal kernel behind the equicorrelated
// two-sided model.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace kfdp {

/// Pr(Z1 <= a, Z2 <= b) for a standard bivariate normal with correlation rho.
/// Infinite limits are handled as limits; |rho| > 1 throws DomainError.
double bvn_cdf(double a, double b, double rho);

/// Pr(|Z1| >= z_{u/2}, |Z2| >= z_{v/2}) for correlation rho, i.e. the joint
/// CDF of two two-sided normal p-values.
double two_sided_equicorr_F(double u, double v, double rho);

class PairwiseNullF {
 public:
  enum class Kind { independence, comonotone, equicorrelated_normal, custom };
  using Evaluator = std::function<double(double, double)>;

  static PairwiseNullF independence();
  static PairwiseNullF comonotone();
  static PairwiseNullF equicorrelated_normal(double rho);
  /// User-supplied F. Spot-checked on a coarse grid; an invalid F throws ConfigError.
  static PairwiseNullF custom(std::string name, Evaluator f);

  /// F(u, v); arguments are clamped to [0, 1].
  double operator()(double u, double v) const;
  /// F(u | v) = F(u, v) / v, clamped to [0, 1]; v = 0 throws DomainError.
  double conditional(double u, double v) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::optional<double> rho() const { return rho_; }

 private:
  PairwiseNullF(Kind kind, std::string name, std::optional<double> rho, Evaluator f);

  Kind kind_;
  std::string name_;
  std::optional<double> rho_;
  std::shared_ptr<const Evaluator> eval_;
};

inline double conditional_F(double u, double v, const PairwiseNullF& f) { return f.conditional(u, v); }

struct ValidityReport {
  double max_asymmetry = 0.0;       // max |F(u,v) - F(v,u)|
  double max_frechet_excess = 0.0;  // max violation of max(u+v-1,0) <= F <= min(u,v)
  double min_rectangle = 0.0;       // min F(u2,v2) - F(u1,v2) - F(u2,v1) + F(u1,v1)
  double max_margin_error = 0.0;    // max |F(u,1) - u|
  double max_boundary = 0.0;        // max |F(u,0)|, |F(0,v)|, |F(1,1) - 1|

  bool ok(double tol_sym, double tol_rect, double tol_margin) const;
};

/// Copula-style validity checks on a (points x points) grid over [0, 1].
ValidityReport check_validity(const PairwiseNullF& f, int points);

}  // namespace kfdp

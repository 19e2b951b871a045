#include "kfdp/pairdist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "kfdp/errors.hpp"
#include "kfdp/normal.hpp"

namespace kfdp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Half of the symmetric Gauss-Legendre rules with 6, 12 and 20 nodes on [-1, 1].
struct HalfRule {
  const double* w;
  const double* x;
  int count;
};

constexpr std::array<double, 3> kW6 = {0.1713244923791705, 0.3607615730481384, 0.4679139345726904};
constexpr std::array<double, 3> kX6 = {-0.9324695142031522, -0.6612093864662647, -0.2386191860831970};
constexpr std::array<double, 6> kW12 = {0.4717533638651177e-01, 0.1069393259953183, 0.1600783285433464,
                                        0.2031674267230659,     0.2334925365383547, 0.2491470458134029};
constexpr std::array<double, 6> kX12 = {-0.9815606342467191, -0.9041172563704750, -0.7699026741943050,
                                        -0.5873179542866171, -0.3678314989981802, -0.1252334085114692};
constexpr std::array<double, 10> kW20 = {0.1761400713915212e-01, 0.4060142980038694e-01, 0.6267204833410906e-01,
                                         0.8327674157670475e-01, 0.1019301198172404,     0.1181945319615184,
                                         0.1316886384491766,     0.1420961093183821,     0.1491729864726037,
                                         0.1527533871307259};
constexpr std::array<double, 10> kX20 = {-0.9931285991850949, -0.9639719272779138, -0.9122344282513259,
                                         -0.8391169718222188, -0.7463319064601508, -0.6360536807265150,
                                         -0.5108670019508271, -0.3737060887154196, -0.2277858511416451,
                                         -0.7652652113349733e-01};

HalfRule rule_for(double abs_r) {
  if (abs_r < 0.3) return {kW6.data(), kX6.data(), 3};
  if (abs_r < 0.75) return {kW12.data(), kX12.data(), 6};
  return {kW20.data(), kX20.data(), 10};
}

// Pr(X > h, Y > k) for finite h, k and |r| < 1. For |r| < 0.925 this
// integrates d Phi_2 / d rho = phi_2 along rho = sin(theta); closer to the
// degenerate case it integrates the corrected expansion around |r| = 1.
double upper_orthant(double h, double k, double r) {
  const HalfRule rule = rule_for(std::abs(r));
  double hk = h * k;
  double bvn = 0.0;
  if (std::abs(r) < 0.925) {
    const double hs = 0.5 * (h * h + k * k);
    const double asr = std::asin(r);
    for (int i = 0; i < rule.count; ++i) {
      double sn = std::sin(asr * (rule.x[i] + 1.0) / 2.0);
      bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
      sn = std::sin(asr * (-rule.x[i] + 1.0) / 2.0);
      bvn += rule.w[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
    }
    return bvn * asr / (2.0 * kTwoPi) + normal_cdf(-h) * normal_cdf(-k);
  }
  if (r < 0.0) {
    k = -k;
    hk = -hk;
  }
  const double as = (1.0 - r) * (1.0 + r);
  double a = std::sqrt(as);
  const double bs = (h - k) * (h - k);
  const double c = (4.0 - hk) / 8.0;
  const double d = (12.0 - hk) / 16.0;
  bvn = a * std::exp(-(bs / as + hk) / 2.0) * (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
  if (hk > -160.0) {
    const double b = std::sqrt(bs);
    bvn -= std::exp(-hk / 2.0) * std::sqrt(kTwoPi) * normal_cdf(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
  }
  a /= 2.0;
  for (int i = 0; i < rule.count; ++i) {
    double xs = (a * (rule.x[i] + 1.0)) * (a * (rule.x[i] + 1.0));
    double rs = std::sqrt(1.0 - xs);
    bvn += a * rule.w[i] *
           (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs - std::exp(-(bs / xs + hk) / 2.0) * (1.0 + c * xs * (1.0 + d * xs)));
    xs = as * (-rule.x[i] + 1.0) * (-rule.x[i] + 1.0) / 4.0;
    rs = std::sqrt(1.0 - xs);
    bvn += a * rule.w[i] * std::exp(-(bs / xs + hk) / 2.0) *
           (std::exp(-hk * (1.0 - rs) / (2.0 * (1.0 + rs))) / rs - (1.0 + c * xs * (1.0 + d * xs)));
  }
  bvn = -bvn / kTwoPi;
  if (r > 0.0) return bvn + normal_cdf(-std::max(h, k));
  return -bvn + std::max(0.0, normal_cdf(-h) - normal_cdf(-k));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double bvn_cdf(double a, double b, double rho) {
  if (std::isnan(a) || std::isnan(b) || std::isnan(rho)) throw DomainError("bvn_cdf: NaN argument");
  if (rho < -1.0 || rho > 1.0) throw DomainError("bvn_cdf: correlation must lie in [-1, 1]");
  if (a == -INFINITY || b == -INFINITY) return 0.0;
  if (a == INFINITY) return normal_cdf(b);
  if (b == INFINITY) return normal_cdf(a);
  if (rho == 1.0) return normal_cdf(std::min(a, b));
  if (rho == -1.0) return std::max(0.0, normal_cdf(a) - normal_cdf(-b));
  return clamp01(upper_orthant(-a, -b, rho));
}

double two_sided_equicorr_F(double u, double v, double rho) {
  if (std::isnan(u) || std::isnan(v)) throw DomainError("two_sided_equicorr_F: NaN argument");
  if (rho < -1.0 || rho > 1.0) throw DomainError("two_sided_equicorr_F: correlation must lie in [-1, 1]");
  u = clamp01(u);
  v = clamp01(v);
  if (u == 0.0 || v == 0.0) return 0.0;
  if (u == 1.0) return v;
  if (v == 1.0) return u;
  const double a = normal_upper_quantile(0.5 * u);
  const double b = normal_upper_quantile(0.5 * v);
  // Quadrants {Z1 >= a, Z2 >= b} and {Z1 <= -a, Z2 <= -b} share bvn_cdf(-a, -b, rho);
  // the two mixed-sign quadrants share bvn_cdf(-a, -b, -rho).
  const double same_sign = bvn_cdf(-a, -b, rho);
  const double mixed_sign = bvn_cdf(-a, -b, -rho);
  return clamp01(2.0 * same_sign + 2.0 * mixed_sign);
}

PairwiseNullF::PairwiseNullF(Kind kind, std::string name, std::optional<double> rho, Evaluator f)
    : kind_(kind), name_(std::move(name)), rho_(rho), eval_(std::make_shared<const Evaluator>(std::move(f))) {}

PairwiseNullF PairwiseNullF::independence() {
  return PairwiseNullF(Kind::independence, "independence", 0.0, [](double u, double v) { return u * v; });
}

PairwiseNullF PairwiseNullF::comonotone() {
  return PairwiseNullF(Kind::comonotone, "comonotone", 1.0, [](double u, double v) { return std::min(u, v); });
}

PairwiseNullF PairwiseNullF::equicorrelated_normal(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) throw ConfigError("equicorrelated model needs rho in [-1, 1]");
  std::ostringstream name;
  name << "equicorrelated-normal(rho=" << rho << ")";
  return PairwiseNullF(Kind::equicorrelated_normal, name.str(), rho,
                       [rho](double u, double v) { return two_sided_equicorr_F(u, v, rho); });
}

PairwiseNullF PairwiseNullF::custom(std::string name, Evaluator f) {
  if (!f) throw ConfigError("custom pairwise F needs an evaluator");
  PairwiseNullF out(Kind::custom, std::move(name), std::nullopt, std::move(f));
  const ValidityReport report = check_validity(out, 11);
  if (!report.ok(1e-8, -1e-8, 1e-6)) {
    throw ConfigError("custom pairwise F '" + out.name_ + "' fails the distribution-function spot checks");
  }
  return out;
}

double PairwiseNullF::operator()(double u, double v) const { return (*eval_)(clamp01(u), clamp01(v)); }

double PairwiseNullF::conditional(double u, double v) const {
  if (!(v > 0.0)) throw DomainError("conditional F(u | v) needs v > 0");
  return clamp01((*this)(u, v) / v);
}

bool ValidityReport::ok(double tol_sym, double tol_rect, double tol_margin) const {
  return max_asymmetry <= tol_sym && max_frechet_excess <= tol_sym && min_rectangle >= tol_rect &&
         max_margin_error <= tol_margin && max_boundary <= tol_margin;
}

ValidityReport check_validity(const PairwiseNullF& f, int points) {
  if (points < 2) throw ConfigError("validity grid needs at least 2 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / (points - 1);
  std::vector<double> table(grid.size() * grid.size());
  const auto at = [&](std::size_t i, std::size_t j) -> double& { return table[i * grid.size() + j]; };
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = 0; j < grid.size(); ++j) at(i, j) = f(grid[i], grid[j]);

  ValidityReport rep;
  rep.min_rectangle = INFINITY;
  const std::size_t last = grid.size() - 1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    rep.max_margin_error = std::max(rep.max_margin_error, std::abs(at(i, last) - grid[i]));
    rep.max_boundary = std::max({rep.max_boundary, std::abs(at(i, 0)), std::abs(at(0, i))});
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double u = grid[i], v = grid[j], val = at(i, j);
      rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(val - at(j, i)));
      rep.max_frechet_excess = std::max({rep.max_frechet_excess, std::max(u + v - 1.0, 0.0) - val, val - std::min(u, v)});
      if (i > 0 && j > 0) {
        rep.min_rectangle = std::min(rep.min_rectangle, val - at(i - 1, j) - at(i, j - 1) + at(i - 1, j - 1));
      }
    }
  }
  rep.max_boundary = std::max(rep.max_boundary, std::abs(at(last, last) - 1.0));
  return rep;
}

}  // namespace kfdp

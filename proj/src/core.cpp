#include "kfdp/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace kfdp {

namespace {

using i128 = __int128;

std::int64_t floor_div(i128 a, i128 b) { return static_cast<std::int64_t>(a / b); }  // a, b >= 0

std::int64_t parse_int(std::string_view text) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("not an integer: '" + std::string(text) + "'");
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Fraction Fraction::make(std::int64_t num, std::int64_t den) {
  if (den <= 0 || num < 0) throw ConfigError("fraction needs num >= 0 and den > 0");
  const std::int64_t g = std::gcd(num, den);
  return num == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

bool operator<(const Fraction& a, const Fraction& b) {
  return static_cast<i128>(a.num) * b.den < static_cast<i128>(b.num) * a.den;
}

GammaRational::GammaRational(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw ConfigError("gamma denominator must be positive");
  if (num < 0 || num >= den) throw ConfigError("gamma must lie in [0, 1)");
  const std::int64_t g = std::gcd(num, den);
  num_ = num == 0 ? 0 : num / g;
  den_ = num == 0 ? 1 : den / g;
}

GammaRational GammaRational::from_double(double value) {
  if (!std::isfinite(value) || value < 0.0 || value >= 1.0) {
    throw ConfigError("gamma must lie in [0, 1)");
  }
  // Convergents h/k of the continued fraction of value.
  std::int64_t h_prev = 0, h = 1;
  std::int64_t k_prev = 1, k = 0;
  double x = value;
  for (int iter = 0; iter < 64; ++iter) {
    const double a_real = std::floor(x);
    const auto a = static_cast<std::int64_t>(a_real);
    const std::int64_t h_next = a * h + h_prev;
    const std::int64_t k_next = a * k + k_prev;
    h_prev = h;
    k_prev = k;
    h = h_next;
    k = k_next;
    if (std::abs(static_cast<double>(h) / static_cast<double>(k) - value) <= 1e-12) break;
    const double frac = x - a_real;
    if (frac <= 0.0) break;
    x = 1.0 / frac;
    if (k > 1'000'000'000'000LL) break;
  }
  if (h >= k) throw ConfigError("gamma rounds to 1");
  return GammaRational(h, k);
}

GammaRational GammaRational::parse(std::string_view text, bool* snapped) {
  text = trim(text);
  if (snapped) *snapped = false;
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return GammaRational(parse_int(trim(text.substr(0, slash))), parse_int(trim(text.substr(slash + 1))));
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("cannot parse gamma '" + std::string(text) + "'");
  }
  if (snapped) *snapped = true;
  return from_double(value);
}

std::string GammaRational::to_string() const {
  std::ostringstream out;
  out << num_ << '/' << den_;
  return out.str();
}

std::int64_t GammaRational::floor_times(std::int64_t i) const {
  if (i < 0) throw ConfigError("floor_times needs i >= 0");
  return floor_div(static_cast<i128>(num_) * i, den_);
}

std::int64_t GammaRational::floor_odds_times(std::int64_t j) const {
  if (j < 0) throw ConfigError("floor_odds_times needs j >= 0");
  // gamma / (1 - gamma) = num / (den - num)
  return floor_div(static_cast<i128>(num_) * j, den_ - num_);
}

CriticalConstants::CriticalConstants(std::vector<double> values, int k) : values_(std::move(values)), k_(k) {
  if (values_.empty()) throw ConfigError("critical constants must be nonempty");
  if (k_ < 1 || static_cast<std::size_t>(k_) > values_.size()) {
    throw ConfigError("k must satisfy 1 <= k <= n");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!(v > 0.0 && v < 1.0)) {
      std::ostringstream msg;
      msg << "critical constant alpha_" << (i + 1) << " = " << v << " is outside (0, 1)";
      throw ConfigError(msg.str());
    }
    if (i > 0 && v < values_[i - 1]) {
      std::ostringstream msg;
      msg << "critical constants must be nondecreasing (alpha_" << (i + 1) << " < alpha_" << i << ")";
      throw ConfigError(msg.str());
    }
  }
  for (int i = 0; i + 1 < k_; ++i) {
    if (values_[i] != values_[k_ - 1]) {
      throw ConfigError("the first k-1 critical constants must equal the k-th");
    }
  }
}

CriticalConstants CriticalConstants::flattened(std::vector<double> values, int k) {
  if (k >= 1 && static_cast<std::size_t>(k) <= values.size()) {
    for (int i = 0; i + 1 < k; ++i) values[i] = values[k - 1];
  }
  return CriticalConstants(std::move(values), k);
}

TruthLabels::TruthLabels(std::vector<bool> is_null) : is_null_(std::move(is_null)) {
  n0_ = static_cast<std::size_t>(std::count(is_null_.begin(), is_null_.end(), true));
}

TruthLabels TruthLabels::leading_nulls(std::size_t n, std::size_t n0) {
  if (n0 > n) throw ConfigError("n0 cannot exceed n");
  std::vector<bool> labels(n, false);
  for (std::size_t i = 0; i < n0; ++i) labels[i] = true;
  return TruthLabels(std::move(labels));
}

Fraction kfdp_value(std::int64_t v, std::int64_t r, int k) {
  if (r == 0 || v < k) return Fraction{0, 1};
  return Fraction::make(v, r);
}

Fraction kfdp_value(const RejectionResult& result, int k) {
  if (!result.counts) throw ConfigError("kFDP needs a result annotated with truth labels");
  return kfdp_value(result.counts->v, result.r, k);
}

bool exceeds_gamma(std::int64_t v, std::int64_t r, int k, const GammaRational& g) {
  if (v < k) return false;
  // V / R > num / den  <=>  V * den > num * R
  return static_cast<i128>(v) * g.den() > static_cast<i128>(g.num()) * r;
}

bool exceeds_gamma(const RejectionResult& result, int k, const GammaRational& g) {
  if (!result.counts) throw ConfigError("exceedance needs a result annotated with truth labels");
  return exceeds_gamma(result.counts->v, result.r, k, g);
}

}  // namespace kfdp

#pragma once

// Domain types shared by every module: the exact tolerance gamma, exact
// fractions for kFDP values, validated critical constants, truth labels and
// rejection results.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfdp/errors.hpp"

namespace kfdp {

/// Nonnegative fraction num/den in lowest terms. Used wherever a
/// comparison has to be exact (kFDP > gamma, floor evaluations).
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t num, std::int64_t den);

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(const Fraction&, const Fraction&) = default;
  friend bool operator<(const Fraction& a, const Fraction& b);
  friend bool operator>(const Fraction& a, const Fraction& b) { return b < a; }
  friend bool operator<=(const Fraction& a, const Fraction& b) { return !(b < a); }
  friend bool operator>=(const Fraction& a, const Fraction& b) { return !(a < b); }
};

/// The FDP tolerance gamma in [0, 1), held as a reduced rational so that
/// floor(gamma * i) and floor(gamma * j / (1 - gamma)) are exact.
class GammaRational {
 public:
  GammaRational() = default;
  GammaRational(std::int64_t num, std::int64_t den);

  /// Snap a floating value to the simplest rational within 1e-12
  /// (continued-fraction convergents).
  static GammaRational from_double(double value);

  /// Accepts "3/10" (exact) or a decimal such as "0.1" (snapped).
  /// `snapped` is set when the decimal path was taken.
  static GammaRational parse(std::string_view text, bool* snapped = nullptr);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double value() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  /// floor(gamma * i) for i >= 0.
  std::int64_t floor_times(std::int64_t i) const;
  /// floor(gamma * j / (1 - gamma)) for j >= 0.
  std::int64_t floor_odds_times(std::int64_t j) const;

  friend bool operator==(const GammaRational&, const GammaRational&) = default;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::int64_t floor_gamma_times(const GammaRational& g, std::int64_t i) { return g.floor_times(i); }

/// Nondecreasing thresholds alpha_1 <= ... <= alpha_n, each in (0, 1), with
/// the first k values equal to the k-th. Index 0 of values() is alpha_1.
class CriticalConstants {
 public:
  CriticalConstants(std::vector<double> values, int k = 1);

  std::size_t size() const { return values_.size(); }
  int k() const { return k_; }
  const std::vector<double>& values() const { return values_; }
  /// 1-based access, alpha_i.
  double at(std::size_t i) const { return values_.at(i - 1); }

  /// Replace alpha_1..alpha_{k-1} by alpha_k, then validate.
  static CriticalConstants flattened(std::vector<double> values, int k);

 private:
  std::vector<double> values_;
  int k_;
};

class TruthLabels {
 public:
  explicit TruthLabels(std::vector<bool> is_null);

  /// The first n0 hypotheses true nulls, the remaining ones false nulls.
  static TruthLabels leading_nulls(std::size_t n, std::size_t n0);

  std::size_t size() const { return is_null_.size(); }
  bool is_null(std::size_t index) const { return is_null_.at(index); }
  std::size_t n0() const { return n0_; }
  std::size_t n1() const { return is_null_.size() - n0_; }

 private:
  std::vector<bool> is_null_;
  std::size_t n0_;
};

struct RejectionCounts {
  std::int64_t v = 0;  // false rejections
  std::int64_t s = 0;  // true rejections
};

struct RejectionResult {
  std::vector<std::size_t> rejected;  // original indices, ascending
  std::int64_t r = 0;
  std::optional<RejectionCounts> counts;
};

/// kFDP = V/R when V >= k, else 0 (and 0 when R = 0).
Fraction kfdp_value(std::int64_t v, std::int64_t r, int k);
Fraction kfdp_value(const RejectionResult& result, int k);

/// kFDP > gamma, i.e. V > max(gamma R, k - 1), in integer arithmetic.
bool exceeds_gamma(std::int64_t v, std::int64_t r, int k, const GammaRational& g);
bool exceeds_gamma(const RejectionResult& result, int k, const GammaRational& g);

}  // namespace kfdp

#pragma once

// Stepdown / stepup execution over a p-value vector and a vector of
// critical constants.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kfdp/core.hpp"

namespace kfdp {

enum class Direction { step_down, step_up };

Direction parse_direction(std::string_view text);  // "sd" / "su"
std::string_view to_string(Direction d);

/// p-values in [0, 1] with their original positions. The sorted view is
/// stable: ties are ordered by original index.
class PValueVector {
 public:
  explicit PValueVector(std::vector<double> p);

  std::size_t size() const { return p_.size(); }
  const std::vector<double>& values() const { return p_; }
  double operator[](std::size_t i) const { return p_[i]; }

  /// order()[r] is the original index of the (r+1)-th smallest p-value.
  const std::vector<std::size_t>& order() const { return order_; }
  double sorted(std::size_t rank) const { return p_[order_[rank]]; }  // 0-based rank

 private:
  std::vector<double> p_;
  std::vector<std::size_t> order_;
};

/// Number of rejections only; the hot path used by the simulation harness.
/// `sorted_p` must be ascending and the same length as `c`.
std::size_t step_down_count(std::span<const double> sorted_p, std::span<const double> c);
std::size_t step_up_count(std::span<const double> sorted_p, std::span<const double> c);

RejectionResult step_down(const PValueVector& p, const CriticalConstants& c);
RejectionResult step_up(const PValueVector& p, const CriticalConstants& c);
RejectionResult run_procedure(Direction d, const PValueVector& p, const CriticalConstants& c);

/// Fill V and S from the rejected index set.
RejectionResult annotate_truth(RejectionResult result, const TruthLabels& labels);

}  // namespace kfdp

#include "kfdp/engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kfdp {

Direction parse_direction(std::string_view text) {
  if (text == "sd" || text == "stepdown" || text == "step_down") return Direction::step_down;
  if (text == "su" || text == "stepup" || text == "step_up") return Direction::step_up;
  throw ConfigError("unknown direction '" + std::string(text) + "' (expected sd or su)");
}

std::string_view to_string(Direction d) { return d == Direction::step_down ? "sd" : "su"; }

PValueVector::PValueVector(std::vector<double> p) : p_(std::move(p)), order_(p_.size()) {
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!(p_[i] >= 0.0 && p_[i] <= 1.0)) {
      std::ostringstream msg;
      msg << "p-value #" << (i + 1) << " = " << p_[i] << " is outside [0, 1]";
      throw ConfigError(msg.str());
    }
  }
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  std::stable_sort(order_.begin(), order_.end(), [this](std::size_t a, std::size_t b) { return p_[a] < p_[b]; });
}

std::size_t step_down_count(std::span<const double> sorted_p, std::span<const double> c) {
  std::size_t i = 0;
  while (i < sorted_p.size() && sorted_p[i] <= c[i]) ++i;
  return i;
}

std::size_t step_up_count(std::span<const double> sorted_p, std::span<const double> c) {
  for (std::size_t i = sorted_p.size(); i > 0; --i) {
    if (sorted_p[i - 1] <= c[i - 1]) return i;
  }
  return 0;
}

namespace {

void check_lengths(const PValueVector& p, const CriticalConstants& c) {
  if (p.size() != c.size()) {
    std::ostringstream msg;
    msg << "p-value count " << p.size() << " does not match critical-constant count " << c.size();
    throw ConfigError(msg.str());
  }
}

RejectionResult first_ranks(const PValueVector& p, std::size_t count) {
  RejectionResult out;
  out.rejected.assign(p.order().begin(), p.order().begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(out.rejected.begin(), out.rejected.end());
  out.r = static_cast<std::int64_t>(count);
  return out;
}

std::vector<double> sorted_values(const PValueVector& p) {
  std::vector<double> s(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) s[r] = p.sorted(r);
  return s;
}

}  // namespace

RejectionResult step_down(const PValueVector& p, const CriticalConstants& c) {
  check_lengths(p, c);
  return first_ranks(p, step_down_count(sorted_values(p), c.values()));
}

RejectionResult step_up(const PValueVector& p, const CriticalConstants& c) {
  check_lengths(p, c);
  return first_ranks(p, step_up_count(sorted_values(p), c.values()));
}

RejectionResult run_procedure(Direction d, const PValueVector& p, const CriticalConstants& c) {
  return d == Direction::step_down ? step_down(p, c) : step_up(p, c);
}

RejectionResult annotate_truth(RejectionResult result, const TruthLabels& labels) {
  RejectionCounts counts;
  for (std::size_t idx : result.rejected) {
    if (idx >= labels.size()) throw ConfigError("rejected index outside the truth labels");
    if (labels.is_null(idx)) {
      ++counts.v;
    } else {
      ++counts.s;
    }
  }
  result.counts = counts;
  return result;
}

}  // namespace kfdp

#pragma once

// Brute-force pointwise checks of the deterministic inequalities behind the
// constant families, exhaustive and randomized drivers over small
// instances, and literal-loop reference implementations of every constant.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfdp/constants.hpp"
#include "kfdp/core.hpp"
#include "kfdp/pairdist.hpp"

namespace kfdp {

/// At most 8 hypotheses.
struct SmallInstance {
  std::vector<double> p;
  std::vector<bool> is_null;
  std::vector<double> constants;  // nondecreasing, in (0, 1)
  GammaRational gamma;
  int k = 1;
  double alpha = 0.05;  // level of the reference LR constants in the containment check

  void validate() const;
  std::size_t n0() const;
};

struct CheckOutcome {
  bool ok = true;
  std::string detail;  // set on violation
};

/// Stepdown: I(V > max(gamma R, k-1)) <= sum_{i<=M} I(Ph_(i v k) <= a_{i v k + m(i)}, floor(gamma S/(1-gamma)) + 1 = i).
CheckOutcome check_stepdown_exceedance(const SmallInstance& inst);
/// Stepup: both inequalities bounding I(V > max(gamma R, k-1)) by the
/// stepup count on the nulls with constants a_{m~(i)}, in exact arithmetic.
CheckOutcome check_stepup_exceedance(const SmallInstance& inst);
/// i I(Ph_(i) <= t) <= #{j : Ph_j <= t} for every i and every threshold in the instance.
CheckOutcome check_markov_order_stat(const SmallInstance& inst);
/// i (i-1) I(Ph_(i) <= t) <= c (c-1), c = #{j : Ph_j <= t}, for 2 <= i <= n0.
CheckOutcome check_pairwise_order_stat(const SmallInstance& inst);
/// For the LR constants at inst.alpha, both directions: V >= floor(gamma R) + 1
/// implies Ph_(v) <= v alpha / n0 for some v.
CheckOutcome check_simes_containment(const SmallInstance& inst);

/// floor(gamma (i + m(i))) + 1 = i for i in [1, M]; requires gamma <= 1/2.
CheckOutcome check_index_identity(std::int64_t n, std::int64_t n0, const GammaRational& g);
/// floor(gamma m~(i)) + 1 <= i for i in [1, n0].
CheckOutcome check_index_bound(std::int64_t n, std::int64_t n0, const GammaRational& g);

struct CheckTally {
  std::string name;
  std::uint64_t instances = 0;
  std::uint64_t violations = 0;
  std::string first_failure;  // first violation in instance order

  bool passed() const { return violations == 0; }
};

/// The five pointwise checks above, in a fixed order.
std::vector<CheckTally> run_exhaustive_lemmas(int max_n = 4);
std::vector<CheckTally> run_fuzz_lemmas(std::uint64_t count, std::uint64_t seed, int max_n = 8);

/// Lattice 0.01 + 0.07 j, j = 0..14.
std::vector<double> pvalue_lattice();

struct NaiveParams {
  std::size_t n = 10;
  GammaRational gamma{1, 10};
  int k = 1;
  double alpha = 0.05;
  TemplateKind template_kind = TemplateKind::lr;
  std::optional<PairwiseNullF> pairwise;
  double beta = 0.05;  // template level for thm37 / thm38
};

struct NaiveResult {
  double scaling = 0.0;           // C, or C3(beta) for thm37 / thm38, alpha for lr
  std::vector<double> constants;  // alpha_1..alpha_n
};

/// Literal loops over the defining formulas; shares no code with the
/// constants module.
NaiveResult naive_constants(Family family, const NaiveParams& params);

struct SuiteRow {
  std::string check;
  std::uint64_t instances = 0;
  std::uint64_t violations = 0;
  std::string detail;

  bool passed() const { return violations == 0; }
};

/// "lemmas" | "constants" | "pairdist" | "all".
std::vector<SuiteRow> run_verify_suite(std::string_view suite, std::uint64_t fuzz_count, std::uint64_t seed);

}  // namespace kfdp

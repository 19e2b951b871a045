#pragma once

// Critical-constant families: base templates, the index maps linking
// rejection counts to constant indices, the worst-case rescaling constants,
// the pairwise-aware LR constants and the beta-calibrated families.
//
// Template vectors are 1-based: element 0 is alpha'_0 = 0 and element i is
// alpha'_i for i = 1..n.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kfdp/core.hpp"
#include "kfdp/engine.hpp"
#include "kfdp/pairdist.hpp"

namespace kfdp {

enum class TemplateKind { lr, bh, gbs, custom };

TemplateKind parse_template_kind(std::string_view text);  // "lr" | "bh" | "gbs"
std::string_view to_string(TemplateKind kind);

/// A family of nondecreasing constant vectors alpha'_i(beta) indexed by a
/// level beta in (0, 1).
class Template {
 public:
  static Template lr(std::size_t n, const GammaRational& g);
  static Template bh(std::size_t n);
  static Template gbs(std::size_t n);
  /// alpha'_i(beta) = beta * unit[i-1]; unit must be nondecreasing and positive.
  static Template custom(std::vector<double> unit);
  static Template of_kind(TemplateKind kind, std::size_t n, const GammaRational& g);

  TemplateKind kind() const { return kind_; }
  std::size_t n() const { return n_; }
  /// Size n + 1, values()[0] = 0.
  std::vector<double> values(double beta) const;

 private:
  Template(TemplateKind kind, std::size_t n, GammaRational g, std::vector<double> unit)
      : kind_(kind), n_(n), g_(g), unit_(std::move(unit)) {}

  TemplateKind kind_;
  std::size_t n_;
  GammaRational g_;
  std::vector<double> unit_;
};

/// (floor(gamma i) + 1) beta / (n + floor(gamma i) + 1 - i); size n + 1 with a leading 0.
std::vector<double> lr_template(std::size_t n, const GammaRational& g, double beta);

/// The stepwise constants controlling gamma-FDP under positive dependence (k = 1).
CriticalConstants lr_constants(std::size_t n, const GammaRational& g, double alpha);

/// Index maps for one (n, n0, gamma, k). Every array is indexed from 0.
///   m, m_bar:        i = 0..M
///   m_star, m_tilde: i = 0..n0
struct IndexMaps {
  std::int64_t n = 0;
  std::int64_t n0 = 0;
  std::int64_t n1 = 0;
  int k = 1;
  std::int64_t big_m = 0;
  std::vector<std::int64_t> m;
  std::vector<std::int64_t> m_star;
  std::vector<std::int64_t> m_tilde;
  std::vector<std::int64_t> m_bar;
};

/// Requires 1 <= k <= n0 <= n.
IndexMaps index_maps(std::int64_t n, std::int64_t n0, const GammaRational& g, int k);

/// Restricts the worst case over n0 to [k, n0_max] when set.
struct ScanOptions {
  std::optional<std::int64_t> n0_max;
};

/// Value of a max-over-n0 functional. chosen_k[n0 - k] is the minimizing K
/// for the min-over-K functionals and is empty otherwise.
struct ScanResult {
  double value = 0.0;
  std::int64_t argmax_n0 = 0;
  std::vector<std::int64_t> chosen_k;
};

// Raw functionals over a template vector `a` (size n + 1, a[0] = 0).
ScanResult scan_c1_sd(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt = {});
ScanResult scan_c1_su(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt = {});
ScanResult scan_c2_sd(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt = {});
ScanResult scan_c2_su(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt = {});
ScanResult scan_c_pairwise_lr(std::size_t n, int k, double alpha, const PairwiseNullF& f, const ScanOptions& opt = {});
ScanResult scan_c3_sd(const std::vector<double>& a, const GammaRational& g, int k, const PairwiseNullF& f,
                      const ScanOptions& opt = {});
ScanResult scan_c3_su(const std::vector<double>& a, const GammaRational& g, int k, const PairwiseNullF& f,
                      const ScanOptions& opt = {});

struct ConstantsReport {
  CriticalConstants constants;
  double scaling = 0.0;                  // C at the solution (alpha itself for the plain LR family)
  std::optional<std::int64_t> argmax_n0; // maximizing n0
  std::vector<std::int64_t> chosen_k;    // minimizing K per n0, calibrated families only
  std::optional<double> beta_star;
};

// Rescaled families: template evaluated at level alpha, alpha_i = alpha * a_{i v k} / C.
ConstantsReport c1_sd(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt = {});
ConstantsReport c1_su(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt = {});
ConstantsReport c2_sd(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt = {});
ConstantsReport c2_su(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt = {});

/// LR constants divided by min(C, 1), first k - 1 flattened. Requires 2 <= k <= n.
ConstantsReport c_pairwise_lr(std::size_t n, const GammaRational& g, int k, double alpha, const PairwiseNullF& f,
                              const ScanOptions& opt = {});

/// C3 evaluated at one beta, template rebuilt at that level.
ScanResult c3_sd(const Template& t, double beta, const GammaRational& g, int k, const PairwiseNullF& f,
                 const ScanOptions& opt = {});
ScanResult c3_su(const Template& t, double beta, const GammaRational& g, int k, const PairwiseNullF& f,
                 const ScanOptions& opt = {});

struct CalibrationResult {
  double beta = 0.0;
  double value = 0.0;  // functional at beta
  int evaluations = 0;
};

/// Bisection for functional(beta) = target on [1e-12, 1 - 1e-12]; stops at
/// |C - target| <= 1e-9 or bracket width <= 1e-12. Throws NumericError if
/// there is no sign change or if the visited points are not monotone.
CalibrationResult calibrate_beta(const std::function<double(double)>& functional, double target);

/// Calibrated families: alpha_i = a_{i v k}(beta*) with C3(beta*) = alpha.
ConstantsReport c3_sd_calibrated(const Template& t, const GammaRational& g, int k, double alpha,
                                 const PairwiseNullF& f, const ScanOptions& opt = {});
ConstantsReport c3_su_calibrated(const Template& t, const GammaRational& g, int k, double alpha,
                                 const PairwiseNullF& f, const ScanOptions& opt = {});

enum class Family { lr, thm32, thm33, thm34, thm35, thm36, thm37, thm38 };

Family parse_family(std::string_view text);
std::string_view to_string(Family f);
bool needs_pairwise(Family f);
/// The stepping direction each family is proved for; lr and thm34 allow both.
std::optional<Direction> fixed_direction(Family f);

struct ProcedureSpec {
  Family family = Family::lr;
  Direction direction = Direction::step_down;
  int k = 1;
  GammaRational gamma;
  double alpha = 0.05;
  TemplateKind template_kind = TemplateKind::lr;
  std::vector<double> custom_template;  // unit vector when template_kind == custom
  std::optional<PairwiseNullF> pairwise;
  ScanOptions scan;
};

/// Validates the family / direction / k / F combination, throwing ConfigError.
void validate(const ProcedureSpec& spec, std::size_t n);

ConstantsReport build_constants(const ProcedureSpec& spec, std::size_t n);

}  // namespace kfdp

#pragma once

// Monte Carlo harness for the normal means model: correlated z-statistics,
// two-sided p-values, stepwise procedures and error-rate / power estimates.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "kfdp/constants.hpp"
#include "kfdp/core.hpp"
#include "kfdp/engine.hpp"

namespace kfdp {

struct DependenceModel {
  enum class Kind { uniform, block, ar1 };

  Kind kind = Kind::uniform;
  double rho = 0.0;
  std::size_t block_size = 0;  // block only

  static DependenceModel uniform(double rho);
  static DependenceModel block(double rho, std::size_t block_size);
  static DependenceModel ar1(double rho);
  /// "uniform" | "block:<s>" | "ar1", with the given rho.
  static DependenceModel parse(std::string_view text, double rho);

  std::string name() const;
  /// Throws ConfigError for rho outside [0, 1) or a block size not dividing n.
  void validate(std::size_t n) const;
  /// Dense correlation matrix Gamma.
  Eigen::MatrixXd correlation(std::size_t n) const;
};

/// Engine for replication `rep` under `seed`; a pure function of the pair.
std::mt19937_64 rep_stream(std::uint64_t seed, std::uint64_t rep);

/// z = mu + correlated N(0, Gamma) noise via the factor or recursive form of the model.
void generate_sample(const DependenceModel& model, std::span<const double> mu, std::mt19937_64& rng,
                     std::vector<double>& z);
std::vector<double> generate_sample(const DependenceModel& model, std::span<const double> mu, std::mt19937_64& rng);

/// Sampler for an arbitrary correlation matrix via its Cholesky factor.
class CholeskySampler {
 public:
  explicit CholeskySampler(const Eigen::MatrixXd& gamma);
  std::vector<double> sample(std::span<const double> mu, std::mt19937_64& rng) const;
  std::size_t size() const { return static_cast<std::size_t>(lower_.rows()); }

 private:
  Eigen::MatrixXd lower_;
};

/// P_i = 2 (1 - Phi(|z_i|)).
PValueVector two_sided_pvalues(std::span<const double> z);

/// A stepwise procedure with its precomputed constants.
struct Procedure {
  std::string name;
  Direction direction = Direction::step_down;
  CriticalConstants constants;
};

/// lr-sd, lr-su, thm32, thm33, thm34-sd, thm34-su, thm35 .. thm38.
std::vector<std::string_view> procedure_names();
/// Spec for a procedure name; pairwise families use the two-sided
/// equicorrelated F at `rho` and require the uniform model.
ProcedureSpec procedure_spec(std::string_view name, const GammaRational& g, int k, double alpha,
                             const DependenceModel& model);

struct MonteCarloConfig {
  std::size_t n = 100;
  double pi0 = 1.0;
  double effect = 3.1622776601683795;  // sqrt(10)
  std::size_t reps = 2000;
  std::uint64_t seed = 20240101;
  double alpha = 0.05;
  GammaRational gamma{1, 10};
  int k = 1;
  DependenceModel model;
  unsigned threads = 0;     // 0: KFDP_THREADS or hardware concurrency
  bool keep_trace = false;  // per-rep (R, V, S)

  std::size_t n0() const;
  std::size_t n1() const { return n - n0(); }
  void validate() const;
};

struct RepOutcome {
  std::int32_t r = 0;
  std::int32_t v = 0;
  std::int32_t s = 0;
};

struct MonteCarloReport {
  std::string procedure;
  double exceedance = 0.0;  // fraction of reps with kFDP > gamma
  std::optional<double> exceedance_se;
  std::optional<double> power;  // mean S / n1; absent when n1 = 0
  std::optional<double> power_se;
  double mean_rejections = 0.0;
  std::size_t reps = 0;
  std::size_t n0 = 0;
  std::size_t n1 = 0;
  std::vector<RepOutcome> trace;
};

/// Worker count: explicit value, else KFDP_THREADS, else hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs every procedure on the same replications (common random numbers).
std::vector<MonteCarloReport> run_cell(const MonteCarloConfig& config, const std::vector<Procedure>& procedures);

/// Single procedure; constants built from the spec once.
MonteCarloReport run_monte_carlo(const MonteCarloConfig& config, const ProcedureSpec& spec);

/// Mean and standard error of a per-rep difference of power between two
/// traced reports of the same cell (a - b).
struct PairedDifference {
  double mean = 0.0;
  std::optional<double> se;
};
PairedDifference paired_power_difference(const MonteCarloReport& a, const MonteCarloReport& b);

struct GridSweep {
  std::vector<std::string> procedures;
  std::vector<double> rhos;
  std::vector<double> pi0s;
  std::vector<GammaRational> gammas;
  std::vector<int> ks;
};

struct GridRow {
  double rho = 0.0;
  double pi0 = 0.0;
  GammaRational gamma;
  int k = 1;
  MonteCarloReport report;
};

/// Cartesian sweep; one row per (rho, pi0, gamma, k, procedure), procedures
/// within a cell sharing replications. `base.model` supplies the kind and
/// block size, the sweep supplies rho.
std::vector<GridRow> run_grid(const MonteCarloConfig& base, const GridSweep& sweep);

/// Sum in a fixed pairwise tree order.
double pairwise_sum(std::span<const double> x);

}  // namespace kfdp

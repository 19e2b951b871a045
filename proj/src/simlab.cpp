#include "kfdp/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

#include "kfdp/errors.hpp"
#include "kfdp/normal.hpp"
#include "kfdp/pairdist.hpp"

namespace kfdp {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

DependenceModel DependenceModel::uniform(double rho) { return {Kind::uniform, rho, 0}; }

DependenceModel DependenceModel::block(double rho, std::size_t block_size) {
  if (block_size == 0) throw ConfigError("block size must be positive");
  return {Kind::block, rho, block_size};
}

DependenceModel DependenceModel::ar1(double rho) { return {Kind::ar1, rho, 0}; }

DependenceModel DependenceModel::parse(std::string_view text, double rho) {
  if (text == "uniform") return uniform(rho);
  if (text == "ar1") return ar1(rho);
  if (text.starts_with("block:")) {
    const std::string digits(text.substr(6));
    std::size_t used = 0;
    unsigned long s = 0;
    try {
      s = std::stoul(digits, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != digits.size() || s == 0) {
      throw ConfigError("block dependence needs a positive size, e.g. block:10");
    }
    return block(rho, s);
  }
  throw ConfigError("unknown dependence '" + std::string(text) + "' (expected uniform, block:<s> or ar1)");
}

std::string DependenceModel::name() const {
  switch (kind) {
    case Kind::uniform: return "uniform";
    case Kind::block: return "block:" + std::to_string(block_size);
    case Kind::ar1: return "ar1";
  }
  return "?";
}

void DependenceModel::validate(std::size_t n) const {
  if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("correlation rho must lie in [0, 1)");
  if (kind == Kind::block && (block_size == 0 || n % block_size != 0)) {
    std::ostringstream msg;
    msg << "block size " << block_size << " does not divide n = " << n;
    throw ConfigError(msg.str());
  }
}

Eigen::MatrixXd DependenceModel::correlation(std::size_t n) const {
  validate(n);
  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(nn, nn);
  for (Eigen::Index i = 0; i < nn; ++i) {
    for (Eigen::Index j = 0; j < nn; ++j) {
      if (i == j) continue;
      switch (kind) {
        case Kind::uniform: g(i, j) = rho; break;
        case Kind::block:
          if (i / static_cast<Eigen::Index>(block_size) == j / static_cast<Eigen::Index>(block_size)) g(i, j) = rho;
          break;
        case Kind::ar1: g(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j))); break;
      }
    }
  }
  return g;
}

std::mt19937_64 rep_stream(std::uint64_t seed, std::uint64_t rep) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(rep + 0x632BE59BD9B4E019ULL)));
}

void generate_sample(const DependenceModel& model, std::span<const double> mu, std::mt19937_64& rng,
                     std::vector<double>& z) {
  const std::size_t n = mu.size();
  model.validate(n);
  std::normal_distribution<double> norm;
  z.resize(n);
  const double rho = model.rho;
  switch (model.kind) {
    case DependenceModel::Kind::uniform: {
      const double common = std::sqrt(rho) * norm(rng);
      const double own = std::sqrt(1.0 - rho);
      for (std::size_t i = 0; i < n; ++i) z[i] = common + own * norm(rng) + mu[i];
      break;
    }
    case DependenceModel::Kind::block: {
      const double load = std::sqrt(rho), own = std::sqrt(1.0 - rho);
      double common = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (i % model.block_size == 0) common = load * norm(rng);
        z[i] = common + own * norm(rng) + mu[i];
      }
      break;
    }
    case DependenceModel::Kind::ar1: {
      const double innov = std::sqrt(1.0 - rho * rho);
      double prev = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        prev = (i == 0) ? norm(rng) : rho * prev + innov * norm(rng);
        z[i] = prev + mu[i];
      }
      break;
    }
  }
}

std::vector<double> generate_sample(const DependenceModel& model, std::span<const double> mu, std::mt19937_64& rng) {
  std::vector<double> z;
  generate_sample(model, mu, rng, z);
  return z;
}

CholeskySampler::CholeskySampler(const Eigen::MatrixXd& gamma) {
  if (gamma.rows() != gamma.cols() || gamma.rows() == 0) throw ConfigError("correlation matrix must be square");
  Eigen::LLT<Eigen::MatrixXd> llt(gamma);
  if (llt.info() != Eigen::Success) throw ConfigError("correlation matrix is not positive definite");
  lower_ = llt.matrixL();
}

std::vector<double> CholeskySampler::sample(std::span<const double> mu, std::mt19937_64& rng) const {
  if (mu.size() != size()) throw ConfigError("mean vector length does not match the correlation matrix");
  std::normal_distribution<double> norm;
  Eigen::VectorXd e(lower_.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = norm(rng);
  const Eigen::VectorXd x = lower_.triangularView<Eigen::Lower>() * e;
  std::vector<double> z(mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = x[static_cast<Eigen::Index>(i)] + mu[i];
  return z;
}

PValueVector two_sided_pvalues(std::span<const double> z) {
  std::vector<double> p(z.size());
  std::transform(z.begin(), z.end(), p.begin(), two_sided_pvalue);
  return PValueVector(std::move(p));
}

std::vector<std::string_view> procedure_names() {
  return {"lr-sd", "lr-su", "thm32", "thm33", "thm34-sd", "thm34-su", "thm35", "thm36", "thm37", "thm38"};
}

ProcedureSpec procedure_spec(std::string_view name, const GammaRational& g, int k, double alpha,
                             const DependenceModel& model) {
  ProcedureSpec spec;
  spec.gamma = g;
  spec.k = k;
  spec.alpha = alpha;
  if (name == "lr-sd" || name == "lr-su") {
    spec.family = Family::lr;
    spec.direction = name == "lr-sd" ? Direction::step_down : Direction::step_up;
  } else if (name == "thm34-sd" || name == "thm34-su") {
    spec.family = Family::thm34;
    spec.direction = name == "thm34-sd" ? Direction::step_down : Direction::step_up;
  } else {
    spec.family = parse_family(name);
    if (spec.family == Family::lr || spec.family == Family::thm34) {
      throw ConfigError("procedure '" + std::string(name) + "' needs a direction suffix (-sd or -su)");
    }
    spec.direction = *fixed_direction(spec.family);
  }
  if (needs_pairwise(spec.family)) {
    if (model.kind != DependenceModel::Kind::uniform) {
      throw ConfigError("procedure '" + std::string(name) +
                        "' uses a common pairwise null distribution and runs under uniform dependence only");
    }
    spec.pairwise = PairwiseNullF::equicorrelated_normal(model.rho);
  }
  return spec;
}

std::size_t MonteCarloConfig::n0() const {
  return static_cast<std::size_t>(std::llround(pi0 * static_cast<double>(n)));
}

void MonteCarloConfig::validate() const {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (!(pi0 >= 0.0 && pi0 <= 1.0)) throw ConfigError("pi0 must lie in [0, 1]");
  if (std::abs(pi0 * static_cast<double>(n) - static_cast<double>(n0())) > 1e-9) {
    throw ConfigError("pi0 * n must be an integer");
  }
  if (reps < 1) throw ConfigError("reps must be at least 1");
  if (!std::isfinite(effect)) throw ConfigError("effect size must be finite");
  if (k < 1) throw ConfigError("k must be at least 1");
  model.validate(n);
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("KFDP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

namespace {

struct MeanSe {
  double mean = 0.0;
  std::optional<double> se;
};

MeanSe sample_mean_se(const std::vector<double>& x) {
  MeanSe out;
  const double m = static_cast<double>(x.size());
  out.mean = pairwise_sum(x) / m;
  if (x.size() >= 2) {
    std::vector<double> sq(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) sq[i] = (x[i] - out.mean) * (x[i] - out.mean);
    out.se = std::sqrt(pairwise_sum(sq) / (m - 1.0) / m);
  }
  return out;
}

// One replication: p-values sorted ascending with their null flags.
struct RepWork {
  std::vector<double> mu, z, p, sorted;
  std::vector<std::size_t> order;
  std::vector<std::int32_t> null_prefix;  // nulls among the first r sorted p-values
};

}  // namespace

std::vector<MonteCarloReport> run_cell(const MonteCarloConfig& config, const std::vector<Procedure>& procedures) {
  config.validate();
  if (procedures.empty()) throw ConfigError("no procedures to run");
  for (const auto& proc : procedures) {
    if (proc.constants.size() != config.n) throw ConfigError("procedure '" + proc.name + "' has the wrong length");
  }
  const std::size_t n = config.n, n0 = config.n0(), reps = config.reps, np = procedures.size();
  std::vector<RepOutcome> outcomes(np * reps);

  const auto work_range = [&](std::size_t begin, std::size_t end) {
    RepWork w;
    w.mu.assign(n, 0.0);
    for (std::size_t i = n0; i < n; ++i) w.mu[i] = config.effect;
    w.p.resize(n);
    w.sorted.resize(n);
    w.order.resize(n);
    w.null_prefix.resize(n + 1);
    for (std::size_t rep = begin; rep < end; ++rep) {
      std::mt19937_64 rng = rep_stream(config.seed, rep);
      generate_sample(config.model, w.mu, rng, w.z);
      for (std::size_t i = 0; i < n; ++i) w.p[i] = two_sided_pvalue(w.z[i]);
      std::iota(w.order.begin(), w.order.end(), std::size_t{0});
      std::stable_sort(w.order.begin(), w.order.end(), [&](std::size_t a, std::size_t b) { return w.p[a] < w.p[b]; });
      w.null_prefix[0] = 0;
      for (std::size_t r = 0; r < n; ++r) {
        w.sorted[r] = w.p[w.order[r]];
        w.null_prefix[r + 1] = w.null_prefix[r] + (w.order[r] < n0 ? 1 : 0);
      }
      for (std::size_t j = 0; j < np; ++j) {
        const auto& proc = procedures[j];
        const std::size_t r = proc.direction == Direction::step_down ? step_down_count(w.sorted, proc.constants.values())
                                                                     : step_up_count(w.sorted, proc.constants.values());
        RepOutcome& o = outcomes[j * reps + rep];
        o.r = static_cast<std::int32_t>(r);
        o.v = w.null_prefix[r];
        o.s = o.r - o.v;
      }
    }
  };

  const unsigned threads = std::min<std::size_t>(resolve_threads(config.threads), reps);
  if (threads <= 1) {
    work_range(0, reps);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (reps + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(reps, b + chunk);
      if (b < e) pool.emplace_back(work_range, b, e);
    }
    for (auto& th : pool) th.join();
  }

  std::vector<MonteCarloReport> reports;
  reports.reserve(np);
  const std::size_t n1 = n - n0;
  std::vector<double> ind(reps), pow(reps), rej(reps);
  for (std::size_t j = 0; j < np; ++j) {
    MonteCarloReport rep;
    rep.procedure = procedures[j].name;
    rep.reps = reps;
    rep.n0 = n0;
    rep.n1 = n1;
    for (std::size_t r = 0; r < reps; ++r) {
      const RepOutcome& o = outcomes[j * reps + r];
      ind[r] = exceeds_gamma(o.v, o.r, config.k, config.gamma) ? 1.0 : 0.0;
      pow[r] = n1 > 0 ? static_cast<double>(o.s) / static_cast<double>(n1) : 0.0;
      rej[r] = static_cast<double>(o.r);
    }
    const double m = static_cast<double>(reps);
    rep.exceedance = pairwise_sum(ind) / m;
    if (reps >= 2) rep.exceedance_se = std::sqrt(rep.exceedance * (1.0 - rep.exceedance) / m);
    if (n1 > 0) {
      const MeanSe ps = sample_mean_se(pow);
      rep.power = ps.mean;
      rep.power_se = ps.se;
    }
    rep.mean_rejections = pairwise_sum(rej) / m;
    if (config.keep_trace) {
      rep.trace.assign(outcomes.begin() + static_cast<std::ptrdiff_t>(j * reps),
                       outcomes.begin() + static_cast<std::ptrdiff_t>((j + 1) * reps));
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

MonteCarloReport run_monte_carlo(const MonteCarloConfig& config, const ProcedureSpec& spec) {
  config.validate();
  ConstantsReport cr = build_constants(spec, config.n);
  std::string name(to_string(spec.family));
  if (!fixed_direction(spec.family)) name += spec.direction == Direction::step_down ? "-sd" : "-su";
  std::vector<Procedure> procs{Procedure{name, spec.direction, std::move(cr.constants)}};
  MonteCarloConfig cfg = config;
  cfg.gamma = spec.gamma;
  cfg.k = spec.k;
  return run_cell(cfg, procs).front();
}

PairedDifference paired_power_difference(const MonteCarloReport& a, const MonteCarloReport& b) {
  if (a.trace.empty() || a.trace.size() != b.trace.size()) {
    throw ConfigError("paired comparison needs traced reports over the same replications");
  }
  if (a.n1 == 0 || a.n1 != b.n1) throw ConfigError("paired power comparison needs the same positive n1");
  std::vector<double> d(a.trace.size());
  const double n1 = static_cast<double>(a.n1);
  for (std::size_t r = 0; r < d.size(); ++r) d[r] = static_cast<double>(a.trace[r].s - b.trace[r].s) / n1;
  const MeanSe ms = sample_mean_se(d);
  return PairedDifference{ms.mean, ms.se};
}

std::vector<GridRow> run_grid(const MonteCarloConfig& base, const GridSweep& sweep) {
  if (sweep.procedures.empty()) throw ConfigError("grid sweep has no procedures");
  const std::vector<double> rhos = sweep.rhos.empty() ? std::vector<double>{base.model.rho} : sweep.rhos;
  const std::vector<double> pi0s = sweep.pi0s.empty() ? std::vector<double>{base.pi0} : sweep.pi0s;
  const std::vector<GammaRational> gammas = sweep.gammas.empty() ? std::vector<GammaRational>{base.gamma} : sweep.gammas;
  const std::vector<int> ks = sweep.ks.empty() ? std::vector<int>{base.k} : sweep.ks;

  std::vector<GridRow> rows;
  for (const GammaRational& g : gammas) {
    for (int k : ks) {
      for (double rho : rhos) {
        DependenceModel model = base.model;
        model.rho = rho;
        model.validate(base.n);
        // Constants do not depend on pi0; build them once per (gamma, k, rho).
        std::vector<Procedure> procs;
        for (const std::string& name : sweep.procedures) {
          const ProcedureSpec spec = procedure_spec(name, g, k, base.alpha, model);
          procs.push_back(Procedure{name, spec.direction, build_constants(spec, base.n).constants});
        }
        for (double pi0 : pi0s) {
          MonteCarloConfig cfg = base;
          cfg.model = model;
          cfg.pi0 = pi0;
          cfg.gamma = g;
          cfg.k = k;
          for (MonteCarloReport& rep : run_cell(cfg, procs)) {
            rows.push_back(GridRow{rho, pi0, g, k, std::move(rep)});
          }
        }
      }
    }
  }
  return rows;
}

}  // namespace kfdp

#include "kfdp/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "kfdp/engine.hpp"
#include "kfdp/errors.hpp"
#include "kfdp/normal.hpp"

namespace kfdp {

namespace {

constexpr int kMaxN = 8;

// Flat copy of an instance. c is 1-based, c[0] = 0.
struct Work {
  int n = 0;
  int n0 = 0;
  std::array<double, kMaxN> p{};
  std::array<bool, kMaxN> null{};
  std::array<double, kMaxN + 1> c{};
  GammaRational g;
  int k = 1;
  double alpha = 0.05;

  // Derived by prepare().
  std::array<int, kMaxN> order{};       // all hypotheses by (p, index)
  std::array<double, kMaxN> sorted{};   // p in that order
  std::array<double, kMaxN> hat{};      // null p-values ascending, hat[0] = Ph_(1)
};

void prepare(Work& w) {
  for (int i = 0; i < w.n; ++i) w.order[i] = i;
  for (int i = 1; i < w.n; ++i) {
    const int cur = w.order[i];
    int j = i - 1;
    while (j >= 0 && w.p[w.order[j]] > w.p[cur]) {
      w.order[j + 1] = w.order[j];
      --j;
    }
    w.order[j + 1] = cur;
  }
  int h = 0;
  for (int r = 0; r < w.n; ++r) {
    w.sorted[r] = w.p[w.order[r]];
    if (w.null[w.order[r]]) w.hat[h++] = w.sorted[r];
  }
  w.n0 = h;
}

struct Counts {
  int r = 0, v = 0, s = 0;
};

Counts run(const Work& w, Direction d, const double* c1) {
  const std::span<const double> sp(w.sorted.data(), static_cast<std::size_t>(w.n));
  const std::span<const double> cp(c1, static_cast<std::size_t>(w.n));
  Counts out;
  out.r = static_cast<int>(d == Direction::step_down ? step_down_count(sp, cp) : step_up_count(sp, cp));
  for (int i = 0; i < out.r; ++i) out.v += w.null[w.order[i]] ? 1 : 0;
  out.s = out.r - out.v;
  return out;
}

// Reference maps written from their definitions, independent of the constants module.
std::int64_t odds_floor(const GammaRational& g, std::int64_t j) { return (g.num() * j) / (g.den() - g.num()); }
std::int64_t plain_floor(const GammaRational& g, std::int64_t j) { return (g.num() * j) / g.den(); }

std::int64_t ref_big_m(std::int64_t n, std::int64_t n0, const GammaRational& g) {
  return std::min(n0, odds_floor(g, n - n0) + 1);
}

std::int64_t ref_m(std::int64_t n, std::int64_t n0, const GammaRational& g, std::int64_t i) {
  if (i == 0) return 0;
  std::int64_t best = 0;
  for (std::int64_t j = 0; j <= n - n0; ++j) {
    if (odds_floor(g, j) + 1 <= i) best = j;
  }
  return best;
}

std::int64_t ref_m_star(std::int64_t n, const GammaRational& g, std::int64_t i) {
  if (i == 0) return 0;
  std::int64_t best = 0;
  for (std::int64_t j = 1; j <= n; ++j) {
    if (plain_floor(g, j) + 1 <= i) best = j;
  }
  return best;
}

std::int64_t ref_m_tilde(std::int64_t n, std::int64_t n0, const GammaRational& g, std::int64_t i) {
  if (i == 0) return 0;
  return std::min(ref_m_star(n, g, i), i + (n - n0));
}

std::string describe(const Work& w) {
  std::ostringstream out;
  out.precision(17);
  out << "p=[";
  for (int i = 0; i < w.n; ++i) out << (i ? "," : "") << w.p[i] << (w.null[i] ? "*" : "");
  out << "] c=[";
  for (int i = 1; i <= w.n; ++i) out << (i > 1 ? "," : "") << w.c[i];
  out << "] gamma=" << w.g.to_string() << " k=" << w.k << " alpha=" << w.alpha;
  return out.str();
}

bool lemma_sd(const Work& w) {
  const Counts c = run(w, Direction::step_down, &w.c[1]);
  const bool lhs = exceeds_gamma(c.v, c.r, w.k, w.g);
  if (w.k > w.n0) return !lhs;
  const std::int64_t big_m = ref_big_m(w.n, w.n0, w.g);
  const std::int64_t s_idx = odds_floor(w.g, c.s) + 1;
  int rhs = 0;
  for (std::int64_t i = 1; i <= big_m; ++i) {
    const std::int64_t ik = std::max<std::int64_t>(i, w.k);
    if (w.hat[ik - 1] <= w.c[ik + ref_m(w.n, w.n0, w.g, i)] && s_idx == i) ++rhs;
  }
  return (lhs ? 1 : 0) <= rhs;
}

std::int64_t lcm_upto(int m) {
  std::int64_t l = 1;
  for (int i = 2; i <= m; ++i) l = std::lcm(l, static_cast<std::int64_t>(i));
  return l;
}

bool lemma_su(const Work& w) {
  const Counts c = run(w, Direction::step_up, &w.c[1]);
  const bool lhs = exceeds_gamma(c.v, c.r, w.k, w.g);
  if (w.k > w.n0) return !lhs;
  const int n0 = w.n0;
  std::array<double, kMaxN + 1> ct{};  // ct[i] = c_{m~(i)}, 1-based
  for (int i = 1; i <= n0; ++i) ct[i] = w.c[ref_m_tilde(w.n, n0, w.g, i)];
  int r2 = 0;
  for (int i = n0; i >= 1; --i) {
    if (w.hat[i - 1] <= ct[i]) {
      r2 = i;
      break;
    }
  }
  // Both right-hand sides scaled by lcm(1..n0) so every term is an integer.
  const std::int64_t scale = lcm_upto(n0);
  std::int64_t rhs1 = 0, rhs2 = 0;
  for (int j = 0; j < n0; ++j) {
    const double pj = w.hat[j];
    for (int i = w.k; i <= n0; ++i) {
      if (pj <= ct[i] && r2 == i) rhs1 += scale / i;
    }
    if (pj <= ct[w.k] && r2 >= w.k) rhs2 += scale / w.k;
    for (int i = w.k + 1; i <= n0; ++i) {
      if (ct[i - 1] < pj && pj <= ct[i] && r2 >= i) rhs2 += scale / i;
    }
  }
  return (lhs ? scale : 0) <= rhs1 && rhs1 <= rhs2;
}

template <typename Visit>
void for_each_threshold(const Work& w, Visit visit) {
  for (int i = 1; i <= w.n; ++i) visit(w.c[i]);
  for (int i = 0; i < w.n; ++i) visit(w.p[i]);
  visit(0.5);
}

bool markov(const Work& w) {
  bool ok = true;
  for_each_threshold(w, [&](double t) {
    int count = 0;
    for (int j = 0; j < w.n0; ++j) count += w.hat[j] <= t ? 1 : 0;
    for (int i = 1; i <= w.n0; ++i) {
      if (i * (w.hat[i - 1] <= t ? 1 : 0) > count) ok = false;
    }
  });
  return ok;
}

bool pairwise(const Work& w) {
  bool ok = true;
  for_each_threshold(w, [&](double t) {
    // Ordered pairs j != j' with both null p-values <= t.
    int pairs = 0;
    for (int j = 0; j < w.n0; ++j) {
      for (int jj = 0; jj < w.n0; ++jj) {
        if (j != jj && std::max(w.hat[j], w.hat[jj]) <= t) ++pairs;
      }
    }
    for (int i = 2; i <= w.n0; ++i) {
      if (i * (i - 1) * (w.hat[i - 1] <= t ? 1 : 0) > pairs) ok = false;
    }
  });
  return ok;
}

bool simes(const Work& w) {
  std::array<double, kMaxN> lr{};
  for (int i = 1; i <= w.n; ++i) {
    const double f = static_cast<double>(plain_floor(w.g, i));
    lr[i - 1] = (f + 1.0) * w.alpha / (static_cast<double>(w.n) + f + 1.0 - static_cast<double>(i));
  }
  for (Direction d : {Direction::step_down, Direction::step_up}) {
    const Counts c = run(w, d, lr.data());
    if (c.v < plain_floor(w.g, c.r) + 1) continue;
    bool found = false;
    for (int v = 1; v <= w.n0 && !found; ++v) {
      found = w.hat[v - 1] <= static_cast<double>(v) * w.alpha / static_cast<double>(w.n0);
    }
    if (!found) return false;
  }
  return true;
}

using CheckFn = bool (*)(const Work&);

struct NamedCheck {
  const char* name;
  CheckFn fn;
};

constexpr std::array<NamedCheck, 5> kChecks = {{{"stepdown exceedance bound", &lemma_sd},
                                                {"stepup exceedance bounds", &lemma_su},
                                                {"order statistic markov bound", &markov},
                                                {"order statistic pairwise bound", &pairwise},
                                                {"lr simes containment", &simes}}};

Work to_work(const SmallInstance& inst) {
  inst.validate();
  Work w;
  w.n = static_cast<int>(inst.p.size());
  for (int i = 0; i < w.n; ++i) {
    w.p[i] = inst.p[i];
    w.null[i] = inst.is_null[i];
    w.c[i + 1] = inst.constants[i];
  }
  w.g = inst.gamma;
  w.k = inst.k;
  w.alpha = inst.alpha;
  prepare(w);
  return w;
}

CheckOutcome outcome(bool ok, const Work& w) {
  CheckOutcome out;
  out.ok = ok;
  if (!ok) out.detail = describe(w);
  return out;
}

void tally(std::vector<CheckTally>& tallies, const Work& w) {
  for (std::size_t c = 0; c < kChecks.size(); ++c) {
    ++tallies[c].instances;
    if (!kChecks[c].fn(w)) {
      if (tallies[c].violations++ == 0) tallies[c].first_failure = describe(w);
    }
  }
}

std::vector<CheckTally> fresh_tallies(std::string_view suffix) {
  std::vector<CheckTally> t;
  for (const auto& c : kChecks) t.push_back(CheckTally{std::string(c.name) + std::string(suffix), 0, 0, {}});
  return t;
}

std::vector<double> lr_unit(int n, const GammaRational& g, double alpha) {
  std::vector<double> c(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const double f = static_cast<double>(plain_floor(g, i));
    c[i - 1] = (f + 1.0) * alpha / (static_cast<double>(n) + f + 1.0 - static_cast<double>(i));
  }
  return c;
}

}  // namespace

void SmallInstance::validate() const {
  const std::size_t n = p.size();
  if (n == 0 || n > kMaxN) throw ConfigError("small instances have 1..8 hypotheses");
  if (is_null.size() != n || constants.size() != n) throw ConfigError("small instance vectors differ in length");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0)) throw ConfigError("small instance p-value outside [0, 1]");
    if (!(constants[i] > 0.0 && constants[i] < 1.0)) throw ConfigError("small instance constant outside (0, 1)");
    if (i > 0 && constants[i] < constants[i - 1]) throw ConfigError("small instance constants decrease");
  }
  if (k < 1) throw ConfigError("k must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

std::size_t SmallInstance::n0() const { return static_cast<std::size_t>(std::count(is_null.begin(), is_null.end(), true)); }

CheckOutcome check_stepdown_exceedance(const SmallInstance& inst) {
  const Work w = to_work(inst);
  return outcome(lemma_sd(w), w);
}

CheckOutcome check_stepup_exceedance(const SmallInstance& inst) {
  const Work w = to_work(inst);
  return outcome(lemma_su(w), w);
}

CheckOutcome check_markov_order_stat(const SmallInstance& inst) {
  const Work w = to_work(inst);
  return outcome(markov(w), w);
}

CheckOutcome check_pairwise_order_stat(const SmallInstance& inst) {
  const Work w = to_work(inst);
  return outcome(pairwise(w), w);
}

CheckOutcome check_simes_containment(const SmallInstance& inst) {
  const Work w = to_work(inst);
  return outcome(simes(w), w);
}

CheckOutcome check_index_identity(std::int64_t n, std::int64_t n0, const GammaRational& g) {
  if (2 * g.num() > g.den()) throw ConfigError("the index identity needs gamma <= 1/2");
  const std::int64_t big_m = ref_big_m(n, n0, g);
  for (std::int64_t i = 1; i <= big_m; ++i) {
    const std::int64_t m = ref_m(n, n0, g, i);
    if (plain_floor(g, i + m) + 1 != i) {
      std::ostringstream msg;
      msg << "n=" << n << " n0=" << n0 << " gamma=" << g.to_string() << " i=" << i << " m(i)=" << m;
      return CheckOutcome{false, msg.str()};
    }
  }
  return {};
}

CheckOutcome check_index_bound(std::int64_t n, std::int64_t n0, const GammaRational& g) {
  for (std::int64_t i = 1; i <= n0; ++i) {
    const std::int64_t mt = ref_m_tilde(n, n0, g, i);
    if (plain_floor(g, mt) + 1 > i) {
      std::ostringstream msg;
      msg << "n=" << n << " n0=" << n0 << " gamma=" << g.to_string() << " i=" << i << " m~(i)=" << mt;
      return CheckOutcome{false, msg.str()};
    }
  }
  return {};
}

std::vector<double> pvalue_lattice() {
  std::vector<double> v(15);
  for (int j = 0; j < 15; ++j) v[j] = 0.01 + 0.07 * j;
  return v;
}

std::vector<CheckTally> run_exhaustive_lemmas(int max_n) {
  if (max_n < 1 || max_n > kMaxN) throw ConfigError("exhaustive grids support n in 1..8");
  std::vector<CheckTally> tallies = fresh_tallies(" (exhaustive)");
  const std::vector<double> lattice = pvalue_lattice();
  const GammaRational gammas[] = {GammaRational(1, 10), GammaRational(1, 4)};
  const std::array<double, kMaxN> arbitrary = {0.03, 0.1, 0.2, 0.35, 0.5, 0.62, 0.75, 0.9};
  const std::size_t m = lattice.size();

  for (int n = 1; n <= max_n; ++n) {
    std::size_t tuples = 1;
    for (int i = 0; i < n; ++i) tuples *= m;
    for (const GammaRational& g : gammas) {
      std::vector<std::vector<double>> vectors = {lr_unit(n, g, 0.05), lr_unit(n, g, 0.5),
                                                  std::vector<double>(arbitrary.begin(), arbitrary.begin() + n)};
      const double levels[] = {0.05, 0.5, 0.05};
      for (int k = 1; k <= std::min(3, n); ++k) {
        for (std::size_t cv = 0; cv < vectors.size(); ++cv) {
          Work w;
          w.n = n;
          w.g = g;
          w.k = k;
          w.alpha = levels[cv];
          for (int i = 0; i < n; ++i) w.c[i + 1] = vectors[cv][i];
          for (unsigned mask = 0; mask < (1u << n); ++mask) {
            for (int i = 0; i < n; ++i) w.null[i] = (mask >> i) & 1u;
            for (std::size_t t = 0; t < tuples; ++t) {
              std::size_t rest = t;
              for (int i = 0; i < n; ++i) {
                w.p[i] = lattice[rest % m];
                rest /= m;
              }
              prepare(w);
              tally(tallies, w);
            }
          }
        }
      }
    }
  }
  return tallies;
}

std::vector<CheckTally> run_fuzz_lemmas(std::uint64_t count, std::uint64_t seed, int max_n) {
  if (max_n < 1 || max_n > kMaxN) throw ConfigError("fuzz instances support n in 1..8");
  std::vector<CheckTally> tallies = fresh_tallies(" (fuzz)");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> coin(0, 1);
  std::uniform_int_distribution<int> pick_lattice(0, 14);
  const std::vector<double> lattice = pvalue_lattice();
  const GammaRational gammas[] = {GammaRational(1, 10), GammaRational(1, 4)};

  for (std::uint64_t it = 0; it < count; ++it) {
    Work w;
    w.n = pick_n(rng);
    w.g = gammas[coin(rng)];
    w.k = std::uniform_int_distribution<int>(1, std::min(3, w.n))(rng);
    w.alpha = std::uniform_real_distribution<double>(0.01, 0.6)(rng);
    // Half the instances draw from the lattice so that ties occur.
    const bool on_lattice = coin(rng) == 1;
    for (int i = 0; i < w.n; ++i) {
      w.null[i] = coin(rng) == 1;
      w.p[i] = on_lattice ? lattice[pick_lattice(rng)] : unit(rng) * unit(rng);
    }
    if (coin(rng) == 1) {
      const std::vector<double> c = lr_unit(w.n, w.g, w.alpha);
      for (int i = 0; i < w.n; ++i) w.c[i + 1] = c[i];
    } else {
      std::array<double, kMaxN> c{};
      for (int i = 0; i < w.n; ++i) c[i] = std::max(1e-6, unit(rng) * 0.999);
      std::sort(c.begin(), c.begin() + w.n);
      for (int i = 0; i < w.n; ++i) w.c[i + 1] = c[i];
    }
    prepare(w);
    tally(tallies, w);
  }
  return tallies;
}

namespace {

std::vector<double> naive_template(TemplateKind kind, std::size_t n, const GammaRational& g, double beta) {
  std::vector<double> a(n + 1, 0.0);
  const double nd = static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double id = static_cast<double>(i);
    switch (kind) {
      case TemplateKind::lr: {
        const double f = static_cast<double>(plain_floor(g, static_cast<std::int64_t>(i)));
        a[i] = (f + 1.0) * beta / (nd + f + 1.0 - id);
        break;
      }
      case TemplateKind::bh: a[i] = id * beta / nd; break;
      case TemplateKind::gbs: a[i] = id * beta / (nd - id * (1.0 - beta) + 1.0); break;
      case TemplateKind::custom: throw ConfigError("reference constants cover the lr, bh and gbs templates");
    }
  }
  return a;
}

std::int64_t vee(std::int64_t i, std::int64_t k) { return i > k ? i : k; }

std::int64_t ref_m_bar(std::int64_t n, std::int64_t n0, const GammaRational& g, std::int64_t k, std::int64_t i) {
  if (i == 0) return 0;
  return vee(i, k) + ref_m(n, n0, g, i);
}

double naive_c1_sd(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    for (std::int64_t i = 1; i <= ref_big_m(n, n0, g); ++i) {
      best = std::max(best, static_cast<double>(n0) * a[ref_m_bar(n, n0, g, k, i)] / static_cast<double>(vee(i, k)));
    }
  }
  return best;
}

double naive_c1_su(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    for (std::int64_t i = k; i <= n0; ++i) {
      best = std::max(best, static_cast<double>(n0) * a[ref_m_tilde(n, n0, g, i)] / static_cast<double>(i));
    }
  }
  return best;
}

double naive_c2_sd(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    double s = 0.0;
    for (std::int64_t i = 1; i <= ref_big_m(n, n0, g); ++i) {
      s += (a[ref_m_bar(n, n0, g, k, i)] - a[ref_m_bar(n, n0, g, k, i - 1)]) / static_cast<double>(vee(i, k));
    }
    best = std::max(best, static_cast<double>(n0) * s);
  }
  return best;
}

double naive_c2_su(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    double s = a[ref_m_tilde(n, n0, g, k)] / static_cast<double>(k);
    for (std::int64_t i = k + 1; i <= n0; ++i) {
      s += (a[ref_m_tilde(n, n0, g, i)] - a[ref_m_tilde(n, n0, g, i - 1)]) / static_cast<double>(i);
    }
    best = std::max(best, static_cast<double>(n0) * s);
  }
  return best;
}

double naive_pairwise(std::int64_t n, std::int64_t k, double alpha, const PairwiseNullF& f) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    std::vector<double> b(static_cast<std::size_t>(n0) + 1, 0.0);
    for (std::int64_t i = 1; i <= n0; ++i) b[i] = static_cast<double>(i) * alpha / static_cast<double>(n0);
    double s = (f(b[k], b[k]) / b[k]) / static_cast<double>(k - 1);
    for (std::int64_t l = k; l <= n0 - 1; ++l) {
      s += (f(b[l + 1], b[k]) / b[k] - f(b[l], b[k]) / b[k]) / static_cast<double>(l);
    }
    best = std::max(best, static_cast<double>(n0 - 1) * s);
  }
  return best;
}

double naive_c3_sd(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k,
                   const PairwiseNullF& f) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    const std::int64_t big_m = ref_big_m(n, n0, g);
    const auto am = [&](std::int64_t i) { return a[ref_m_bar(n, n0, g, k, i)]; };
    const double n0d = static_cast<double>(n0);
    double lowest = 0.0;
    for (std::int64_t kk = 1; kk <= big_m; ++kk) {
      double t = 0.0;
      for (std::int64_t i = 1; i <= kk; ++i) t += n0d * (am(i) - am(i - 1)) / static_cast<double>(vee(i, k));
      double tail = 0.0;
      for (std::int64_t i = big_m; i >= kk + 2; --i) {
        const double ik = static_cast<double>(vee(i, k));
        tail += n0d * (n0d - 1.0) * (f(am(i), am(i)) - f(am(i - 1), am(i - 1))) / (ik * (ik - 1.0));
      }
      t += tail;
      if (big_m >= kk + 1) {
        const double k1 = static_cast<double>(vee(kk + 1, k));
        t += n0d * (n0d - 1.0) * f(am(kk + 1), am(kk + 1)) / (k1 * (k1 - 1.0));
        t -= n0d * f(am(kk), am(kk + 1)) / k1;
      }
      if (kk == 1 || t < lowest) lowest = t;
    }
    best = std::max(best, lowest);
  }
  return best;
}

double naive_c3_su(const std::vector<double>& a, std::int64_t n, const GammaRational& g, std::int64_t k,
                   const PairwiseNullF& f) {
  double best = -1.0;
  for (std::int64_t n0 = k; n0 <= n; ++n0) {
    const auto am = [&](std::int64_t i) { return a[ref_m_tilde(n, n0, g, i)]; };
    const auto rect = [&](std::int64_t r, std::int64_t s) {
      return f(am(r), am(s)) - f(am(r - 1), am(s)) - f(am(r), am(s - 1)) + f(am(r - 1), am(s - 1));
    };
    const double n0d = static_cast<double>(n0);
    double lowest = 0.0;
    for (std::int64_t kk = k; kk <= n0; ++kk) {
      double t = n0d * am(k - 1) / static_cast<double>(k);
      for (std::int64_t r = k; r <= kk; ++r) t += n0d * (am(r) - am(r - 1)) / static_cast<double>(r);
      double tail = 0.0;
      for (std::int64_t r = n0; r >= kk + 1; --r) {
        const double rd = static_cast<double>(r);
        double row = n0d * (am(r) - am(r - 1)) / (rd * rd);
        for (std::int64_t s = r + 1; s <= n0; ++s) row += n0d * (n0d - 1.0) * rect(r, s) / (rd * static_cast<double>(s));
        row += n0d * (n0d - 1.0) * (f(am(r), am(r)) - f(am(r), am(r - 1))) / (rd * rd);
        tail += row;
      }
      t += tail;
      if (kk == k || t < lowest) lowest = t;
    }
    best = std::max(best, lowest);
  }
  return best;
}

std::vector<double> scaled(const std::vector<double>& a, std::int64_t k, double factor) {
  std::vector<double> out(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = a[vee(static_cast<std::int64_t>(i), k)] * factor;
  return out;
}

}  // namespace

NaiveResult naive_constants(Family family, const NaiveParams& p) {
  const auto n = static_cast<std::int64_t>(p.n);
  const std::int64_t k = p.k;
  if (k < 1 || k > n) throw ConfigError("reference constants need 1 <= k <= n");
  if (needs_pairwise(family) && !p.pairwise) throw ConfigError("reference constants need a pairwise F");
  NaiveResult out;
  switch (family) {
    case Family::lr: {
      const std::vector<double> a = naive_template(TemplateKind::lr, p.n, p.gamma, p.alpha);
      out.scaling = p.alpha;
      out.constants.assign(a.begin() + 1, a.end());
      break;
    }
    case Family::thm32:
    case Family::thm33:
    case Family::thm35:
    case Family::thm36: {
      const std::vector<double> a = naive_template(p.template_kind, p.n, p.gamma, p.alpha);
      double c = 0.0;
      if (family == Family::thm32) c = naive_c1_sd(a, n, p.gamma, k);
      if (family == Family::thm33) c = naive_c1_su(a, n, p.gamma, k);
      if (family == Family::thm35) c = naive_c2_sd(a, n, p.gamma, k);
      if (family == Family::thm36) c = naive_c2_su(a, n, p.gamma, k);
      out.scaling = c;
      out.constants.resize(p.n);
      for (std::int64_t i = 1; i <= n; ++i) out.constants[i - 1] = p.alpha * a[vee(i, k)] / c;
      break;
    }
    case Family::thm34: {
      if (k < 2) throw ConfigError("the pairwise LR family needs k >= 2");
      const double c = naive_pairwise(n, k, p.alpha, *p.pairwise);
      const std::vector<double> a = naive_template(TemplateKind::lr, p.n, p.gamma, p.alpha);
      out.scaling = c;
      out.constants = scaled(a, k, 1.0 / std::min(c, 1.0));
      break;
    }
    case Family::thm37:
    case Family::thm38: {
      const std::vector<double> a = naive_template(p.template_kind, p.n, p.gamma, p.beta);
      out.scaling = family == Family::thm37 ? naive_c3_sd(a, n, p.gamma, k, *p.pairwise)
                                            : naive_c3_su(a, n, p.gamma, k, *p.pairwise);
      out.constants = scaled(a, k, 1.0);
      break;
    }
  }
  return out;
}

namespace {

void add_tallies(std::vector<SuiteRow>& rows, const std::vector<CheckTally>& tallies) {
  for (const CheckTally& t : tallies) rows.push_back(SuiteRow{t.name, t.instances, t.violations, t.first_failure});
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), std::numeric_limits<double>::min());
}

struct RowBuilder {
  SuiteRow row;
  explicit RowBuilder(std::string name) { row.check = std::move(name); }
  void record(bool ok, const std::string& detail) {
    ++row.instances;
    if (!ok && row.violations++ == 0) row.detail = detail;
  }
};

std::string cell(std::string_view what, std::size_t n, const GammaRational& g, int k) {
  std::ostringstream out;
  out << what << " n=" << n << " gamma=" << g.to_string() << " k=" << k;
  return out.str();
}

std::vector<SuiteRow> constants_suite() {
  std::vector<SuiteRow> rows;
  const double alpha = 0.05;
  const GammaRational prop_gammas[] = {GammaRational(1, 20), GammaRational(1, 10), GammaRational(1, 4),
                                       GammaRational(3, 10)};
  {
    RowBuilder b("lr template k=1: C1 stepdown = C1 stepup = alpha");
    for (const GammaRational& g : prop_gammas) {
      for (std::size_t n = 2; n <= 200; ++n) {
        const std::vector<double> a = lr_template(n, g, alpha);
        const double sd = scan_c1_sd(a, g, 1).value, su = scan_c1_su(a, g, 1).value;
        b.record(rel_err(sd, alpha) <= 1e-12 && rel_err(su, alpha) <= 1e-12, cell("C1", n, g, 1));
      }
    }
    rows.push_back(b.row);
  }
  {
    RowBuilder b("lr template: n0 a'_{i+m(i)} / i <= alpha termwise");
    for (const GammaRational& g : prop_gammas) {
      for (std::int64_t n = 2; n <= 60; ++n) {
        const std::vector<double> a = lr_template(static_cast<std::size_t>(n), g, alpha);
        for (std::int64_t n0 = 1; n0 <= n; ++n0) {
          const IndexMaps im = index_maps(n, n0, g, 1);
          bool ok = true;
          for (std::int64_t i = 1; i <= im.big_m; ++i) {
            ok = ok && static_cast<double>(n0) * a[i + im.m[i]] / static_cast<double>(i) <= alpha * (1.0 + 1e-12);
          }
          b.record(ok, cell("term bound", static_cast<std::size_t>(n), g, 1));
        }
      }
    }
    rows.push_back(b.row);
  }
  {
    RowBuilder ident("floor(gamma (i + m(i))) + 1 = i");
    RowBuilder bound("floor(gamma m~(i)) + 1 <= i");
    RowBuilder maps("index maps match their definitions");
    const GammaRational gs[] = {GammaRational(1, 20), GammaRational(1, 10), GammaRational(1, 4),
                                GammaRational(3, 10), GammaRational(1, 2)};
    for (const GammaRational& g : gs) {
      for (std::int64_t n = 1; n <= 60; ++n) {
        for (std::int64_t n0 = 1; n0 <= n; ++n0) {
          const CheckOutcome a = check_index_identity(n, n0, g);
          ident.record(a.ok, a.detail);
          const CheckOutcome c = check_index_bound(n, n0, g);
          bound.record(c.ok, c.detail);
          for (int k = 1; k <= std::min<std::int64_t>(3, n0); ++k) {
            const IndexMaps im = index_maps(n, n0, g, k);
            bool ok = im.big_m == ref_big_m(n, n0, g);
            for (std::int64_t i = 0; ok && i <= im.big_m; ++i) {
              ok = im.m[i] == ref_m(n, n0, g, i) && im.m_bar[i] == ref_m_bar(n, n0, g, k, i);
            }
            for (std::int64_t i = 0; ok && i <= n0; ++i) {
              ok = im.m_star[i] == ref_m_star(n, g, i) && im.m_tilde[i] == ref_m_tilde(n, n0, g, i);
            }
            maps.record(ok, cell("maps", static_cast<std::size_t>(n), g, k) + " n0=" + std::to_string(n0));
          }
        }
      }
    }
    rows.push_back(ident.row);
    rows.push_back(bound.row);
    rows.push_back(maps.row);
  }
  {
    RowBuilder b("optimized constants = reference loops (n <= 12)");
    const GammaRational gs[] = {GammaRational(1, 10), GammaRational(1, 4)};
    const PairwiseNullF fs[] = {PairwiseNullF::independence(), PairwiseNullF::equicorrelated_normal(0.5)};
    const auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (rel_err(x[i], y[i]) > 1e-12) return false;
      }
      return true;
    };
    for (const GammaRational& g : gs) {
      for (std::size_t n = 1; n <= 12; ++n) {
        for (int k = 1; k <= std::min<int>(3, static_cast<int>(n)); ++k) {
          NaiveParams np;
          np.n = n;
          np.gamma = g;
          np.k = k;
          np.alpha = alpha;
          if (k == 1) {
            const NaiveResult r = naive_constants(Family::lr, np);
            b.record(same(lr_constants(n, g, alpha).values(), r.constants), cell("lr", n, g, k));
          }
          for (TemplateKind t : {TemplateKind::lr, TemplateKind::bh, TemplateKind::gbs}) {
            np.template_kind = t;
            const Template tp = Template::of_kind(t, n, g);
            const std::pair<Family, ConstantsReport> fams[] = {
                {Family::thm32, c1_sd(tp, g, k, alpha)},
                {Family::thm33, c1_su(tp, g, k, alpha)},
                {Family::thm35, c2_sd(tp, g, k, alpha)},
                {Family::thm36, c2_su(tp, g, k, alpha)}};
            for (const auto& [fam, rep] : fams) {
              const NaiveResult r = naive_constants(fam, np);
              b.record(rel_err(rep.scaling, r.scaling) <= 1e-12 && same(rep.constants.values(), r.constants),
                       cell(to_string(fam), n, g, k) + " template=" + std::string(to_string(t)));
            }
          }
          np.template_kind = TemplateKind::lr;
          for (const PairwiseNullF& f : fs) {
            np.pairwise = f;
            if (k >= 2) {
              const ConstantsReport rep = c_pairwise_lr(n, g, k, alpha, f);
              const NaiveResult r = naive_constants(Family::thm34, np);
              b.record(rel_err(rep.scaling, r.scaling) <= 1e-12 && same(rep.constants.values(), r.constants),
                       cell("thm34", n, g, k) + " F=" + f.name());
            }
            // The C3 functionals on a beta grid; equicorrelated F only at a few sizes.
            if (f.kind() != PairwiseNullF::Kind::independence && n % 4 != 0) continue;
            const Template tp = Template::lr(n, g);
            for (double beta : {0.01, 0.05, 0.2}) {
              np.beta = beta;
              const double sd = c3_sd(tp, beta, g, k, f).value, su = c3_su(tp, beta, g, k, f).value;
              const NaiveResult rsd = naive_constants(Family::thm37, np), rsu = naive_constants(Family::thm38, np);
              b.record(rel_err(sd, rsd.scaling) <= 1e-12, cell("thm37 C3", n, g, k) + " F=" + f.name());
              b.record(rel_err(su, rsu.scaling) <= 1e-12, cell("thm38 C3", n, g, k) + " F=" + f.name());
            }
          }
          np.pairwise.reset();
        }
      }
    }
    rows.push_back(b.row);
  }
  return rows;
}

std::vector<SuiteRow> pairdist_suite() {
  std::vector<SuiteRow> rows;
  {
    RowBuilder b("bivariate normal cdf at (0, 0, 0.5) = 1/3");
    b.record(std::abs(bvn_cdf(0.0, 0.0, 0.5) - 1.0 / 3.0) <= 1e-9, "bvn_cdf(0,0,0.5)");
    rows.push_back(b.row);
  }
  {
    RowBuilder b("two-sided F at rho = 0 equals u v");
    for (int i = 0; i <= 49; ++i) {
      for (int j = 0; j <= 49; ++j) {
        const double u = i / 49.0, v = j / 49.0;
        b.record(std::abs(two_sided_equicorr_F(u, v, 0.0) - u * v) <= 1e-9,
                 "u=" + std::to_string(u) + " v=" + std::to_string(v));
      }
    }
    rows.push_back(b.row);
  }
  {
    RowBuilder b("pairwise F validity on a 50x50 grid");
    std::vector<PairwiseNullF> models = {PairwiseNullF::independence(), PairwiseNullF::comonotone()};
    for (double rho : {0.0, 0.1, 0.5, 0.9}) models.push_back(PairwiseNullF::equicorrelated_normal(rho));
    for (const PairwiseNullF& f : models) {
      const ValidityReport r = check_validity(f, 50);
      b.record(r.max_asymmetry <= 1e-10 && r.max_frechet_excess <= 1e-10 && r.min_rectangle >= -1e-10 &&
                   r.max_margin_error <= 1e-8 && r.max_boundary <= 1e-8,
               f.name());
    }
    rows.push_back(b.row);
  }
  {
    RowBuilder b("bvn reflection: Phi2(a,b,r) + Phi2(-a,b,-r) = Phi(b)");
    for (double a : {-2.5, -1.0, 0.0, 0.3, 1.7}) {
      for (double bb : {-1.5, 0.0, 0.8, 2.2}) {
        for (double r : {-0.95, -0.5, 0.0, 0.2, 0.6, 0.8, 0.93, 0.99}) {
          b.record(std::abs(bvn_cdf(a, bb, r) + bvn_cdf(-a, bb, -r) - normal_cdf(bb)) <= 1e-9,
                   "a=" + std::to_string(a) + " b=" + std::to_string(bb) + " r=" + std::to_string(r));
        }
      }
    }
    rows.push_back(b.row);
  }
  {
    RowBuilder b("two-sided F nondecreasing in rho");
    for (double u : {0.001, 0.01, 0.05, 0.2, 0.5}) {
      for (double v : {0.005, 0.05, 0.3}) {
        double prev = -1.0;
        bool ok = true;
        for (int i = 0; i <= 20; ++i) {
          const double cur = two_sided_equicorr_F(u, v, i * 0.049);
          ok = ok && cur >= prev - 1e-12;
          prev = cur;
        }
        b.record(ok, "u=" + std::to_string(u) + " v=" + std::to_string(v));
      }
    }
    rows.push_back(b.row);
  }
  return rows;
}

}  // namespace

std::vector<SuiteRow> run_verify_suite(std::string_view suite, std::uint64_t fuzz_count, std::uint64_t seed) {
  const bool all = suite == "all";
  if (!all && suite != "lemmas" && suite != "constants" && suite != "pairdist") {
    throw ConfigError("unknown suite '" + std::string(suite) + "' (expected lemmas, constants, pairdist or all)");
  }
  std::vector<SuiteRow> rows;
  if (all || suite == "lemmas") {
    add_tallies(rows, run_exhaustive_lemmas(4));
    add_tallies(rows, run_fuzz_lemmas(fuzz_count, seed, 8));
  }
  if (all || suite == "constants") {
    for (SuiteRow& r : constants_suite()) rows.push_back(std::move(r));
  }
  if (all || suite == "pairdist") {
    for (SuiteRow& r : pairdist_suite()) rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace kfdp

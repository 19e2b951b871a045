#include "kfdp/constants.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

#include "kfdp/errors.hpp"

namespace kfdp {

namespace {

constexpr double kBetaLo = 1e-12;
constexpr double kBetaHi = 1.0 - 1e-12;
constexpr double kCalibrationTol = 1e-9;
constexpr double kBracketWidth = 1e-12;
constexpr int kMaxBisections = 200;

std::int64_t template_n(const std::vector<double>& a) {
  if (a.size() < 2) throw ConfigError("template needs at least one constant");
  return static_cast<std::int64_t>(a.size()) - 1;
}

void check_k(int k, std::int64_t n) {
  if (k < 1 || k > n) {
    std::ostringstream msg;
    msg << "k = " << k << " must lie in [1, n = " << n << "]";
    throw ConfigError(msg.str());
  }
}

std::int64_t upper_n0(std::int64_t n, int k, const ScanOptions& opt) {
  if (!opt.n0_max) return n;
  if (*opt.n0_max < k) throw ConfigError("n0 cap must be at least k");
  return std::min(n, *opt.n0_max);
}

std::int64_t vee(std::int64_t i, int k) { return std::max<std::int64_t>(i, k); }

// Keeps the first maximum so ties resolve to the smaller n0.
void offer(ScanResult& best, bool& seen, double value, std::int64_t n0) {
  if (!seen || value > best.value) {
    best.value = value;
    best.argmax_n0 = n0;
    seen = true;
  }
}

// F over pairs of template indices, filled on first use. One table serves
// every n0 at a fixed beta.
class FTable {
 public:
  FTable(const std::vector<double>& a, const PairwiseNullF& f)
      : a_(a), f_(f), size_(a.size()), table_(a.size() * a.size(), std::numeric_limits<double>::quiet_NaN()) {}

  double operator()(std::int64_t i, std::int64_t j) {
    if (i > j) std::swap(i, j);
    double& slot = table_[static_cast<std::size_t>(i) * size_ + static_cast<std::size_t>(j)];
    if (std::isnan(slot)) slot = (i == 0) ? 0.0 : f_(a_[i], a_[j]);
    return slot;
  }

 private:
  const std::vector<double>& a_;
  const PairwiseNullF& f_;
  std::size_t size_;
  std::vector<double> table_;
};

void require_positive(double c, std::string_view what) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw NumericError(std::string(what) + " is not positive; the template is degenerate");
  }
}

CriticalConstants rescaled(const std::vector<double>& a, int k, double alpha, double c) {
  const std::size_t n = a.size() - 1;
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) out[i - 1] = alpha * a[vee(static_cast<std::int64_t>(i), k)] / c;
  return CriticalConstants(std::move(out), k);
}

CriticalConstants flattened_template(const std::vector<double>& a, int k) {
  const std::size_t n = a.size() - 1;
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) out[i - 1] = a[vee(static_cast<std::int64_t>(i), k)];
  return CriticalConstants(std::move(out), k);
}

void check_level(double beta, std::string_view what) {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError(std::string(what) + " must lie in (0, 1)");
}

}  // namespace

TemplateKind parse_template_kind(std::string_view text) {
  if (text == "lr") return TemplateKind::lr;
  if (text == "bh") return TemplateKind::bh;
  if (text == "gbs") return TemplateKind::gbs;
  throw ConfigError("unknown template '" + std::string(text) + "' (expected lr, bh or gbs)");
}

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::lr: return "lr";
    case TemplateKind::bh: return "bh";
    case TemplateKind::gbs: return "gbs";
    case TemplateKind::custom: return "custom";
  }
  return "?";
}

Template Template::lr(std::size_t n, const GammaRational& g) {
  if (n < 1) throw ConfigError("template needs n >= 1");
  return Template(TemplateKind::lr, n, g, {});
}

Template Template::bh(std::size_t n) {
  if (n < 1) throw ConfigError("template needs n >= 1");
  return Template(TemplateKind::bh, n, GammaRational(), {});
}

Template Template::gbs(std::size_t n) {
  if (n < 1) throw ConfigError("template needs n >= 1");
  return Template(TemplateKind::gbs, n, GammaRational(), {});
}

Template Template::custom(std::vector<double> unit) {
  if (unit.empty()) throw ConfigError("custom template is empty");
  for (std::size_t i = 0; i < unit.size(); ++i) {
    if (!(unit[i] > 0.0) || !std::isfinite(unit[i])) throw ConfigError("custom template values must be positive");
    if (i > 0 && unit[i] < unit[i - 1]) throw ConfigError("custom template must be nondecreasing");
  }
  const std::size_t n = unit.size();
  return Template(TemplateKind::custom, n, GammaRational(), std::move(unit));
}

Template Template::of_kind(TemplateKind kind, std::size_t n, const GammaRational& g) {
  switch (kind) {
    case TemplateKind::lr: return lr(n, g);
    case TemplateKind::bh: return bh(n);
    case TemplateKind::gbs: return gbs(n);
    case TemplateKind::custom: break;
  }
  throw ConfigError("custom templates need explicit values");
}

std::vector<double> Template::values(double beta) const {
  std::vector<double> a(n_ + 1, 0.0);
  const double nd = static_cast<double>(n_);
  for (std::size_t i = 1; i <= n_; ++i) {
    const double id = static_cast<double>(i);
    switch (kind_) {
      case TemplateKind::lr: {
        const std::int64_t f = g_.floor_times(static_cast<std::int64_t>(i));
        const double denom = nd + static_cast<double>(f) + 1.0 - id;
        assert(denom > 0.0);
        a[i] = (static_cast<double>(f) + 1.0) * beta / denom;
        break;
      }
      case TemplateKind::bh: a[i] = id * beta / nd; break;
      case TemplateKind::gbs: a[i] = id * beta / (nd - id * (1.0 - beta) + 1.0); break;
      case TemplateKind::custom: a[i] = beta * unit_[i - 1]; break;
    }
  }
  return a;
}

std::vector<double> lr_template(std::size_t n, const GammaRational& g, double beta) {
  return Template::lr(n, g).values(beta);
}

CriticalConstants lr_constants(std::size_t n, const GammaRational& g, double alpha) {
  check_level(alpha, "alpha");
  std::vector<double> a = lr_template(n, g, alpha);
  a.erase(a.begin());
  return CriticalConstants(std::move(a), 1);
}

IndexMaps index_maps(std::int64_t n, std::int64_t n0, const GammaRational& g, int k) {
  if (k < 1 || n0 < k || n0 > n) {
    std::ostringstream msg;
    msg << "index maps need 1 <= k <= n0 <= n (k=" << k << ", n0=" << n0 << ", n=" << n << ")";
    throw ConfigError(msg.str());
  }
  IndexMaps im;
  im.n = n;
  im.n0 = n0;
  im.n1 = n - n0;
  im.k = k;
  im.big_m = std::min(n0, g.floor_odds_times(im.n1) + 1);

  // m(i): largest j in [0, n1] with floor(gamma j / (1 - gamma)) + 1 <= i.
  im.m.assign(static_cast<std::size_t>(im.big_m) + 1, 0);
  std::int64_t j = 0;
  for (std::int64_t i = 1; i <= im.big_m; ++i) {
    while (j < im.n1 && g.floor_odds_times(j + 1) + 1 <= i) ++j;
    im.m[i] = j;
  }

  // m*(i): largest j in [1, n] with floor(gamma j) + 1 <= i; j = 1 always qualifies.
  im.m_star.assign(static_cast<std::size_t>(n0) + 1, 0);
  im.m_tilde.assign(static_cast<std::size_t>(n0) + 1, 0);
  j = 1;
  for (std::int64_t i = 1; i <= n0; ++i) {
    while (j < n && g.floor_times(j + 1) + 1 <= i) ++j;
    im.m_star[i] = j;
    im.m_tilde[i] = std::min(j, i + im.n1);
  }

  im.m_bar.assign(static_cast<std::size_t>(im.big_m) + 1, 0);
  for (std::int64_t i = 1; i <= im.big_m; ++i) im.m_bar[i] = vee(i, k) + im.m[i];
  return im;
}

ScanResult scan_c1_sd(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  ScanResult best;
  bool seen = false;
  for (std::int64_t n0 = k; n0 <= upper_n0(n, k, opt); ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    for (std::int64_t i = 1; i <= im.big_m; ++i) {
      offer(best, seen, static_cast<double>(n0) * a[im.m_bar[i]] / static_cast<double>(vee(i, k)), n0);
    }
  }
  return best;
}

ScanResult scan_c1_su(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  ScanResult best;
  bool seen = false;
  for (std::int64_t n0 = k; n0 <= upper_n0(n, k, opt); ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    for (std::int64_t i = k; i <= n0; ++i) {
      offer(best, seen, static_cast<double>(n0) * a[im.m_tilde[i]] / static_cast<double>(i), n0);
    }
  }
  return best;
}

ScanResult scan_c2_sd(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  ScanResult best;
  bool seen = false;
  for (std::int64_t n0 = k; n0 <= upper_n0(n, k, opt); ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    double s = 0.0;
    for (std::int64_t i = 1; i <= im.big_m; ++i) {
      s += (a[im.m_bar[i]] - a[im.m_bar[i - 1]]) / static_cast<double>(vee(i, k));
    }
    offer(best, seen, static_cast<double>(n0) * s, n0);
  }
  return best;
}

ScanResult scan_c2_su(const std::vector<double>& a, const GammaRational& g, int k, const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  ScanResult best;
  bool seen = false;
  for (std::int64_t n0 = k; n0 <= upper_n0(n, k, opt); ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    double s = a[im.m_tilde[k]] / static_cast<double>(k);
    for (std::int64_t i = k + 1; i <= n0; ++i) {
      s += (a[im.m_tilde[i]] - a[im.m_tilde[i - 1]]) / static_cast<double>(i);
    }
    offer(best, seen, static_cast<double>(n0) * s, n0);
  }
  return best;
}

ScanResult scan_c_pairwise_lr(std::size_t n_size, int k, double alpha, const PairwiseNullF& f, const ScanOptions& opt) {
  const auto n = static_cast<std::int64_t>(n_size);
  check_level(alpha, "alpha");
  if (k < 2) throw ConfigError("the pairwise LR family needs k >= 2");
  check_k(k, n);
  ScanResult best;
  bool seen = false;
  for (std::int64_t n0 = k; n0 <= upper_n0(n, k, opt); ++n0) {
    const double n0d = static_cast<double>(n0);
    const auto beta = [&](std::int64_t i) { return static_cast<double>(i) * alpha / n0d; };
    const double bk = beta(k);
    double s = f.conditional(bk, bk) / static_cast<double>(k - 1);
    for (std::int64_t l = k; l < n0; ++l) {
      s += (f.conditional(beta(l + 1), bk) - f.conditional(beta(l), bk)) / static_cast<double>(l);
    }
    offer(best, seen, (n0d - 1.0) * s, n0);
  }
  return best;
}

ScanResult scan_c3_sd(const std::vector<double>& a, const GammaRational& g, int k, const PairwiseNullF& f,
                      const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  FTable ft(a, f);
  ScanResult best;
  bool seen = false;
  const std::int64_t top = upper_n0(n, k, opt);
  best.chosen_k.reserve(static_cast<std::size_t>(top - k + 1));
  std::vector<double> head, tail;
  for (std::int64_t n0 = k; n0 <= top; ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    const std::int64_t big_m = im.big_m;
    const auto& mb = im.m_bar;
    const double n0d = static_cast<double>(n0);
    const double pair = n0d * (n0d - 1.0);

    // head[K] = sum_{i <= K} marginal increments.
    head.assign(static_cast<std::size_t>(big_m) + 1, 0.0);
    for (std::int64_t i = 1; i <= big_m; ++i) {
      head[i] = head[i - 1] + n0d * (a[mb[i]] - a[mb[i - 1]]) / static_cast<double>(vee(i, k));
    }
    // tail[i] = sum_{l >= i} pairwise diagonal increments, defined for i >= 2.
    tail.assign(static_cast<std::size_t>(big_m) + 2, 0.0);
    for (std::int64_t i = big_m; i >= 2; --i) {
      const double ik = static_cast<double>(vee(i, k));
      tail[i] = tail[i + 1] + pair * (ft(mb[i], mb[i]) - ft(mb[i - 1], mb[i - 1])) / (ik * (ik - 1.0));
    }

    double lowest = 0.0;
    std::int64_t arg = 0;
    for (std::int64_t kk = 1; kk <= big_m; ++kk) {
      double t = head[kk];
      if (kk + 2 <= big_m) t += tail[kk + 2];
      if (big_m >= kk + 1) {
        const double k1 = static_cast<double>(vee(kk + 1, k));
        t += pair * ft(mb[kk + 1], mb[kk + 1]) / (k1 * (k1 - 1.0));
        t -= n0d * ft(mb[kk], mb[kk + 1]) / k1;
      }
      if (arg == 0 || t < lowest) {
        lowest = t;
        arg = kk;
      }
    }
    best.chosen_k.push_back(arg);
    offer(best, seen, lowest, n0);
  }
  return best;
}

ScanResult scan_c3_su(const std::vector<double>& a, const GammaRational& g, int k, const PairwiseNullF& f,
                      const ScanOptions& opt) {
  const std::int64_t n = template_n(a);
  check_k(k, n);
  FTable ft(a, f);
  ScanResult best;
  bool seen = false;
  const std::int64_t top = upper_n0(n, k, opt);
  best.chosen_k.reserve(static_cast<std::size_t>(top - k + 1));
  std::vector<double> head, tail;
  for (std::int64_t n0 = k; n0 <= top; ++n0) {
    const IndexMaps im = index_maps(n, n0, g, k);
    const auto& mt = im.m_tilde;
    const double n0d = static_cast<double>(n0);
    const double pair = n0d * (n0d - 1.0);
    const auto rect = [&](std::int64_t r, std::int64_t s) {
      return ft(mt[r], mt[s]) - ft(mt[r - 1], mt[s]) - ft(mt[r], mt[s - 1]) + ft(mt[r - 1], mt[s - 1]);
    };

    // head[K - k] = n0 a_{m~(k-1)} / k + sum_{r=k}^{K} marginal increments.
    head.assign(static_cast<std::size_t>(n0 - k) + 1, 0.0);
    double run = n0d * a[mt[k - 1]] / static_cast<double>(k);
    for (std::int64_t r = k; r <= n0; ++r) {
      run += n0d * (a[mt[r]] - a[mt[r - 1]]) / static_cast<double>(r);
      head[r - k] = run;
    }
    // tail[r - k] = sum over r' >= r of the second-order term of row r'.
    tail.assign(static_cast<std::size_t>(n0 - k) + 2, 0.0);
    for (std::int64_t r = n0; r >= k + 1; --r) {
      const double rd = static_cast<double>(r);
      double row = n0d * (a[mt[r]] - a[mt[r - 1]]) / (rd * rd);
      for (std::int64_t s = r + 1; s <= n0; ++s) row += pair * rect(r, s) / (rd * static_cast<double>(s));
      row += pair * (ft(mt[r], mt[r]) - ft(mt[r], mt[r - 1])) / (rd * rd);
      tail[r - k] = tail[r - k + 1] + row;
    }

    double lowest = 0.0;
    std::int64_t arg = 0;
    for (std::int64_t kk = k; kk <= n0; ++kk) {
      const double t = head[kk - k] + tail[kk - k + 1];
      if (arg == 0 || t < lowest) {
        lowest = t;
        arg = kk;
      }
    }
    best.chosen_k.push_back(arg);
    offer(best, seen, lowest, n0);
  }
  return best;
}

namespace {

ConstantsReport rescaled_report(const std::vector<double>& a, int k, double alpha, const ScanResult& s,
                                std::string_view what) {
  require_positive(s.value, what);
  ConstantsReport rep{rescaled(a, k, alpha, s.value), s.value, s.argmax_n0, {}, std::nullopt};
  return rep;
}

}  // namespace

ConstantsReport c1_sd(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt) {
  check_level(alpha, "alpha");
  const std::vector<double> a = t.values(alpha);
  return rescaled_report(a, k, alpha, scan_c1_sd(a, g, k, opt), "C1 (stepdown)");
}

ConstantsReport c1_su(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt) {
  check_level(alpha, "alpha");
  const std::vector<double> a = t.values(alpha);
  return rescaled_report(a, k, alpha, scan_c1_su(a, g, k, opt), "C1 (stepup)");
}

ConstantsReport c2_sd(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt) {
  check_level(alpha, "alpha");
  const std::vector<double> a = t.values(alpha);
  return rescaled_report(a, k, alpha, scan_c2_sd(a, g, k, opt), "C2 (stepdown)");
}

ConstantsReport c2_su(const Template& t, const GammaRational& g, int k, double alpha, const ScanOptions& opt) {
  check_level(alpha, "alpha");
  const std::vector<double> a = t.values(alpha);
  return rescaled_report(a, k, alpha, scan_c2_su(a, g, k, opt), "C2 (stepup)");
}

ConstantsReport c_pairwise_lr(std::size_t n, const GammaRational& g, int k, double alpha, const PairwiseNullF& f,
                              const ScanOptions& opt) {
  const ScanResult s = scan_c_pairwise_lr(n, k, alpha, f, opt);
  require_positive(s.value, "pairwise C");
  const double shrink = std::min(s.value, 1.0);
  const std::vector<double> a = lr_template(n, g, alpha);
  std::vector<double> out(n);
  for (std::size_t i = 1; i <= n; ++i) out[i - 1] = a[vee(static_cast<std::int64_t>(i), k)] / shrink;
  return ConstantsReport{CriticalConstants(std::move(out), k), s.value, s.argmax_n0, {}, std::nullopt};
}

ScanResult c3_sd(const Template& t, double beta, const GammaRational& g, int k, const PairwiseNullF& f,
                 const ScanOptions& opt) {
  return scan_c3_sd(t.values(beta), g, k, f, opt);
}

ScanResult c3_su(const Template& t, double beta, const GammaRational& g, int k, const PairwiseNullF& f,
                 const ScanOptions& opt) {
  return scan_c3_su(t.values(beta), g, k, f, opt);
}

CalibrationResult calibrate_beta(const std::function<double(double)>& functional, double target) {
  if (!(target > 0.0 && target < 1.0)) throw ConfigError("calibration target must lie in (0, 1)");
  CalibrationResult res;
  double lo = kBetaLo, hi = kBetaHi;
  double c_lo = functional(lo), c_hi = functional(hi);
  res.evaluations = 2;
  if (!std::isfinite(c_lo) || !std::isfinite(c_hi)) throw NumericError("calibration functional is not finite");
  if (c_lo > target || c_hi < target) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "target unattainable: C(" << lo << ") = " << c_lo << ", C(" << hi << ") = " << c_hi
        << ", target " << target;
    throw NumericError(msg.str());
  }
  const auto slack = [](double x) { return 1e-12 * std::max(1.0, std::abs(x)); };
  for (int it = 0; it < kMaxBisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double c = functional(mid);
    ++res.evaluations;
    if (!std::isfinite(c)) throw NumericError("calibration functional is not finite");
    if (c + slack(c) < c_lo || c - slack(c) > c_hi) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "C(beta) is not monotone along the bisection: C(" << lo << ") = " << c_lo << ", C(" << mid
          << ") = " << c << ", C(" << hi << ") = " << c_hi;
      throw NumericError(msg.str());
    }
    if (std::abs(c - target) <= kCalibrationTol) {
      res.beta = mid;
      res.value = c;
      return res;
    }
    if (c > target) {
      hi = mid;
      c_hi = c;
    } else {
      lo = mid;
      c_lo = c;
    }
    if (hi - lo <= kBracketWidth) break;
  }
  res.beta = lo;
  res.value = c_lo;
  return res;
}

namespace {

using ScanFn = ScanResult (*)(const std::vector<double>&, const GammaRational&, int, const PairwiseNullF&,
                              const ScanOptions&);

ConstantsReport calibrated(ScanFn scan, const Template& t, const GammaRational& g, int k, double alpha,
                           const PairwiseNullF& f, const ScanOptions& opt) {
  check_level(alpha, "alpha");
  check_k(k, static_cast<std::int64_t>(t.n()));
  const CalibrationResult cal =
      calibrate_beta([&](double beta) { return scan(t.values(beta), g, k, f, opt).value; }, alpha);
  const std::vector<double> a = t.values(cal.beta);
  ScanResult s = scan(a, g, k, f, opt);
  return ConstantsReport{flattened_template(a, k), s.value, s.argmax_n0, std::move(s.chosen_k), cal.beta};
}

}  // namespace

ConstantsReport c3_sd_calibrated(const Template& t, const GammaRational& g, int k, double alpha,
                                 const PairwiseNullF& f, const ScanOptions& opt) {
  return calibrated(&scan_c3_sd, t, g, k, alpha, f, opt);
}

ConstantsReport c3_su_calibrated(const Template& t, const GammaRational& g, int k, double alpha,
                                 const PairwiseNullF& f, const ScanOptions& opt) {
  return calibrated(&scan_c3_su, t, g, k, alpha, f, opt);
}

Family parse_family(std::string_view text) {
  static constexpr std::pair<std::string_view, Family> names[] = {
      {"lr", Family::lr},       {"thm32", Family::thm32}, {"thm33", Family::thm33}, {"thm34", Family::thm34},
      {"thm35", Family::thm35}, {"thm36", Family::thm36}, {"thm37", Family::thm37}, {"thm38", Family::thm38}};
  for (const auto& [name, fam] : names) {
    if (text == name) return fam;
  }
  throw ConfigError("unknown family '" + std::string(text) + "' (expected lr or thm32..thm38)");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::lr: return "lr";
    case Family::thm32: return "thm32";
    case Family::thm33: return "thm33";
    case Family::thm34: return "thm34";
    case Family::thm35: return "thm35";
    case Family::thm36: return "thm36";
    case Family::thm37: return "thm37";
    case Family::thm38: return "thm38";
  }
  return "?";
}

bool needs_pairwise(Family f) { return f == Family::thm34 || f == Family::thm37 || f == Family::thm38; }

std::optional<Direction> fixed_direction(Family f) {
  switch (f) {
    case Family::thm32:
    case Family::thm35:
    case Family::thm37: return Direction::step_down;
    case Family::thm33:
    case Family::thm36:
    case Family::thm38: return Direction::step_up;
    case Family::lr:
    case Family::thm34: break;
  }
  return std::nullopt;
}

void validate(const ProcedureSpec& spec, std::size_t n) {
  if (n < 1) throw ConfigError("n must be at least 1");
  check_level(spec.alpha, "alpha");
  check_k(spec.k, static_cast<std::int64_t>(n));
  if (const auto d = fixed_direction(spec.family); d && *d != spec.direction) {
    throw ConfigError("family " + std::string(to_string(spec.family)) + " is defined only for the " +
                      (*d == Direction::step_down ? "stepdown" : "stepup") + " direction");
  }
  if (spec.family == Family::lr && spec.k != 1) throw ConfigError("family lr is defined for k = 1 only");
  if (spec.family == Family::thm34 && spec.k < 2) throw ConfigError("family thm34 needs k >= 2");
  if (needs_pairwise(spec.family) && !spec.pairwise) {
    throw ConfigError("family " + std::string(to_string(spec.family)) + " needs a pairwise null distribution");
  }
  if (spec.template_kind == TemplateKind::custom && spec.custom_template.size() != n) {
    throw ConfigError("custom template length does not match n");
  }
  if (spec.scan.n0_max && *spec.scan.n0_max < spec.k) throw ConfigError("n0 cap must be at least k");
}

ConstantsReport build_constants(const ProcedureSpec& spec, std::size_t n) {
  validate(spec, n);
  const Template t = spec.template_kind == TemplateKind::custom ? Template::custom(spec.custom_template)
                                                                : Template::of_kind(spec.template_kind, n, spec.gamma);
  switch (spec.family) {
    case Family::lr:
      return ConstantsReport{lr_constants(n, spec.gamma, spec.alpha), spec.alpha, std::nullopt, {}, std::nullopt};
    case Family::thm32: return c1_sd(t, spec.gamma, spec.k, spec.alpha, spec.scan);
    case Family::thm33: return c1_su(t, spec.gamma, spec.k, spec.alpha, spec.scan);
    case Family::thm34: return c_pairwise_lr(n, spec.gamma, spec.k, spec.alpha, *spec.pairwise, spec.scan);
    case Family::thm35: return c2_sd(t, spec.gamma, spec.k, spec.alpha, spec.scan);
    case Family::thm36: return c2_su(t, spec.gamma, spec.k, spec.alpha, spec.scan);
    case Family::thm37: return c3_sd_calibrated(t, spec.gamma, spec.k, spec.alpha, *spec.pairwise, spec.scan);
    case Family::thm38: return c3_su_calibrated(t, spec.gamma, spec.k, spec.alpha, *spec.pairwise, spec.scan);
  }
  throw ConfigError("unknown family");
}

}  // namespace kfdp

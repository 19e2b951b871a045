#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "kfdp/constants.hpp"
#include "kfdp/engine.hpp"
#include "kfdp/errors.hpp"
#include "kfdp/oracle.hpp"
#include "kfdp/simlab.hpp"

namespace kfdp::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string num(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Common {
  std::string output;
  std::string timestamp;
};

// Flags shared by `constants` and `test`.
struct ConstantsFlags {
  std::string family = "lr";
  std::size_t n = 0;
  std::string gamma = "1/10";
  double alpha = 0.05;
  int k = 1;
  std::string template_kind = "lr";
  std::optional<double> rho;
  std::string f;
  std::optional<std::int64_t> n0_max;
};

void add_constants_flags(CLI::App* sub, ConstantsFlags& c, bool need_n) {
  sub->add_option("--family", c.family, "lr | thm32 .. thm38")->capture_default_str();
  auto* n = sub->add_option("--n", c.n, "number of hypotheses");
  if (need_n) n->required();
  sub->add_option("--gamma", c.gamma, "FDP tolerance, rational \"1/10\" or decimal")->capture_default_str();
  sub->add_option("--alpha", c.alpha, "level")->capture_default_str();
  sub->add_option("--k", c.k, "number of tolerated false rejections")->capture_default_str();
  sub->add_option("--template", c.template_kind, "lr | bh | gbs")->capture_default_str();
  auto* rho = sub->add_option("--rho", c.rho, "equicorrelated normal pairwise F at this rho");
  sub->add_option("--f", c.f, "pairwise F: independence | comonotone")->excludes(rho);
  sub->add_option("--n0-max", c.n0_max, "restrict the worst case to n0 <= this value");
}

GammaRational parse_gamma(const std::string& text, std::ostream& err) {
  bool snapped = false;
  const GammaRational g = GammaRational::parse(text, &snapped);
  if (snapped && g.to_string() != text) err << "warning: gamma " << text << " snapped to " << g.to_string() << '\n';
  return g;
}

std::optional<PairwiseNullF> pairwise_from(const ConstantsFlags& c) {
  if (c.rho) return PairwiseNullF::equicorrelated_normal(*c.rho);
  if (c.f.empty() || c.f == "independence") return PairwiseNullF::independence();
  if (c.f == "comonotone") return PairwiseNullF::comonotone();
  throw ConfigError("unknown pairwise F '" + c.f + "' (expected independence or comonotone)");
}

ProcedureSpec spec_from(const ConstantsFlags& c, const GammaRational& g, std::optional<Direction> direction) {
  ProcedureSpec spec;
  spec.family = parse_family(c.family);
  spec.gamma = g;
  spec.alpha = c.alpha;
  spec.k = c.k;
  spec.template_kind = parse_template_kind(c.template_kind);
  if (needs_pairwise(spec.family)) spec.pairwise = pairwise_from(c);
  spec.scan.n0_max = c.n0_max;
  if (const auto fixed = fixed_direction(spec.family)) {
    spec.direction = *fixed;
    if (direction && *direction != *fixed) {
      throw ConfigError(std::string(to_string(spec.family)) + " is a " + std::string(to_string(*fixed)) +
                        " procedure");
    }
  } else {
    spec.direction = direction.value_or(Direction::step_down);
  }
  return spec;
}

// Manifest: every option of the subcommand with its effective value.
void write_manifest(std::ostream& os, const CLI::App& sub, const Common& common) {
  os << "# kfdp " << kVersion << '\n';
  os << "# subcommand=" << sub.get_name() << '\n';
  bool has_seed = false;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "output" || name == "timestamp") continue;
    has_seed = has_seed || name == "seed";
    std::string value = opt->get_default_str();
    if (opt->count() > 0) {
      value.clear();
      for (const std::string& r : opt->results()) value += (value.empty() ? "" : ",") + r;
    }
    os << "# " << name << '=' << value << '\n';
  }
  if (!has_seed) os << "# seed=none\n";
  os << "# timestamp=" << (common.timestamp.empty() ? utc_now() : common.timestamp) << '\n';
}

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw ConfigError("cannot open '" + path + "' for writing");
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

std::vector<double> read_values(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + std::string(what) + " file '" + path + "'");
  std::vector<double> out;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    double x = 0.0;
    const char* first = line.data() + b;
    const char* last = line.data() + e + 1;
    const auto res = std::from_chars(first, last, x);
    if (res.ec != std::errc{} || res.ptr != last) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": not a number");
    }
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError(std::string(what) + " file '" + path + "' has no values");
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double x = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), x);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw ConfigError("cannot parse '" + item + "' as a number");
    }
    out.push_back(x);
  }
  if (out.empty()) throw ConfigError("empty list");
  return out;
}

// Two side-by-side panels: exceedance and power against rho.
std::string render_svg(const std::vector<GridRow>& rows, double alpha, bool label_cells) {
  std::map<std::string, std::vector<std::pair<double, double>>> exc, pow;
  for (const GridRow& r : rows) {
    std::string key = r.report.procedure;
    if (label_cells) key += " pi0=" + num(r.pi0) + " g=" + r.gamma.to_string() + " k=" + std::to_string(r.k);
    exc[key].emplace_back(r.rho, r.report.exceedance);
    if (r.report.power) pow[key].emplace_back(r.rho, *r.report.power);
  }
  double rho_lo = 0.0, rho_hi = 1.0;
  if (!rows.empty()) {
    rho_lo = rho_hi = rows.front().rho;
    for (const GridRow& r : rows) {
      rho_lo = std::min(rho_lo, r.rho);
      rho_hi = std::max(rho_hi, r.rho);
    }
    if (rho_hi - rho_lo < 1e-9) {
      rho_lo -= 0.05;
      rho_hi += 0.05;
    }
  }
  const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  const double w = 420, h = 300, ml = 50, mr = 15, mt = 30, mb = 40;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * w << "\" height=\"" << h + 20 * (exc.size() + 1)
    << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const auto panel = [&](double x0, const std::string& title,
                         const std::map<std::string, std::vector<std::pair<double, double>>>& series,
                         std::optional<double> rule) {
    double ymax = rule.value_or(0.0);
    for (const auto& [_, pts] : series) {
      for (const auto& [x, y] : pts) ymax = std::max(ymax, y);
    }
    ymax = ymax <= 0.0 ? 1.0 : ymax * 1.1;
    const auto px = [&](double x) { return x0 + ml + (x - rho_lo) / (rho_hi - rho_lo) * (w - ml - mr); };
    const auto py = [&](double y) { return mt + (1.0 - y / ymax) * (h - mt - mb); };
    s << "<text x=\"" << x0 + w / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title << "</text>\n";
    s << "<line x1=\"" << px(rho_lo) << "\" y1=\"" << py(0) << "\" x2=\"" << px(rho_hi) << "\" y2=\"" << py(0)
      << "\" stroke=\"black\"/>\n";
    s << "<line x1=\"" << px(rho_lo) << "\" y1=\"" << py(0) << "\" x2=\"" << px(rho_lo) << "\" y2=\"" << py(ymax)
      << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double xv = rho_lo + (rho_hi - rho_lo) * t / 4.0, yv = ymax * t / 4.0;
      s << "<text x=\"" << px(xv) << "\" y=\"" << py(0) + 14 << "\" text-anchor=\"middle\">" << num(std::round(xv * 1000) / 1000)
        << "</text>\n";
      s << "<text x=\"" << px(rho_lo) - 4 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
        << num(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    s << "<text x=\"" << x0 + w / 2 << "\" y=\"" << h - 6 << "\" text-anchor=\"middle\">rho</text>\n";
    if (rule) {
      s << "<line x1=\"" << px(rho_lo) << "\" y1=\"" << py(*rule) << "\" x2=\"" << px(rho_hi) << "\" y2=\""
        << py(*rule) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
    }
    std::size_t c = 0;
    for (const auto& [_, raw] : series) {
      auto pts = raw;
      std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      s << "<polyline fill=\"none\" stroke=\"" << palette[c++ % 8] << "\" stroke-width=\"1.5\" points=\"";
      for (const auto& [x, y] : pts) s << px(x) << ',' << py(y) << ' ';
      s << "\"/>\n";
    }
  };
  panel(0, "exceedance probability", exc, alpha);
  panel(w, "average power", pow, std::nullopt);
  std::size_t c = 0;
  for (const auto& [key, _] : exc) {
    const double y = h + 20 * static_cast<double>(c) + 10;
    s << "<line x1=\"" << ml << "\" y1=\"" << y << "\" x2=\"" << ml + 20 << "\" y2=\"" << y << "\" stroke=\""
      << palette[c % 8] << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << ml + 26 << "\" y=\"" << y + 4 << "\">" << key << "</text>\n";
    ++c;
  }
  s << "</svg>\n";
  return s.str();
}

int cmd_constants(const CLI::App& sub, const Common& common, const ConstantsFlags& c, std::ostream& out,
                  std::ostream& err) {
  const GammaRational g = parse_gamma(c.gamma, err);
  const ProcedureSpec spec = spec_from(c, g, std::nullopt);
  const ConstantsReport rep = build_constants(spec, c.n);
  Sink sink(common.output, out);
  write_manifest(*sink, sub, common);
  *sink << "i,alpha_i\n";
  const std::vector<double>& v = rep.constants.values();
  for (std::size_t i = 0; i < v.size(); ++i) *sink << i + 1 << ',' << num(v[i]) << '\n';
  *sink << "C," << num(rep.scaling) << '\n';
  if (rep.beta_star) *sink << "beta_star," << num(*rep.beta_star) << '\n';
  return ok;
}

int cmd_test(const CLI::App& sub, const Common& common, const ConstantsFlags& c, const std::string& pvalues_path,
             const std::string& constants_text, const std::string& direction_text, std::ostream& out,
             std::ostream& err) {
  const std::vector<double> p = read_values(pvalues_path, "p-value");
  for (double x : p) {
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("p-value " + num(x) + " outside [0, 1]");
  }
  std::optional<Direction> direction;
  if (!direction_text.empty()) direction = parse_direction(direction_text);
  CriticalConstants constants = [&] {
    if (!constants_text.empty()) {
      if (!direction) throw ConfigError("--constants needs --direction");
      std::vector<double> v = parse_list(constants_text);
      if (v.size() != p.size()) throw ConfigError("--constants length differs from the number of p-values");
      return CriticalConstants(std::move(v), 1);
    }
    if (c.n != 0 && c.n != p.size()) throw ConfigError("--n differs from the number of p-values");
    const ProcedureSpec spec = spec_from(c, parse_gamma(c.gamma, err), direction);
    if (!direction) direction = spec.direction;
    return build_constants(spec, p.size()).constants;
  }();
  const PValueVector pv(p);
  const RejectionResult res = run_procedure(*direction, pv, constants);
  std::vector<std::size_t> rank(p.size());
  for (std::size_t r = 0; r < p.size(); ++r) rank[pv.order()[r]] = r;
  std::vector<bool> rejected(p.size(), false);
  for (std::size_t i : res.rejected) rejected[i] = true;

  Sink sink(common.output, out);
  write_manifest(*sink, sub, common);
  *sink << "index,p,critical,rejected\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    *sink << i + 1 << ',' << num(p[i]) << ',' << num(constants.at(rank[i] + 1)) << ',' << (rejected[i] ? 1 : 0)
          << '\n';
  }
  *sink << "R," << res.r << '\n';
  return ok;
}

struct SimulateFlags {
  std::string procedures = "lr-sd,lr-su";
  std::size_t n = 100;
  std::string pi0 = "0.5";
  std::string rho = "0";
  std::vector<std::string> gamma{"1/10"};
  std::vector<int> k{1};
  double alpha = 0.05;
  double effect = std::sqrt(10.0);
  std::size_t reps = 2000;
  std::uint64_t seed = 20240101;
  std::string dependence = "uniform";
  std::string svg;
  unsigned threads = 0;
};

int cmd_simulate(const CLI::App& sub, const Common& common, const SimulateFlags& s, std::ostream& out,
                 std::ostream& err) {
  MonteCarloConfig base;
  base.n = s.n;
  base.alpha = s.alpha;
  base.effect = s.effect;
  base.reps = s.reps;
  base.seed = s.seed;
  base.threads = s.threads;
  GridSweep sweep;
  std::stringstream names(s.procedures);
  for (std::string item; std::getline(names, item, ',');) {
    if (!item.empty()) sweep.procedures.push_back(item);
  }
  if (sweep.procedures.empty()) throw ConfigError("--procedures is empty");
  sweep.rhos = parse_list(s.rho);
  sweep.pi0s = parse_list(s.pi0);
  for (const std::string& g : s.gamma) sweep.gammas.push_back(parse_gamma(g, err));
  sweep.ks = s.k;
  base.model = DependenceModel::parse(s.dependence, sweep.rhos.front());
  const std::vector<GridRow> rows = run_grid(base, sweep);

  Sink sink(common.output, out);
  write_manifest(*sink, sub, common);
  *sink << "procedure,rho,pi0,gamma,k,exceedance,exceedance_se,power,power_se\n";
  const auto opt = [](const std::optional<double>& x) { return x ? num(*x) : std::string(); };
  for (const GridRow& r : rows) {
    *sink << r.report.procedure << ',' << num(r.rho) << ',' << num(r.pi0) << ',' << r.gamma.to_string() << ','
          << r.k << ',' << num(r.report.exceedance) << ',' << opt(r.report.exceedance_se) << ','
          << opt(r.report.power) << ',' << opt(r.report.power_se) << '\n';
  }
  if (!s.svg.empty()) {
    std::ofstream f(s.svg);
    if (!f) throw ConfigError("cannot open '" + s.svg + "' for writing");
    const bool label_cells = sweep.pi0s.size() > 1 || sweep.gammas.size() > 1 || sweep.ks.size() > 1;
    f << render_svg(rows, s.alpha, label_cells);
  }
  return ok;
}

int cmd_verify(const CLI::App& sub, const Common& common, const std::string& suite, std::uint64_t fuzz_count,
               std::uint64_t seed, std::ostream& out) {
  if (suite != "lemmas" && suite != "constants" && suite != "pairdist" && suite != "all") {
    throw ConfigError("unknown suite '" + suite + "' (expected lemmas, constants, pairdist or all)");
  }
  const std::vector<SuiteRow> rows = run_verify_suite(suite, fuzz_count, seed);
  Sink sink(common.output, out);
  write_manifest(*sink, sub, common);
  *sink << "check,instances,violations,status\n";
  bool all_passed = true;
  for (const SuiteRow& r : rows) {
    *sink << '"' << r.check << "\"," << r.instances << ',' << r.violations << ',' << (r.passed() ? "PASS" : "FAIL")
          << '\n';
    all_passed = all_passed && r.passed();
  }
  return all_passed ? ok : verify_failed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stepwise procedures controlling the FDP exceedance probability", "kfdp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Common common;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output", common.output, "write the table here instead of stdout");
    sub->add_option("--timestamp", common.timestamp, "pin the manifest timestamp");
  };

  ConstantsFlags cflags;
  auto* constants = app.add_subcommand("constants", "critical constants of a family");
  add_constants_flags(constants, cflags, true);
  add_common(constants);

  ConstantsFlags tflags;
  std::string pvalues, custom, direction;
  auto* test = app.add_subcommand("test", "run a procedure on a p-value file");
  test->add_option("--pvalues", pvalues, "one p-value per line, # comments")->required();
  test->add_option("--direction", direction, "sd | su");
  test->add_option("--constants", custom, "comma-separated critical constants (replaces the family)");
  add_constants_flags(test, tflags, false);
  add_common(test);

  SimulateFlags sflags;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo grid over rho, pi0, gamma and k");
  simulate->add_option("--procedures", sflags.procedures, "comma list of " + [] {
    std::string all;
    for (std::string_view n : procedure_names()) all += (all.empty() ? "" : ",") + std::string(n);
    return all;
  }())->capture_default_str();
  simulate->add_option("--n", sflags.n)->capture_default_str();
  simulate->add_option("--pi0", sflags.pi0, "comma list")->capture_default_str();
  simulate->add_option("--rho", sflags.rho, "comma list")->capture_default_str();
  simulate->add_option("--gamma", sflags.gamma, "one or more")->delimiter(',')->default_str("1/10");
  simulate->add_option("--k", sflags.k, "one or more")->delimiter(',')->default_str("1");
  simulate->add_option("--alpha", sflags.alpha)->capture_default_str();
  simulate->add_option("--effect", sflags.effect, "mean of the false nulls")->default_str(num(sflags.effect));
  simulate->add_option("--reps", sflags.reps)->capture_default_str();
  simulate->add_option("--seed", sflags.seed)->capture_default_str();
  simulate->add_option("--dependence", sflags.dependence, "uniform | block:<s> | ar1")->capture_default_str();
  simulate->add_option("--svg", sflags.svg, "also plot exceedance and power against rho");
  simulate->add_option("--threads", sflags.threads, "worker cap; 0 uses KFDP_THREADS or all cores");
  add_common(simulate);

  std::string suite = "all";
  std::uint64_t fuzz_count = 100000, vseed = 1;
  auto* verify = app.add_subcommand("verify", "brute-force checks of the underlying inequalities");
  verify->add_option("--suite", suite, "lemmas | constants | pairdist | all")->capture_default_str();
  verify->add_option("--fuzz-count", fuzz_count)->capture_default_str();
  verify->add_option("--seed", vseed)->capture_default_str();
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage;
  }

  try {
    if (*constants) return cmd_constants(*constants, common, cflags, out, err);
    if (*test) return cmd_test(*test, common, tflags, pvalues, custom, direction, out, err);
    if (*simulate) return cmd_simulate(*simulate, common, sflags, out, err);
    return cmd_verify(*verify, common, suite, fuzz_count, vseed, out);
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return numeric;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
}

}  // namespace kfdp::cli

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "kfdp/constants.hpp"
#include "kfdp/core.hpp"
#include "kfdp/engine.hpp"
#include "kfdp/errors.hpp"
#include "kfdp/oracle.hpp"
#include "kfdp/pairdist.hpp"
#include "kfdp/simlab.hpp"

namespace py = pybind11;
using namespace pybind11::literals;

namespace {

using GammaArg = std::variant<std::string, double>;

kfdp::GammaRational to_gamma(const GammaArg& g) {
  if (const auto* s = std::get_if<std::string>(&g)) return kfdp::GammaRational::parse(*s);
  return kfdp::GammaRational::from_double(std::get<double>(g));
}

std::optional<kfdp::PairwiseNullF> to_pairwise(std::optional<double> rho, const std::optional<std::string>& f) {
  if (rho && f) throw kfdp::ConfigError("give either rho or f, not both");
  if (rho) return kfdp::PairwiseNullF::equicorrelated_normal(*rho);
  if (!f || *f == "independence") return kfdp::PairwiseNullF::independence();
  if (*f == "comonotone") return kfdp::PairwiseNullF::comonotone();
  throw kfdp::ConfigError("unknown pairwise F '" + *f + "'");
}

py::dict rejection_dict(const kfdp::RejectionResult& r) {
  return py::dict("r"_a = r.r, "rejected"_a = r.rejected);
}

py::dict build(const std::string& family, std::size_t n, const GammaArg& gamma, double alpha, int k,
               const std::string& template_kind, std::optional<double> rho, std::optional<std::string> f,
               std::optional<std::string> direction) {
  kfdp::ProcedureSpec spec;
  spec.family = kfdp::parse_family(family);
  spec.gamma = to_gamma(gamma);
  spec.alpha = alpha;
  spec.k = k;
  spec.template_kind = kfdp::parse_template_kind(template_kind);
  if (kfdp::needs_pairwise(spec.family)) spec.pairwise = to_pairwise(rho, f);
  const auto fixed = kfdp::fixed_direction(spec.family);
  spec.direction = direction ? kfdp::parse_direction(*direction) : fixed.value_or(kfdp::Direction::step_down);
  const kfdp::ConstantsReport rep = kfdp::build_constants(spec, n);
  return py::dict("constants"_a = rep.constants.values(), "scaling"_a = rep.scaling, "argmax_n0"_a = rep.argmax_n0,
                  "beta_star"_a = rep.beta_star, "direction"_a = std::string(kfdp::to_string(spec.direction)));
}

py::dict simulate(const std::string& procedure, std::size_t n, double pi0, double rho, const GammaArg& gamma, int k,
                  double alpha, double effect, std::size_t reps, std::uint64_t seed, const std::string& dependence,
                  unsigned threads) {
  kfdp::MonteCarloConfig c;
  c.n = n;
  c.pi0 = pi0;
  c.gamma = to_gamma(gamma);
  c.k = k;
  c.alpha = alpha;
  c.effect = effect;
  c.reps = reps;
  c.seed = seed;
  c.threads = threads;
  c.model = kfdp::DependenceModel::parse(dependence, rho);
  kfdp::MonteCarloReport r;
  {
    py::gil_scoped_release release;
    r = kfdp::run_monte_carlo(c, kfdp::procedure_spec(procedure, c.gamma, k, alpha, c.model));
  }
  return py::dict("procedure"_a = r.procedure, "exceedance"_a = r.exceedance, "exceedance_se"_a = r.exceedance_se,
                  "power"_a = r.power, "power_se"_a = r.power_se, "mean_rejections"_a = r.mean_rejections,
                  "reps"_a = r.reps, "n0"_a = r.n0, "n1"_a = r.n1);
}

}  // namespace

PYBIND11_MODULE(_kfdp, m) {
  m.doc() = "Stepwise procedures controlling the FDP exceedance probability";

  py::register_exception<kfdp::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<kfdp::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<kfdp::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<kfdp::GammaRational>(m, "Gamma")
      .def(py::init<std::int64_t, std::int64_t>(), "num"_a, "den"_a)
      .def_static("parse", [](const std::string& s) { return kfdp::GammaRational::parse(s); })
      .def_property_readonly("num", &kfdp::GammaRational::num)
      .def_property_readonly("den", &kfdp::GammaRational::den)
      .def_property_readonly("value", &kfdp::GammaRational::value)
      .def("floor_times", &kfdp::GammaRational::floor_times)
      .def("__str__", &kfdp::GammaRational::to_string)
      .def("__repr__", [](const kfdp::GammaRational& g) { return "Gamma(" + g.to_string() + ")"; })
      .def("__eq__", [](const kfdp::GammaRational& a, const kfdp::GammaRational& b) { return a == b; });

  m.def("lr_constants",
        [](std::size_t n, const GammaArg& g, double alpha) { return kfdp::lr_constants(n, to_gamma(g), alpha).values(); },
        "n"_a, "gamma"_a, "alpha"_a = 0.05);

  m.def("constants", &build, "family"_a, "n"_a, "gamma"_a = "1/10", "alpha"_a = 0.05, "k"_a = 1, "template"_a = "lr",
        "rho"_a = py::none(), "f"_a = py::none(), "direction"_a = py::none(),
        "Critical constants of a family with the scaling constant and, when calibrated, beta*.");

  m.def("step_down",
        [](std::vector<double> p, std::vector<double> c, int k) {
          return rejection_dict(kfdp::step_down(kfdp::PValueVector(std::move(p)), kfdp::CriticalConstants(std::move(c), k)));
        },
        "p"_a, "constants"_a, "k"_a = 1);
  m.def("step_up",
        [](std::vector<double> p, std::vector<double> c, int k) {
          return rejection_dict(kfdp::step_up(kfdp::PValueVector(std::move(p)), kfdp::CriticalConstants(std::move(c), k)));
        },
        "p"_a, "constants"_a, "k"_a = 1);

  m.def("kfdp_value", [](std::int64_t v, std::int64_t r, int k) { return kfdp::kfdp_value(v, r, k).to_double(); },
        "v"_a, "r"_a, "k"_a = 1);
  m.def("exceeds_gamma",
        [](std::int64_t v, std::int64_t r, int k, const GammaArg& g) { return kfdp::exceeds_gamma(v, r, k, to_gamma(g)); },
        "v"_a, "r"_a, "k"_a, "gamma"_a);

  m.def("bvn_cdf", &kfdp::bvn_cdf, "a"_a, "b"_a, "rho"_a);
  m.def("two_sided_equicorr_F", &kfdp::two_sided_equicorr_F, "u"_a, "v"_a, "rho"_a);

  m.def("simulate", &simulate, "procedure"_a, "n"_a = 100, "pi0"_a = 0.5, "rho"_a = 0.0, "gamma"_a = "1/10", "k"_a = 1,
        "alpha"_a = 0.05, "effect"_a = 3.1622776601683795, "reps"_a = 2000, "seed"_a = 20240101,
        "dependence"_a = "uniform", "threads"_a = 0);
  m.def("procedure_names", [] {
    std::vector<std::string> out;
    for (std::string_view s : kfdp::procedure_names()) out.emplace_back(s);
    return out;
  });

  m.def("verify",
        [](const std::string& suite, std::uint64_t fuzz_count, std::uint64_t seed) {
          std::vector<kfdp::SuiteRow> rows;
          {
            py::gil_scoped_release release;
            rows = kfdp::run_verify_suite(suite, fuzz_count, seed);
          }
          py::list out;
          for (const kfdp::SuiteRow& r : rows) {
            out.append(py::dict("check"_a = r.check, "instances"_a = r.instances, "violations"_a = r.violations,
                                "passed"_a = r.passed()));
          }
          return out;
        },
        "suite"_a = "all", "fuzz_count"_a = 100000, "seed"_a = 1);
}

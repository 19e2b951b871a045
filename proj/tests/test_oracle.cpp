#include <doctest.h>

#include <cmath>

#include "gen.hpp"
#include "kfdp/errors.hpp"
#include "kfdp/oracle.hpp"

using namespace kfdp;

namespace {

SmallInstance instance(std::vector<double> p, std::vector<bool> nulls, std::vector<double> c, int k = 1) {
  SmallInstance s;
  s.p = std::move(p);
  s.is_null = std::move(nulls);
  s.constants = std::move(c);
  s.gamma = GammaRational(1, 10);
  s.k = k;
  return s;
}

}  // namespace

TEST_CASE("pointwise checks hold on hand instances") {
  // All nulls, all rejected: V = R = 3, so the exceedance event occurs.
  const SmallInstance s = instance({0.01, 0.02, 0.03}, {true, true, true}, {0.05, 0.05, 0.05});
  CHECK(check_stepdown_exceedance(s).ok);
  CHECK(check_stepup_exceedance(s).ok);
  CHECK(check_markov_order_stat(s).ok);
  CHECK(check_pairwise_order_stat(s).ok);
  CHECK(check_simes_containment(s).ok);

  const SmallInstance mixed = instance({0.001, 0.5, 0.02, 0.2}, {false, true, true, false}, {0.01, 0.02, 0.3, 0.6}, 2);
  CHECK(check_stepdown_exceedance(mixed).ok);
  CHECK(check_stepup_exceedance(mixed).ok);
}

TEST_CASE("small instances validate their inputs") {
  CHECK_THROWS_AS(instance({0.1}, {true, false}, {0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(instance({0.1, 0.2}, {true, false}, {0.2, 0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(instance({1.1}, {true}, {0.1}).validate(), ConfigError);
  CHECK_THROWS_AS(instance(std::vector<double>(9, 0.1), std::vector<bool>(9, true), std::vector<double>(9, 0.1))
                      .validate(),
                  ConfigError);
  CHECK(instance({0.1, 0.2}, {true, false}, {0.1, 0.2}).n0() == 1);
}

TEST_CASE("index checks") {
  for (std::int64_t n = 1; n <= 40; ++n) {
    for (std::int64_t n0 = 1; n0 <= n; ++n0) {
      CHECK(check_index_identity(n, n0, GammaRational(1, 4)).ok);
      CHECK(check_index_bound(n, n0, GammaRational(2, 3)).ok);
    }
  }
  CHECK_THROWS_AS(check_index_identity(10, 5, GammaRational(2, 3)), ConfigError);
}

TEST_CASE("lattice") {
  const std::vector<double> l = pvalue_lattice();
  CHECK(l.size() == 15);
  CHECK(l.front() == doctest::Approx(0.01));
  CHECK(l.back() == doctest::Approx(0.99));
}

TEST_CASE("exhaustive grid up to n = 2 and a short fuzz run are clean") {
  for (const CheckTally& t : run_exhaustive_lemmas(2)) {
    INFO(t.name << ": " << t.first_failure);
    CHECK(t.instances > 0);
    CHECK(t.passed());
  }
  for (const CheckTally& t : run_fuzz_lemmas(2000, 5, 8)) {
    INFO(t.name << ": " << t.first_failure);
    CHECK(t.instances == 2000);
    CHECK(t.passed());
  }
}

TEST_CASE("property: the checks hold on random instances") {
  gen::Gen g(51);
  for (int it = 0; it < 5000; ++it) {
    const std::size_t n = static_cast<std::size_t>(g.integer(1, 8));
    SmallInstance s = instance(g.pvalues(n), g.labels(n), g.constants(n), g.integer(1, static_cast<int>(n)));
    s.gamma = GammaRational(g.integer(0, 9), 20);
    s.alpha = 0.01 + 0.5 * g.unit();
    CHECK(check_stepdown_exceedance(s).ok);
    CHECK(check_stepup_exceedance(s).ok);
    CHECK(check_markov_order_stat(s).ok);
    CHECK(check_pairwise_order_stat(s).ok);
    CHECK(check_simes_containment(s).ok);
  }
}

TEST_CASE("reference constants agree with the closed forms") {
  NaiveParams p;
  p.n = 10;
  const NaiveResult lr = naive_constants(Family::lr, p);
  CHECK(lr.constants.front() == doctest::Approx(0.005));
  p.template_kind = TemplateKind::gbs;
  CHECK(naive_constants(Family::thm33, p).scaling == doctest::Approx(18.0 / 49).epsilon(1e-14));
  p.template_kind = TemplateKind::lr;
  p.k = 2;
  CHECK(naive_constants(Family::thm36, p).scaling == doctest::Approx(487.0 / 6048).epsilon(1e-14));
  p.pairwise = PairwiseNullF::independence();
  CHECK(naive_constants(Family::thm34, p).scaling == doctest::Approx(9649.0 / 56000).epsilon(1e-14));
  p.k = 1;
  CHECK_THROWS_AS(naive_constants(Family::thm34, p), ConfigError);
  p.pairwise.reset();
  CHECK_THROWS_AS(naive_constants(Family::thm37, p), ConfigError);
}

TEST_CASE("verify suites") {
  CHECK_THROWS_AS(run_verify_suite("everything", 10, 1), ConfigError);
  for (const SuiteRow& r : run_verify_suite("pairdist", 0, 1)) {
    INFO(r.check << ": " << r.detail);
    CHECK(r.passed());
  }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "mata/distributions.hpp"
#include "mata/errors.hpp"
#include "mata/regression.hpp"
#include "mata/weights.hpp"

using namespace mata;

namespace {

// Two-model weight computed straight from the two criteria values.
double weight_from_criteria(double crit1, double crit2) {
  const double lo = std::fmin(crit1, crit2);
  const double e1 = std::exp(-0.5 * (crit1 - lo));
  const double e2 = std::exp(-0.5 * (crit2 - lo));
  return e1 / (e1 + e2);
}

double explicit_mic_difference_weight(double z, double d, int m, double mult) {
  const int p = 3, n = m + p;
  const double sigma2 = 1.7;
  const double rss = m * sigma2;
  const double rss_star = rss * (1.0 + z / m);
  const double c2 = mult * std::log(rss / n) + d * p;
  const double c1 = mult * std::log(rss_star / n) + d * (p - 1);
  return weight_from_criteria(c1, c2);
}

RegressionSummary random_summary(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(6, 30), p_dist(2, 5);
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi(1.0);
  const int n = n_dist(rng), p = p_dist(rng);
  const double v_tau = 0.1 + chi(rng);
  return make_summary(normal(rng), 2.0 * normal(rng), 0.2 + chi(rng), 0.5, v_tau, 0.3, n, p);
}

}  // namespace

TEST_CASE("mic weight named values") {
  for (int m : {1, 2, 10, 500}) {
    CHECK(mic_weight(0.0, 0.0, DegreesOfFreedom(m)) == 0.5);
    for (double d : {0.5, 2.0, 7.0}) {
      CHECK(mic_weight(0.0, d, DegreesOfFreedom(m)) == doctest::Approx(1.0 / (1.0 + std::exp(-d / 2.0))).epsilon(1e-15));
    }
  }
  CHECK_THROWS_AS(mic_weight(-1.0, 0.0, DegreesOfFreedom(3)), InputError);
  CHECK_THROWS_AS(mic_weight(1.0, -0.1, DegreesOfFreedom(3)), InputError);
}

TEST_CASE("mic weight agrees with the criterion-difference form") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit;
  for (int i = 0; i < 500; ++i) {
    const int m = 1 + static_cast<int>(unit(rng) * 100);
    const double z = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double d = 8.0 * unit(rng);
    const double w = mic_weight(z, d, DegreesOfFreedom(m));
    CHECK(std::fabs(w - explicit_mic_difference_weight(z, d, m, m)) < 1e-12);
  }
}

TEST_CASE("mic weight monotonicity and decay") {
  for (int m : {1, 2, 5, 40}) {
    const DegreesOfFreedom dof(m);
    for (double d : {0.0, 2.0, 8.0}) {
      double prev = 1.0;
      for (double z = 0.0; z < 1e6; z = z * 1.5 + 0.01) {
        const double w = mic_weight(z, d, dof);
        CHECK(w > 0.0);
        CHECK(w < 1.0);
        CHECK(w < prev);
        prev = w;
        CHECK(w < mic_weight(z, d + 0.5, dof));
        // w <= (1 + z/m)^{-m/2} e^{d/2}
        CHECK(w <= std::exp(-0.5 * m * std::log1p(z / m) + 0.5 * d) * (1.0 + 1e-12));
      }
      CHECK(mic_weight(1e300, d, dof) < 1e-100);
    }
  }
  for (int m : {4, 10, 100}) {
    for (double d : {0.0, 2.0, 8.0}) CHECK(mic_weight(1e4 * m, d, DegreesOfFreedom(m)) < 1e-6);
  }
}

TEST_CASE("gic weight") {
  const DegreesOfFreedom m(16);
  CHECK(gic_weight(0.0, 0.0, 20, m) == 0.5);
  CHECK(std::fabs(gic_weight(1.0, 2.0, 20, m) - explicit_mic_difference_weight(1.0, 2.0, 16, 20)) < 1e-12);
  for (double z : {0.1, 1.0, 10.0}) CHECK(gic_weight(z, 2.0, 20, m) <= mic_weight(z, 2.0, m));
  CHECK_THROWS_AS(gic_weight(1.0, 2.0, 16, m), InputError);
}

TEST_CASE("criteria") {
  std::mt19937_64 rng(17);
  RegressionSummary zero = make_summary(1.0, 0.0, 2.0, 1.0, 1.0, 0.1, 12, 3);
  for (double d : {0.5, 2.0}) {
    const CriteriaPair c = criteria(zero, d, CriterionFamily::Mic);
    CHECK(c.crit1 - c.crit2 == doctest::Approx(-d));
    CHECK_FALSE(c.selects_full());
  }
  for (int i = 0; i < 200; ++i) {
    const RegressionSummary s = random_summary(rng);
    const double d = 8.0 * (i % 17) / 16.0;
    const auto c = criteria(s, d, CriterionFamily::Mic);
    CHECK(std::fabs(model1_weight(c) - mic_weight(s.gamma_hat * s.gamma_hat, d, DegreesOfFreedom(s.m))) < 1e-12);
    const auto g = criteria(s, std::log(s.n), CriterionFamily::Gic);
    const auto g0 = criteria(s, 0.0, CriterionFamily::Gic);
    CHECK((g.crit2 - g0.crit2) - (g.crit1 - g0.crit1) == doctest::Approx(std::log(s.n)));
  }
  RegressionSummary perfect = zero;
  perfect.sigma2_hat = 0.0;
  CHECK_THROWS_AS(criteria(perfect, 1.0, CriterionFamily::Mic), InputError);
}

TEST_CASE("equal squared gamma gives equal weights") {
  const RegressionSummary s1 = make_summary(1.0, 2.0, 4.0, 0.3, 1.0, 0.2, 15, 3);
  const RegressionSummary s2 = make_summary(-7.0, -1.0, 0.25, 2.0, 4.0, -0.6, 14, 2);
  REQUIRE(s1.gamma_hat * s1.gamma_hat == s2.gamma_hat * s2.gamma_hat);
  CHECK(mic_weight(s1.gamma_hat * s1.gamma_hat, 2.0, DegreesOfFreedom(s1.m)) ==
        mic_weight(s2.gamma_hat * s2.gamma_hat, 2.0, DegreesOfFreedom(s2.m)));
}

TEST_CASE("mallows cp") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 100; ++i) {
    const RegressionSummary s = random_summary(rng);
    const CpPair cp = cp_pair(s);
    CHECK(cp.cp2 == s.p);
    // Cp = RSS / sigma2_hat - n + 2 (number of parameters), M1 having p - 1.
    CHECK(std::fabs(cp.cp1 - (s.rss_star / (s.rss / s.m) - s.n + 2.0 * (s.p - 1))) < 1e-8);
  }
  const RegressionSummary zero = make_summary(1.0, 0.0, 2.0, 1.0, 1.0, 0.1, 12, 3);
  CHECK(cp_pair(zero).cp1 == doctest::Approx(1.0));
  CHECK_FALSE(cp_pair(zero).selects_full());
}

TEST_CASE("cp-equivalent penalty") {
  CHECK(cp_equivalent_d(DegreesOfFreedom(1)) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  CHECK(cp_equivalent_d(DegreesOfFreedom(2)) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  CHECK(std::fabs(cp_equivalent_d(DegreesOfFreedom(1'000'000)) - 2.0) < 1e-5);
  double prev = 0.0;
  for (int m = 1; m < 300; ++m) {
    const double d = cp_equivalent_d(DegreesOfFreedom(m));
    CHECK(d > prev);
    CHECK(d < 2.0);
    prev = d;
  }
}

TEST_CASE("cp and cp-equivalent mic make the same choice") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    const RegressionSummary s = random_summary(rng);
    const double d = cp_equivalent_d(DegreesOfFreedom(s.m));
    CHECK(cp_pair(s).selects_full() == criteria(s, d, CriterionFamily::Mic).selects_full());
  }
}

TEST_CASE("significance level of the mic rule") {
  for (int m : {1, 3, 11}) {
    const DegreesOfFreedom dof(m);
    CHECK(mic_significance_level(0.0, dof) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::fabs(mic_significance_level(cp_equivalent_d(dof), dof) -
                    2.0 * (1.0 - student_t_cdf(std::sqrt(2.0), dof))) < 1e-12);
    double prev = 1.1;
    for (double d = 0.0; d <= 12.0; d += 0.25) {
      const double level = mic_significance_level(d, dof);
      CHECK(level < prev);
      CHECK(level > 0.0);
      prev = level;
    }
  }

  // m = 10, d = 2: the rule rejects tau = 0 when m log(1 + gamma_hat^2 / m) > d.
  std::mt19937_64 rng(314);
  std::normal_distribution<double> normal;
  std::chi_squared_distribution<double> chi(10.0);
  const int sims = 1'000'000;
  int chosen = 0;
  for (int i = 0; i < sims; ++i) {
    const RegressionSummary s = make_summary(0.0, normal(rng), chi(rng) / 10.0, 1.0, 1.0, 0.0, 12, 2);
    if (criteria(s, 2.0, CriterionFamily::Mic).selects_full()) ++chosen;
  }
  const double level = mic_significance_level(2.0, DegreesOfFreedom(10));
  const double se = std::sqrt(level * (1.0 - level) / sims);
  CHECK(std::fabs(static_cast<double>(chosen) / sims - level) < 3.0 * se);
}

TEST_CASE("weight specs") {
  const DegreesOfFreedom m(6);
  CHECK(WeightSpec::mic(2.0)(3.0, m) == mic_weight(3.0, 2.0, m));
  CHECK(WeightSpec::gic(2.0, 9)(3.0, m) == gic_weight(3.0, 2.0, 9, m));
  CHECK(WeightSpec::none()(0.0, m) == 0.0);
  CHECK(WeightSpec::none().is_zero());
  CHECK(WeightSpec::mic(1.0).with_d(3.0).d() == 3.0);
  CHECK_THROWS_AS(WeightSpec::mic(-1.0), InputError);

  const auto decaying = WeightSpec::custom([](double z) { return 1.0 / (1.0 + z); }, "hyperbolic");
  CHECK_FALSE(decaying.validated());
  CHECK(decaying.label() == "hyperbolic");
  CHECK(decaying(1.0, m) == 0.5);
  CHECK_THROWS_AS(WeightSpec::custom([](double z) { return z < 5 ? 0.2 : 0.4; }), InputError);
  CHECK_THROWS_AS(WeightSpec::custom([](double) { return 1.5; }), InputError);
  CHECK_THROWS_AS(WeightSpec::custom([](double) { return 0.5; }), InputError);
  CHECK_NOTHROW(WeightSpec::custom_unchecked([](double) { return 1.0; }));
}

#include "selfcheck.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>

#include "mata/distributions.hpp"
#include "mata/errors.hpp"
#include "mata/performance.hpp"
#include "mata/regression.hpp"
#include "mata/tail.hpp"
#include "mata/weights.hpp"

namespace mata::cli {
namespace {

ProblemConfig make_config(int m, double rho, double d) {
  return ProblemConfig{DegreesOfFreedom(m), rho, 0.05, WeightSpec::mic(d)};
}

CheckResult at_most(std::string name, double achieved, double tolerance, std::string detail = {}) {
  return CheckResult{std::move(name), achieved, tolerance, achieved <= tolerance, std::move(detail)};
}

CheckResult tail_limit() {
  const TailModel model(make_config(10, 0.8, 2.0));
  const TailSolution s = model.solve(30.0);
  const double t = model.standard_quantile();
  const double worst = std::fmax(std::fabs(s.a_lower + s.a_upper), std::fabs((s.a_lower - s.a_upper) - 2.0 * t));
  return at_most("tail_limit_gamma_30", worst, 1e-4, "rho=0.8 m=10 d=2");
}

CheckResult tail_symmetry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> gamma(-8.0, 8.0);
  double worst = 0.0;
  for (int m : {1, 10}) {
    for (double rho : {0.0, 0.8}) {
      const TailModel model(make_config(m, rho, 2.0));
      for (int i = 0; i < 20; ++i) {
        const double g = gamma(rng);
        worst = std::fmax(worst, std::fabs(model.solve(-g).a_upper + model.solve(g).a_lower));
      }
    }
  }
  return at_most("tail_symmetry", worst, 1e-10, "a_u(-g) = -a_l(g), 80 draws");
}

CheckResult tail_residual() {
  const TailModel model(make_config(5, 0.8, 2.0));
  double worst = 0.0;
  for (double u : {0.025, 0.5, 0.975}) {
    for (int i = -20; i <= 20; ++i) {
      const double g = 0.5 * i;
      worst = std::fmax(worst, std::fabs(model.k_value(model.solve_tail(u, g), g) - u));
    }
  }
  return at_most("tail_residual", worst, 1e-12, "k(a(u), g) = u on g in [-10, 10]");
}

CheckResult delta_bracket(std::mt19937_64& rng, int draws) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const int m = 1 + static_cast<int>(unit(rng) * 30);
    const double rho = -0.95 + 1.9 * unit(rng);
    const double d = 8.0 * unit(rng);
    const TailModel model(make_config(m, rho, d));
    const double u = 0.001 + 0.998 * unit(rng);
    const double x = -10.0 + 20.0 * unit(rng);
    const double y = 0.05 + 3.0 * unit(rng);
    const double delta = model.delta_u(u, x, y);
    const DeltaBracket b = model.delta_bracket(u, x, y);
    const double outside = std::fmax(0.0, std::fmax(b.lower() - delta, delta - b.upper()));
    const double identity = std::fabs(delta - y * model.solve_tail(u, x / y));
    worst = std::fmax(worst, std::fmax(outside, identity / std::fmax(1.0, std::fabs(delta))));
  }
  return at_most("delta_bracket_identity", worst, 1e-9, std::to_string(draws) + " random (u, x, y, cfg)");
}

RegressionSummary random_summary(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_dist(6, 30);
  std::uniform_int_distribution<int> p_dist(2, 5);
  std::normal_distribution<double> normal;
  const int n = n_dist(rng);
  const int p = p_dist(rng);
  DesignData data;
  data.X.resize(n, p);
  data.Y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.X(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) data.X(i, j) = normal(rng);
    data.Y(i) = normal(rng) + 0.5 * normal(rng) * data.X(i, p - 1);
  }
  data.a = Eigen::VectorXd::Zero(p);
  data.a(0) = 1.0;
  data.c = Eigen::VectorXd::Zero(p);
  data.c(p - 1) = 1.0;
  data.t = 0.0;
  return fit_summary(data);
}

CheckResult cp_mic_equivalence(std::mt19937_64& rng, int datasets) {
  int mismatches = 0;
  for (int i = 0; i < datasets; ++i) {
    const RegressionSummary s = random_summary(rng);
    const double d = cp_equivalent_d(DegreesOfFreedom(s.m));
    if (cp_pair(s).selects_full() != criteria(s, d, CriterionFamily::Mic).selects_full()) ++mismatches;
  }
  return at_most("cp_mic_decision_equivalence", mismatches, 0.0, std::to_string(datasets) + " datasets");
}

CheckResult mic_level_formula() {
  double worst = 0.0;
  for (int m : {1, 5, 10, 11, 50}) {
    const DegreesOfFreedom dof(m);
    const double level = mic_significance_level(cp_equivalent_d(dof), dof);
    worst = std::fmax(worst, std::fabs(level - 2.0 * (1.0 - student_t_cdf(std::sqrt(2.0), dof))));
  }
  return at_most("mic_level_at_cp_penalty", worst, 1e-12, "level at d = m log(1 + 2/m) is 2(1 - G_m(sqrt 2))");
}

// Under tau = 0, tau_hat / (sigma v_tau^{1/2}) ~ N(0, 1) and m sigma2_hat / sigma^2 ~ chi2_m.
CheckResult mic_level_simulation(std::uint64_t seed, std::int64_t sims) {
  double worst = 0.0;
  std::string detail;
  const int ms[] = {5, 10, 11};
  for (int k = 0; k < 3; ++k) {
    const int m = ms[k];
    const DegreesOfFreedom dof(m);
    const double d = k == 0 ? 1.0 : k == 1 ? 2.0 : cp_equivalent_d(dof);
    std::mt19937_64 rng(seed + k);
    std::normal_distribution<double> normal;
    std::chi_squared_distribution<double> chi_sq(m);
    std::int64_t chosen = 0;
    for (std::int64_t i = 0; i < sims; ++i) {
      RegressionSummary s;
      s.m = m;
      s.p = 2;
      s.n = m + 2;
      s.v_tau = 1.0;
      s.tau_hat = normal(rng);
      s.sigma2_hat = chi_sq(rng) / m;
      if (criteria(s, d, CriterionFamily::Mic).selects_full()) ++chosen;
    }
    const double level = mic_significance_level(d, dof);
    const double empirical = static_cast<double>(chosen) / static_cast<double>(sims);
    const double se = std::sqrt(level * (1.0 - level) / static_cast<double>(sims));
    const double z = std::fabs(empirical - level) / se;
    worst = std::fmax(worst, z);
    std::ostringstream os;
    os << (k ? "; " : "") << "m=" << m << " empirical=" << empirical << " formula=" << level;
    detail += os.str();
  }
  return at_most("mic_level_simulation", worst, 3.0, detail + " (|z| in binomial se)");
}

CheckResult degenerate_weight(const QuadratureOptions& q) {
  ProblemConfig cfg{DegreesOfFreedom(10), 0.8, 0.05, WeightSpec::none()};
  const PerformanceModel model(cfg, q);
  double worst = 0.0;
  for (double g : {0.0, 1.0, 3.0}) {
    const GammaMoments mo = model.evaluate(g);
    const Estimate sel = model.scaled_length(mo.length_numerator, Estimate{0.95, 0.0});
    worst = std::fmax(worst, std::fabs(mo.coverage.value - 0.95) / mo.coverage.error_bound);
    worst = std::fmax(worst, std::fabs(sel.value - 1.0) / sel.error_bound);
  }
  return at_most("degenerate_weight_exact", worst, 1.0, "|error| / error_bound with w = 0");
}

CheckResult coverage_limit(const QuadratureOptions& q) {
  const double c = coverage_probability(30.0, make_config(10, 0.8, 2.0), q).value;
  return at_most("coverage_limit_gamma_30", std::fabs(c - 0.95), 1e-3, "rho=0.8 m=10 d=2");
}

struct GatePoint {
  int m;
  double rho, d, gamma;
};

CheckResult quadrature_vs_mc(const std::vector<GatePoint>& points, std::int64_t samples, const QuadratureOptions& q) {
  double worst = 0.0;
  std::ostringstream detail;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const ProblemConfig cfg = make_config(p.m, p.rho, p.d);
    const GammaMoments mo = PerformanceModel(cfg, q).evaluate(p.gamma);
    const McEstimate mc = mc_oracle(p.gamma, cfg, samples, 1000 + i);
    const double zc = std::fabs(mo.coverage.value - mc.coverage) / mc.se_coverage;
    const double zl = std::fabs(mo.length_numerator.value - mc.length_numerator) / mc.se_length;
    worst = std::fmax(worst, std::fmax(zc, zl));
  }
  detail << points.size() << " points, " << samples << " samples each (|z| in MC se)";
  return at_most("quadrature_vs_mc", worst, 3.0, detail.str());
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const SelfcheckOptions& options, std::ostream& progress) {
  std::mt19937_64 rng(20240607);
  const QuadratureOptions q{};
  std::vector<std::function<CheckResult()>> checks = {
      [] { return tail_limit(); },
      [&] { return tail_symmetry(rng); },
      [] { return tail_residual(); },
      [&] { return delta_bracket(rng, options.full ? 500 : 100); },
      [&] { return cp_mic_equivalence(rng, options.full ? 10000 : 1000); },
      [] { return mic_level_formula(); },
      [&] { return mic_level_simulation(77, options.full ? 1000000 : 200000); },
      [&] { return degenerate_weight(q); },
      [&] { return coverage_limit(q); },
  };
  if (options.full) {
    const std::vector<GatePoint> gate = {
        {50, 0.05, 0.0, 0.0}, {50, 0.05, 0.0, 2.0}, {50, 0.05, 0.0, 5.0},
        {10, 0.8, 2.0, 1.0},  {50, 0.8, 4.0, 2.5},  {200, 0.8, 8.0, 4.0},
        {1, 0.0, 2.0, 0.0},   {2, 0.0, 4.0, 2.0},   {3, 0.0, 8.0, 4.0},
        {1, 0.8, 0.0, 0.5},   {2, 0.8, 2.0, 1.5},   {3, 0.8, 6.0, 3.0},
    };
    checks.push_back([&, gate] { return quadrature_vs_mc(gate, 1000000, q); });
  } else {
    checks.push_back([&] { return quadrature_vs_mc({{10, 0.8, 2.0, 1.0}}, 100000, q); });
  }

  std::vector<CheckResult> results;
  for (auto& check : checks) {
    CheckResult r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.name = "check_failed_with_exception";
      r.detail = e.what();
      r.passed = false;
    }
    progress << (r.passed ? "PASS " : "FAIL ") << r.name << "  achieved=" << r.achieved << "  tolerance=" << r.tolerance;
    if (!r.detail.empty()) progress << "  (" << r.detail << ")";
    progress << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace mata::cli

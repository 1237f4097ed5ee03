// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "mata/distributions.hpp"
#include "mata/performance.hpp"
#include "mata/regression.hpp"
#include "mata/tail.hpp"
#include "mata/weights.hpp"

using namespace mata;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

ProblemConfig mic_config(int m, double rho, double d) {
  return ProblemConfig{DegreesOfFreedom(m), rho, 0.05, WeightSpec::mic(d)};
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double boost_t_cdf(double x, int m) { return boost::math::cdf(boost::math::students_t_distribution<double>(m), x); }
double boost_t_quantile(double p, int m) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(m), p);
}

Outcome criterion1() {
  const TailSolution s = tail_solution(30.0, mic_config(10, 0.8, 2.0));
  const double sum = std::fabs(s.a_lower + s.a_upper);
  const double diff = std::fabs((s.a_lower - s.a_upper) - 2.0 * boost_t_quantile(0.975, 10));
  return {sum < 1e-4 && diff < 1e-4, "|a_l+a_u|=" + fmt("%.3g", sum) + " |a_l-a_u-2t|=" + fmt("%.3g", diff)};
}

Outcome criterion2() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> g_dist(-8.0, 8.0);
  double worst = 0.0;
  for (int m : {1, 10}) {
    for (double rho : {0.0, 0.8}) {
      const ProblemConfig cfg = mic_config(m, rho, 2.0);
      const TailModel model(cfg);
      for (int i = 0; i < 50; ++i) {
        const double g = g_dist(rng);
        // Two independent equations: k = alpha/2 at -g and k = 1 - alpha/2 at g.
        const double au = model.solve_tail(0.025, -g);
        const double al = model.solve_tail(0.975, g);
        worst = std::fmax(worst, std::fabs(au + al));
      }
    }
  }
  return {worst < 1e-10, "max |a_u(-g) + a_l(g)| = " + fmt("%.3g", worst)};
}

Outcome criterion3() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit;
  double worst_identity = 0.0;
  int outside = 0;
  for (int i = 0; i < 500; ++i) {
    const int m = 1 + static_cast<int>(unit(rng) * 50);
    const double rho = -0.95 + 1.9 * unit(rng);
    const double d = 8.0 * unit(rng);
    const TailModel model(mic_config(m, rho, d));
    const double u = 0.001 + 0.998 * unit(rng);
    const double x = -12.0 + 24.0 * unit(rng);
    const double y = 0.02 + 4.0 * unit(rng);
    const double delta = model.delta_u(u, x, y);
    // Bracket endpoints written out independently with boost quantiles.
    const double q1 = boost_t_quantile(u, m + 1), q2 = boost_t_quantile(u, m);
    const double d1 = rho * x + q1 * y * std::sqrt((m + x * x / (y * y)) / (m + 1.0)) * std::sqrt(1.0 - rho * rho);
    const double d2 = q2 * y;
    const double lo = std::fmin(d1, d2), hi = std::fmax(d1, d2);
    const double slack = 1e-12 * std::fmax(1.0, std::fabs(delta));
    if (delta < lo - slack || delta > hi + slack) ++outside;
    worst_identity = std::fmax(worst_identity, std::fabs(delta - y * model.solve_tail(u, x / y)));
  }
  return {outside == 0 && worst_identity < 1e-9,
          std::to_string(outside) + " outside bracket, max identity error " + fmt("%.3g", worst_identity)};
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> n_dist(6, 30), p_dist(2, 5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> effect(-1.0, 1.0);
  int mismatches = 0, full_chosen = 0;
  const int datasets = 10000;
  for (int k = 0; k < datasets; ++k) {
    const int n = n_dist(rng), p = p_dist(rng);
    DesignData d;
    d.X.resize(n, p);
    d.Y.resize(n);
    const double slope = effect(rng);
    for (int i = 0; i < n; ++i) {
      d.X(i, 0) = 1.0;
      for (int j = 1; j < p; ++j) d.X(i, j) = normal(rng);
      d.Y(i) = slope * d.X(i, p - 1) + normal(rng);
    }
    d.a = Eigen::VectorXd::Zero(p);
    d.a(0) = 1.0;
    d.c = Eigen::VectorXd::Zero(p);
    d.c(p - 1) = 1.0;
    const RegressionSummary s = fit_summary(d);
    const bool cp = cp_pair(s).selects_full();
    const bool mic = criteria(s, cp_equivalent_d(DegreesOfFreedom(s.m)), CriterionFamily::Mic).selects_full();
    if (cp != mic) ++mismatches;
    if (cp) ++full_chosen;
  }
  return {mismatches == 0, std::to_string(mismatches) + " disagreements in " + std::to_string(datasets) +
                               " datasets (full model chosen " + std::to_string(full_chosen) + " times)"};
}

// Datasets from y = b0 + b1 x + e with b1 = 0 (tau = 0); the MIC rule picks the full model or not.
Outcome criterion5() {
  struct Case {
    int m;
    double d;
  };
  const Case cases[] = {{5, 1.0}, {10, 2.0}, {11, 11.0 * std::log1p(2.0 / 11.0)}};
  const int sims = 1'000'000;
  double worst_z = 0.0;
  std::ostringstream detail;
  for (const auto& c : cases) {
    const int n = c.m + 2;
    std::mt19937_64 rng(500 + c.m);
    std::normal_distribution<double> normal;
    DesignData d;
    d.X.resize(n, 2);
    for (int i = 0; i < n; ++i) {
      d.X(i, 0) = 1.0;
      d.X(i, 1) = std::sin(1.0 + i);
    }
    d.Y.resize(n);
    d.a = Eigen::Vector2d(1.0, 0.0);
    d.c = Eigen::Vector2d(0.0, 1.0);
    int chosen = 0;
    for (int k = 0; k < sims; ++k) {
      for (int i = 0; i < n; ++i) d.Y(i) = 0.7 + normal(rng);
      if (criteria(fit_summary(d), c.d, CriterionFamily::Mic).selects_full()) ++chosen;
    }
    const double level = 2.0 * (1.0 - boost_t_cdf(std::sqrt(c.m * std::expm1(c.d / c.m)), c.m));
    const double library = mic_significance_level(c.d, DegreesOfFreedom(c.m));
    const double emp = static_cast<double>(chosen) / sims;
    const double z = std::fabs(emp - level) / std::sqrt(level * (1.0 - level) / sims);
    worst_z = std::fmax(worst_z, std::fmax(z, std::fabs(emp - library) / std::sqrt(library * (1.0 - library) / sims)));
    detail << "m=" << c.m << " emp=" << fmt("%.5f", emp) << " formula=" << fmt("%.5f", library) << "; ";
  }
  double formula_err = 0.0;
  for (int m : {5, 10, 11}) {
    const DegreesOfFreedom dof(m);
    formula_err = std::fmax(formula_err, std::fabs(mic_significance_level(cp_equivalent_d(dof), dof) -
                                                   2.0 * (1.0 - boost_t_cdf(std::sqrt(2.0), m))));
  }
  detail << "max |z|=" << fmt("%.2f", worst_z) << ", formula vs 2(1-G_m(sqrt 2)) " << fmt("%.2g", formula_err);
  return {worst_z <= 3.0 && formula_err < 1e-12, detail.str()};
}

Outcome criterion6() {
  const ProblemConfig cfg{DegreesOfFreedom(8), 0.7, 0.05, WeightSpec::none()};
  const PerformanceModel model(cfg);
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double g = 0.9 * i;
    const GammaMoments mo = model.evaluate(g);
    const Estimate sel = model.scaled_length(mo.length_numerator, Estimate{0.95, 0.0});
    const double rc = std::fabs(mo.coverage.value - 0.95) / mo.coverage.error_bound;
    const double rs = std::fabs(sel.value - 1.0) / sel.error_bound;
    worst = std::fmax(worst, std::fmax(rc, rs));
    if (rc > 1.0 || rs > 1.0) ++failures;
  }
  return {failures == 0, "max |error| / error_bound = " + fmt("%.3f", worst)};
}

Outcome criterion7() {
  struct Point {
    int m;
    double rho, d, gamma;
  };
  // Three points from each of the four scenarios.
  const Point pts[] = {
      {50, 0.05, 0.0, 0.0}, {50, 0.05, 2.0, 2.0}, {50, 0.05, 0.0, 5.0},
      {10, 0.8, 2.0, 1.0},  {50, 0.8, 4.0, 2.5},  {200, 0.8, 8.0, 4.0},
      {1, 0.0, 2.0, 0.0},   {2, 0.0, 4.0, 2.0},   {3, 0.0, 8.0, 4.0},
      {1, 0.8, 0.0, 0.5},   {2, 0.8, 2.0, 1.5},   {3, 0.8, 6.0, 3.0},
  };
  double worst = 0.0;
  int failures = 0;
  for (std::size_t i = 0; i < std::size(pts); ++i) {
    const auto& p = pts[i];
    const ProblemConfig cfg = mic_config(p.m, p.rho, p.d);
    const GammaMoments q = PerformanceModel(cfg).evaluate(p.gamma);
    const McEstimate mc = mc_oracle(p.gamma, cfg, 1'000'000, 7000 + i);
    const double zc = std::fabs(q.coverage.value - mc.coverage) / mc.se_coverage;
    const double zl = std::fabs(q.length_numerator.value - mc.length_numerator) / mc.se_length;
    if (zc > 3.0 || zl > 3.0) {
      ++failures;
      std::printf("  point %zu (m=%d rho=%g d=%g gamma=%g): z_cov=%.2f z_len=%.2f\n", i, p.m, p.rho, p.d, p.gamma, zc, zl);
    }
    worst = std::fmax(worst, std::fmax(zc, zl));
  }
  return {failures == 0, std::to_string(failures) + "/12 points outside 3 se, max |z| = " + fmt("%.2f", worst)};
}

Outcome criterion8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit;
  std::ostringstream detail;
  int failures = 0;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const int m = 1 + static_cast<int>(unit(rng) * 30);
    const ProblemConfig cfg = mic_config(m, -0.9 + 1.8 * unit(rng), 8.0 * unit(rng));
    const double g = 6.0 * unit(rng);
    const Estimate a = coverage_probability(g, cfg, QuadratureOptions{1e-8, 1e-8, 2000});
    const Estimate b = coverage_probability(g, cfg, QuadratureOptions{5e-9, 1e-8, 2000});
    const double ratio = std::fabs(a.value - b.value) / a.error_bound;
    worst = std::fmax(worst, ratio);
    if (!(ratio < 1.0)) ++failures;
  }
  return {failures == 0, "max |change| / error_bound = " + fmt("%.3f", worst)};
}

Outcome criterion9() {
  const ProblemConfig cfg = mic_config(50, 0.05, 0.0);
  const auto grid = ScanOptions{15.0, 0.05, 1e-4}.grid();
  const PerformanceCurve c = performance_curve(cfg, grid);
  double cov_dev = 0.0, sel_dev = 0.0;
  std::size_t worst_i = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double dc = std::fabs(c.coverage[i] - 0.95);
    if (dc > cov_dev) {
      cov_dev = dc;
      worst_i = i;
    }
    sel_dev = std::fmax(sel_dev, std::fabs(c.sel[i] - 1.0));
  }
  // Spot check at the worst coverage point with the oracle.
  const McEstimate mc = mc_oracle(grid[worst_i], cfg, 1'000'000, 9009);
  const bool mc_ok = std::fabs(mc.coverage - 0.95) + 3.0 * mc.se_coverage < 0.01;
  return {cov_dev < 0.01 && sel_dev < 0.02 && mc_ok, "max|C-0.95|=" + fmt("%.5f", cov_dev) + " max|SEL-1|=" +
                                                         fmt("%.5f", sel_dev) + " MC at worst gamma " +
                                                         fmt("%.5f", mc.coverage)};
}

std::vector<double> d_grid_half() {
  std::vector<double> g;
  for (int i = 0; i <= 16; ++i) g.push_back(0.5 * i);
  return g;
}

Outcome criterion10() {
  const auto grid = d_grid_half();
  std::ostringstream detail;
  bool ok = true;
  const auto check_rows = [&](const std::vector<LossGainRow>& rows) {
    for (const auto& r : rows) {
      if (!r.ok()) {
        ok = false;
        detail << "row d=" << r.d << " failed: " << r.error << "; ";
      }
    }
  };

  // (a) rho = 0.8, m = 10.
  const auto a = d_sweep(mic_config(10, 0.8, 0.0), grid);
  check_rows(a);
  bool a_ok = true;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double tol_cov = 2.0 * (a[i].cov_loss_err + a[i - 1].cov_loss_err);
    const double tol_sel = 2.0 * (a[i].sel_loss_err + a[i - 1].sel_loss_err);
    const double dc = a[i].cov_loss - a[i - 1].cov_loss;
    const double ds = a[i].sel_loss - a[i - 1].sel_loss;
    if (grid[i] <= 4.0 && !(dc > tol_cov)) a_ok = false;
    if (grid[i - 1] >= 4.0 && (dc < -tol_cov || ds < -tol_sel)) a_ok = false;
  }
  detail << "(a) " << (a_ok ? "ok" : "violated");

  // (b) rho = 0, m in {1, 2, 3}.
  bool b_ok = true;
  double max_cov_loss = 0.0;
  for (int m : {1, 2, 3}) {
    const auto b = d_sweep(mic_config(m, 0.0, 0.0), grid);
    check_rows(b);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      max_cov_loss = std::fmax(max_cov_loss, b[i].cov_loss);
      if (!(b[i].cov_loss < 0.05)) b_ok = false;
      if (i > 0 && b[i].sel_loss - b[i - 1].sel_loss < -2.0 * (b[i].sel_loss_err + b[i - 1].sel_loss_err)) {
        b_ok = false;
        detail << " [m=" << m << " sel_loss drops at d=" << grid[i] << "]";
      }
    }
  }
  detail << ", (b) " << (b_ok ? "ok" : "violated") << " max cov_loss " << fmt("%.4f", max_cov_loss);

  // (c) SEL(0) < 1 for rho = 0.8, m = 2, d = 2.
  const ProblemConfig c_cfg = mic_config(2, 0.8, 2.0);
  const Extremum c_min = min_coverage(c_cfg);
  const Estimate sel0 = sel_at_zero(c_cfg, c_min.value);
  const bool c_ok = sel0.value + sel0.error_bound < 1.0;
  detail << ", (c) SEL(0)=" << fmt("%.5f", sel0.value);
  return {ok && a_ok && b_ok && c_ok, detail.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

int run_cli(const std::string& threads, const std::string& args) {
  const std::string cmd = "MATA_THREADS=" + threads + " \"" MATA_CLI_PATH "\" " + args + " > /dev/null";
  return std::system(cmd.c_str());
}

Outcome criterion11() {
  const fs::path dir = fs::temp_directory_path() / "mata_acceptance";
  fs::create_directories(dir);
  const std::string curves = "curves --m 10 --rho 0.8 --d 2 --gamma-max 15 --step 0.05 --out ";
  const std::string sweep = "sweep --m 3 --rho 0.8 --d-from 0 --d-to 2 --d-step 0.5 --out ";
  bool ok = true;
  std::vector<std::string> outputs;
  for (const auto& [cmd, tag] : {std::pair{curves, "c"}, std::pair{sweep, "s"}}) {
    std::vector<std::string> contents;
    int k = 0;
    for (const char* threads : {"1", "1", "4"}) {
      const fs::path out = dir / (std::string(tag) + std::to_string(k++) + ".csv");
      if (run_cli(threads, cmd + out.string()) != 0) ok = false;
      contents.push_back(slurp(out));
    }
    if (contents[0].empty() || contents[0] != contents[1] || contents[0] != contents[2]) ok = false;
  }
  return {ok, ok ? "curves and sweep byte-identical over 2 runs at MATA_THREADS=1 and 1 at 4" : "outputs differ"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "large-gamma limits of a_l and a_u", 1, criterion1},
      {2, "a_u(-gamma) = -a_l(gamma)", 5, criterion2},
      {3, "delta_u inside its bracket and equal to y a(x/y)", 10, criterion3},
      {4, "Cp rule equals MIC rule at d = m log(1 + 2/m)", 60, criterion4},
      {5, "MIC significance level versus simulation", 120, criterion5},
      {6, "zero weight gives coverage 1 - alpha and SEL 1", 30, criterion6},
      {7, "quadrature agrees with Monte Carlo at 12 scenario points", 600, criterion7},
      {8, "halving epsilon moves coverage less than the error bound", 120, criterion8},
      {9, "scenario 1 recovers the standard interval", 300, criterion9},
      {10, "cov loss / sel loss / sel gain trends", 900, criterion10},
      {11, "byte-identical CSV across runs and thread counts", 120, criterion11},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.passed && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d: %s | %s | %.2fs (budget %.0fs%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}

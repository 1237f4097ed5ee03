#include "mata/performance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "mata/errors.hpp"
#include "mata/extremum.hpp"
#include "mata/parallel.hpp"
#include "mata/quadrature.hpp"

namespace mata {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSmaxGridEnd = 50.0;
constexpr double kSmaxGridStep = 0.1;
constexpr double kSmaxMargin = 1.05;

// Share of the requested tolerance given to each inner y-integral.
constexpr double kInnerRelShare = 1e-2;
constexpr double kInnerAbsShare = 1e-3;
constexpr double kOuterAbsShare = 1e-1;

double clamp_probability(double p) { return std::fmin(1.0, std::fmax(0.0, p)); }

void add_breakpoint(std::vector<double>& points, double v, double lo, double hi) {
  if (v > lo && v < hi) points.push_back(v);
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<GammaMoments> evaluate_grid(const PerformanceModel& model, const std::vector<double>& grid) {
  std::vector<GammaMoments> out(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { out[i] = model.evaluate(grid[i]); });
  return out;
}

// Golden-section refinement of `objective` (to be minimized) in the grid cell
// around `index`. Falls back to the grid point if refinement does not improve.
template <class Objective>
std::pair<double, GammaMoments> refine(const PerformanceModel& model, const std::vector<double>& grid,
                                       const std::vector<GammaMoments>& values, std::size_t index,
                                       double width, Objective objective) {
  const double lo = grid[index == 0 ? 0 : index - 1];
  const double hi = grid[std::min(index + 1, grid.size() - 1)];
  GammaMoments best = values[index];
  double best_gamma = grid[index];
  if (!(hi - lo > width)) return {best_gamma, best};
  const auto f = [&](double gamma) {
    const GammaMoments m = model.evaluate(gamma);
    const double value = objective(m);
    if (value < objective(best)) {
      best = m;
      best_gamma = gamma;
    }
    return value;
  };
  golden_section_minimize(f, lo, hi, width);
  return {best_gamma, best};
}

std::size_t argmin_index(const std::vector<GammaMoments>& values, auto objective) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (objective(values[i]) < objective(values[best])) best = i;
  }
  return best;
}

double coverage_key(const GammaMoments& g) { return g.coverage.value; }
double negative_numerator_key(const GammaMoments& g) { return -g.length_numerator.value; }

struct ScanSummary {
  std::vector<double> grid;
  std::vector<GammaMoments> values;
  double gamma_min_cov = 0.0;
  GammaMoments min_cov;
};

ScanSummary scan_min_coverage(const PerformanceModel& model, const std::vector<double>& grid, double width) {
  ScanSummary out;
  out.grid = grid;
  out.values = evaluate_grid(model, grid);
  const std::size_t i = argmin_index(out.values, coverage_key);
  std::tie(out.gamma_min_cov, out.min_cov) = refine(model, grid, out.values, i, width, coverage_key);
  return out;
}

}  // namespace

void QuadratureOptions::validate() const {
  if (!(epsilon > 0.0 && epsilon < 0.5)) throw InputError("epsilon must lie in (0, 0.5)");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InputError("rel_tol must lie in (0, 1)");
  if (max_subdivisions < 1) throw InputError("max_subdivisions must be >= 1");
}

PerformanceModel::PerformanceModel(ProblemConfig cfg, QuadratureOptions q)
    : tails_(std::move(cfg)), q_((q.validate(), q)), sigma_ratio_(tails_.config().m) {
  const double quarter = 0.25 * q_.epsilon;
  y_lower_ = sigma_ratio_.quantile(quarter);
  y_upper_ = sigma_ratio_.quantile(1.0 - quarter);
  z_lower_ = normal_quantile(quarter);
  z_upper_ = -z_lower_;

  double s_sup = tails_.standard_quantile();
  const int steps = static_cast<int>(std::lround(kSmaxGridEnd / kSmaxGridStep));
  for (int i = 0; i <= steps; ++i) s_sup = std::fmax(s_sup, tails_.solution(i * kSmaxGridStep).s);
  s_max_ = kSmaxMargin * s_sup;
}

TruncationBox PerformanceModel::box(double gamma) const {
  TruncationBox b;
  b.x_lower = gamma + z_lower_;
  b.x_upper = gamma + z_upper_;
  b.y_lower = y_lower_;
  b.y_upper = y_upper_;
  const double y_in = sigma_ratio_.cdf(y_upper_) - sigma_ratio_.cdf(y_lower_);
  const double x_out = normal_cdf(z_lower_) + normal_sf(z_upper_);
  b.coverage_bound = sigma_ratio_.cdf(y_lower_) + sigma_ratio_.sf(y_upper_) + y_in * x_out;
  const double below = sigma_ratio_.partial_mean_below(y_lower_);
  const double above = sigma_ratio_.partial_mean_above(y_upper_);
  const double inside = std::fmax(0.0, sigma_ratio_.mean() - below - above);
  b.numerator_bound = s_max_ * (below + above + inside * x_out);
  return b;
}

GammaMoments PerformanceModel::evaluate(double gamma) const {
  if (!std::isfinite(gamma)) throw InputError("gamma must be finite");
  const TruncationBox bx = box(gamma);
  const ProblemConfig& cfg = config();
  const double rho = cfg.rho;
  const double srho = std::sqrt(1.0 - rho * rho);
  const double md = cfg.m.value();
  const double mode = md > 1.0 ? std::sqrt((md - 1.0) / md) : 0.0;
  constexpr double log_phi_norm = -0.5 * std::numbers::ln2 - 0.5 * std::log(std::numbers::pi);

  // Range of g = x/y over the box, and the g values where the active y bound switches.
  const double g_corners[4] = {bx.x_lower / bx.y_lower, bx.x_lower / bx.y_upper, bx.x_upper / bx.y_lower,
                               bx.x_upper / bx.y_upper};
  const double g_lo = *std::min_element(std::begin(g_corners), std::end(g_corners));
  const double g_hi = *std::max_element(std::begin(g_corners), std::end(g_corners));
  const double v_lo = std::asinh(g_lo);
  const double v_hi = std::asinh(g_hi);

  std::vector<double> outer_points{v_lo, v_hi};
  for (double k = std::ceil(v_lo); k < v_hi; k += 1.0) add_breakpoint(outer_points, k, v_lo, v_hi);
  for (const double g : g_corners) add_breakpoint(outer_points, std::asinh(g), v_lo, v_hi);
  outer_points = sorted_unique(std::move(outer_points));

  const double inner_rel = kInnerRelShare * q_.rel_tol;
  const double inner_abs = kInnerAbsShare * q_.rel_tol;
  const double numerator_scale = sigma_ratio_.mean() * tails_.standard_quantile();

  auto outer = [&](double v) -> quad::Vec<4> {
    const double g = std::sinh(v);
    const double jac = std::cosh(v);
    double y_lo = bx.y_lower;
    double y_hi = bx.y_upper;
    if (g > 0.0) {
      y_lo = std::fmax(y_lo, bx.x_lower / g);
      y_hi = std::fmin(y_hi, bx.x_upper / g);
    } else if (g < 0.0) {
      y_lo = std::fmax(y_lo, bx.x_upper / g);
      y_hi = std::fmin(y_hi, bx.x_lower / g);
    } else if (!(bx.x_lower <= 0.0 && bx.x_upper >= 0.0)) {
      return {0.0, 0.0, 0.0, 0.0};
    }
    if (!(y_hi > y_lo)) return {0.0, 0.0, 0.0, 0.0};

    TailSolution sol;
    if (std::fabs(g) > kGammaLimit) {
      sol.a_lower = tails_.standard_quantile();
      sol.a_upper = -sol.a_lower;
      sol.s = sol.a_lower;
    } else {
      sol = tails_.solution(g);
    }

    auto inner = [&](double y) -> quad::Vec<2> {
      const double dx = y * g - gamma;
      const double base = std::exp(sigma_ratio_.log_pdf(y) + std::log(y) - 0.5 * dx * dx + log_phi_norm);
      const double shift = rho * dx;
      const double upper = (y * sol.a_lower - shift) / srho;
      const double lower = (y * sol.a_upper - shift) / srho;
      return {base * normal_interval_probability(lower, upper), base * y};
    };

    std::vector<double> inner_points{y_lo, y_hi};
    add_breakpoint(inner_points, mode, y_lo, y_hi);
    if (g != 0.0) add_breakpoint(inner_points, gamma / g, y_lo, y_hi);
    inner_points = sorted_unique(std::move(inner_points));

    const double s_scale = std::fmax(sol.s, 1.0);
    const quad::Vec<2> abs_tol{inner_abs / jac, inner_abs * numerator_scale / (jac * s_scale)};
    const auto r = quad::integrate<2>(inner, inner_points, abs_tol, inner_rel, q_.max_subdivisions);
    if (!r.converged) {
      std::ostringstream msg;
      msg << "inner quadrature exceeded " << q_.max_subdivisions << " subdivisions at g = " << g;
      throw QuadratureError(msg.str(), r.value[0], r.error[0]);
    }
    return {jac * r.value[0], jac * sol.s * r.value[1], jac * r.error[0], jac * sol.s * r.error[1]};
  };

  const quad::Vec<4> outer_tol{kOuterAbsShare * q_.rel_tol, kOuterAbsShare * q_.rel_tol * numerator_scale,
                               kInf, kInf};
  const auto res = quad::integrate<4>(outer, outer_points, outer_tol, q_.rel_tol, q_.max_subdivisions);
  if (!res.converged) {
    std::ostringstream msg;
    msg << "outer quadrature exceeded " << q_.max_subdivisions << " subdivisions at gamma = " << gamma;
    throw QuadratureError(msg.str(), res.value[0], res.error[0] + res.value[2]);
  }

  GammaMoments out;
  out.gamma = gamma;
  out.coverage.value = clamp_probability(res.value[0]);
  out.coverage.error_bound = res.error[0] + std::fabs(res.value[2]) + bx.coverage_bound;
  out.length_numerator.value = res.value[1];
  out.length_numerator.error_bound = res.error[1] + std::fabs(res.value[3]) + bx.numerator_bound;
  return out;
}

double PerformanceModel::sel_denominator(double c_min) const {
  if (!(c_min > 0.0 && c_min < 1.0)) throw InputError("c_min must lie in (0, 1)");
  return sigma_ratio_.mean() * tails_.t_m().quantile(0.5 * (1.0 + c_min));
}

Estimate PerformanceModel::scaled_length(const Estimate& numerator, const Estimate& c_min) const {
  const double t = tails_.t_m().quantile(0.5 * (1.0 + c_min.value));
  const double denom = sigma_ratio_.mean() * t;
  Estimate out;
  out.value = numerator.value / denom;
  // d t / d c = 1 / (2 g_m(t)).
  const double rel_t = c_min.error_bound / (2.0 * tails_.t_m().pdf(t) * t);
  out.error_bound = numerator.error_bound / denom + std::fabs(out.value) * rel_t;
  return out;
}

Estimate coverage_probability(double gamma, const ProblemConfig& cfg, const QuadratureOptions& q) {
  return PerformanceModel(cfg, q).evaluate(gamma).coverage;
}

Estimate scaled_expected_length(double gamma, const ProblemConfig& cfg, double c_min,
                                const QuadratureOptions& q) {
  const PerformanceModel model(cfg, q);
  model.sel_denominator(c_min);  // validates c_min
  return model.scaled_length(model.evaluate(gamma).length_numerator, Estimate{c_min, 0.0});
}

std::vector<double> ScanOptions::grid() const {
  validate();
  const auto steps = static_cast<long>(std::floor(gamma_max / step + 1e-9));
  std::vector<double> out;
  out.reserve(steps + 2);
  for (long i = 0; i <= steps; ++i) out.push_back(i * step);
  if (gamma_max - out.back() > 1e-9 * step) out.push_back(gamma_max);
  return out;
}

void ScanOptions::validate() const {
  if (!(gamma_max > 0.0) || !std::isfinite(gamma_max)) throw InputError("gamma_max must be positive");
  if (!(step > 0.0)) throw InputError("gamma step must be positive");
  if (step > gamma_max) throw InputError("gamma step must not exceed gamma_max");
  if (!(refine_width > 0.0)) throw InputError("refine width must be positive");
}

Extremum min_coverage(const ProblemConfig& cfg, const QuadratureOptions& q, const ScanOptions& scan) {
  const PerformanceModel model(cfg, q);
  const ScanSummary s = scan_min_coverage(model, scan.grid(), scan.refine_width);
  return Extremum{s.gamma_min_cov, s.min_cov.coverage};
}

Extremum max_sel(const ProblemConfig& cfg, const Estimate& c_min, const QuadratureOptions& q,
                 const ScanOptions& scan) {
  const PerformanceModel model(cfg, q);
  model.sel_denominator(c_min.value);
  const auto grid = scan.grid();
  const auto values = evaluate_grid(model, grid);
  const std::size_t i = argmin_index(values, negative_numerator_key);
  const auto [gamma, best] = refine(model, grid, values, i, scan.refine_width, negative_numerator_key);
  return Extremum{gamma, model.scaled_length(best.length_numerator, c_min)};
}

Estimate sel_at_zero(const ProblemConfig& cfg, const Estimate& c_min, const QuadratureOptions& q) {
  const PerformanceModel model(cfg, q);
  model.sel_denominator(c_min.value);
  return model.scaled_length(model.evaluate(0.0).length_numerator, c_min);
}

LossGainRow loss_gain(const ProblemConfig& cfg, const QuadratureOptions& q, const ScanOptions& scan) {
  const PerformanceModel model(cfg, q);
  const ScanSummary s = scan_min_coverage(model, scan.grid(), scan.refine_width);
  const std::size_t i = argmin_index(s.values, negative_numerator_key);
  const auto [gamma_sel, best] = refine(model, s.grid, s.values, i, scan.refine_width, negative_numerator_key);

  const Estimate c_min = s.min_cov.coverage;
  if (!(c_min.value > 0.0 && c_min.value < 1.0)) throw NumericalError("minimum coverage outside (0, 1)");
  const Estimate sel_max = model.scaled_length(best.length_numerator, c_min);
  const Estimate sel_zero = model.scaled_length(s.values.front().length_numerator, c_min);

  LossGainRow row;
  row.d = cfg.weight.d();
  row.cov_loss = (1.0 - cfg.alpha) - c_min.value;
  row.cov_loss_err = c_min.error_bound;
  row.sel_loss = sel_max.value - 1.0;
  row.sel_loss_err = sel_max.error_bound;
  row.sel_gain = 1.0 - sel_zero.value;
  row.sel_gain_err = sel_zero.error_bound;
  row.gamma_at_min_cov = s.gamma_min_cov;
  row.gamma_at_max_sel = gamma_sel;
  return row;
}

std::vector<LossGainRow> d_sweep(const ProblemConfig& base, const std::vector<double>& d_grid,
                                 const QuadratureOptions& q, const ScanOptions& scan) {
  if (d_grid.empty()) throw InputError("d grid must be nonempty");
  if (!std::is_sorted(d_grid.begin(), d_grid.end())) throw InputError("d grid must be sorted");
  base.validate();
  q.validate();
  scan.validate();
  std::vector<LossGainRow> rows(d_grid.size());
  parallel_for(d_grid.size(), [&](std::size_t i) {
    try {
      ProblemConfig cfg = base;
      cfg.weight = base.weight.with_d(d_grid[i]);
      rows[i] = loss_gain(cfg, q, scan);
    } catch (const std::exception& e) {
      rows[i] = LossGainRow{};
      rows[i].error = e.what();
    }
    rows[i].d = d_grid[i];
  });
  return rows;
}

PerformanceCurve performance_curve(const ProblemConfig& cfg, const std::vector<double>& gamma_grid,
                                   const QuadratureOptions& q) {
  if (gamma_grid.empty()) throw InputError("gamma grid must be nonempty");
  if (!std::is_sorted(gamma_grid.begin(), gamma_grid.end()) || gamma_grid.front() < 0.0) {
    throw InputError("gamma grid must be sorted and nonnegative");
  }
  const PerformanceModel model(cfg, q);
  const double width = 1e-4;
  const ScanSummary s = scan_min_coverage(model, gamma_grid, width);
  const Estimate c_min = s.min_cov.coverage;
  if (!(c_min.value > 0.0 && c_min.value < 1.0)) throw NumericalError("minimum coverage outside (0, 1)");

  PerformanceCurve curve;
  curve.gamma_grid = gamma_grid;
  curve.c_min_used = c_min.value;
  for (const auto& v : s.values) {
    const Estimate sel = model.scaled_length(v.length_numerator, c_min);
    curve.coverage.push_back(v.coverage.value);
    curve.coverage_err.push_back(v.coverage.error_bound);
    curve.sel.push_back(sel.value);
    curve.sel_err.push_back(sel.error_bound);
  }
  return curve;
}

}  // namespace mata

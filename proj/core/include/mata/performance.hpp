#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mata/distributions.hpp"
#include "mata/tail.hpp"

namespace mata {

struct QuadratureOptions {
  /// Total truncation budget for the integration rectangle, split four ways.
  double epsilon = 1e-8;
  /// Relative tolerance of the adaptive quadrature.
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;

  void validate() const;
};

struct Estimate {
  double value = 0.0;
  double error_bound = 0.0;
};

/// Coverage probability and E[W s(|X/W|)] at one gamma. Scaling the latter by
/// E[W] G_m^{-1}((1 + c_min)/2) gives the scaled expected length.
struct GammaMoments {
  double gamma = 0.0;
  Estimate coverage;
  Estimate length_numerator;
};

/// Integration rectangle in (x, y) = (tau_hat/(sigma v_tau^{1/2}), sigma_hat/sigma).
struct TruncationBox {
  double x_lower, x_upper;
  double y_lower, y_upper;
  double coverage_bound;   // mass outside the box
  double numerator_bound;  // s_max * E[W; outside the box]
};

/// Exact coverage and expected length of the MATA for one ProblemConfig.
///
/// With Z = (theta_hat - theta)/(sigma v_theta^{1/2}), X ~ N(gamma, 1) and W
/// independent, Z | X ~ N(rho (X - gamma), 1 - rho^2), and the interval covers
/// iff W a_u(X/W) <= Z <= W a_l(X/W). Both integrals are taken over the box
/// y in [Q_m^{-1}(eps/4), Q_m^{-1}(1 - eps/4)], x - gamma in
/// [Phi^{-1}(eps/4), Phi^{-1}(1 - eps/4)], written in the coordinates
/// (g, y) = (x/y, y) so that b(g), s(g) are solved once per outer node and
/// memoized across gamma; the outer variable is v = asinh(g).
class PerformanceModel {
 public:
  explicit PerformanceModel(ProblemConfig cfg, QuadratureOptions q = {});

  const TailModel& tails() const noexcept { return tails_; }
  const ProblemConfig& config() const noexcept { return tails_.config(); }
  const QuadratureOptions& options() const noexcept { return q_; }
  const SigmaRatio& sigma_ratio() const noexcept { return sigma_ratio_; }

  TruncationBox box(double gamma) const;
  GammaMoments evaluate(double gamma) const;

  /// Upper bound on s used for the expected-length truncation term.
  double s_max() const noexcept { return s_max_; }
  /// E[W] G_m^{-1}((1 + c_min)/2).
  double sel_denominator(double c_min) const;
  /// Scaled expected length from a numerator, propagating the error in c_min.
  Estimate scaled_length(const Estimate& numerator, const Estimate& c_min) const;

 private:
  TailModel tails_;
  QuadratureOptions q_;
  SigmaRatio sigma_ratio_;
  double s_max_ = 0.0;
  double y_lower_ = 0.0, y_upper_ = 0.0;
  double z_lower_ = 0.0, z_upper_ = 0.0;
};

Estimate coverage_probability(double gamma, const ProblemConfig& cfg, const QuadratureOptions& q = {});
Estimate scaled_expected_length(double gamma, const ProblemConfig& cfg, double c_min,
                                const QuadratureOptions& q = {});

struct McEstimate {
  double coverage = 0.0;
  double length_numerator = 0.0;
  double se_coverage = 0.0;
  double se_length = 0.0;
  std::int64_t samples = 0;
};

/// Simulates (Z, X, W) directly and applies the MATA to each draw. Samples are
/// generated in fixed blocks with an engine seeded from (seed, block index),
/// so the output is bitwise independent of the thread count.
McEstimate mc_oracle(double gamma, const ProblemConfig& cfg, std::int64_t n_samples, std::uint64_t seed);

/// Grid scan on gamma in [0, gamma_max] followed by golden-section refinement
/// inside the cell around the best grid point.
struct ScanOptions {
  double gamma_max = 15.0;
  double step = 0.05;
  double refine_width = 1e-4;

  std::vector<double> grid() const;
  void validate() const;
};

struct Extremum {
  double gamma = 0.0;
  Estimate value;
};

Extremum min_coverage(const ProblemConfig& cfg, const QuadratureOptions& q = {}, const ScanOptions& scan = {});
Extremum max_sel(const ProblemConfig& cfg, const Estimate& c_min, const QuadratureOptions& q = {},
                 const ScanOptions& scan = {});
Estimate sel_at_zero(const ProblemConfig& cfg, const Estimate& c_min, const QuadratureOptions& q = {});

struct LossGainRow {
  double d = 0.0;
  double cov_loss = 0.0;
  double sel_loss = 0.0;
  double sel_gain = 0.0;
  double gamma_at_min_cov = 0.0;
  double gamma_at_max_sel = 0.0;
  double cov_loss_err = 0.0;
  double sel_loss_err = 0.0;
  double sel_gain_err = 0.0;
  /// Non-empty when this row failed; the numeric fields are then meaningless.
  std::string error;

  bool ok() const noexcept { return error.empty(); }
};

/// cov loss = (1 - alpha) - min coverage, sel loss = max SEL - 1,
/// sel gain = 1 - SEL(0), all with SEL scaled by this row's minimum coverage.
LossGainRow loss_gain(const ProblemConfig& cfg, const QuadratureOptions& q = {}, const ScanOptions& scan = {});

/// One loss_gain row per penalty in d_grid (which must be nonempty and sorted).
/// A failing d is reported in its row without aborting the sweep.
std::vector<LossGainRow> d_sweep(const ProblemConfig& base, const std::vector<double>& d_grid,
                                 const QuadratureOptions& q = {}, const ScanOptions& scan = {});

struct PerformanceCurve {
  std::vector<double> gamma_grid;
  std::vector<double> coverage;
  std::vector<double> coverage_err;
  std::vector<double> sel;
  std::vector<double> sel_err;
  double c_min_used = 0.0;
};

/// Coverage and SEL on a sorted grid of gamma >= 0. The SEL scaling uses the
/// minimum coverage over the grid, refined by golden section.
PerformanceCurve performance_curve(const ProblemConfig& cfg, const std::vector<double>& gamma_grid,
                                   const QuadratureOptions& q = {});

}  // namespace mata

#pragma once

#include <cstddef>
#include <cstdint>
#include <shared_mutex>
#include <unordered_map>

#include "mata/distributions.hpp"
#include "mata/regression.hpp"
#include "mata/weights.hpp"

namespace mata {

/// Known quantities that fix the behaviour of the MATA: residual degrees of
/// freedom, correlation of (theta_hat, tau_hat), nominal noncoverage, weight.
struct ProblemConfig {
  DegreesOfFreedom m{1};
  double rho = 0.0;
  double alpha = 0.05;
  WeightSpec weight = WeightSpec::mic(0.0);

  /// Throws InputError unless |rho| < 1 and 0 < alpha < 1.
  void validate() const;
};

/// Solutions a_l, a_u of k(a, gamma) = 1 - alpha/2 and k(a, gamma) = alpha/2,
/// with centre b = (a_l + a_u)/2 and half-width s = (a_l - a_u)/2.
struct TailSolution {
  double gamma = 0.0;
  double a_lower = 0.0;
  double a_upper = 0.0;
  double b = 0.0;
  double s = 0.0;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;

  double centre() const noexcept { return 0.5 * (lower + upper); }
  double half_width() const noexcept { return 0.5 * (upper - lower); }
};

/// Bracket for delta_u(x, y) from the two single-model solutions.
struct DeltaBracket {
  double constrained = 0.0;  // solves G_{m+1}(r1) = u
  double full = 0.0;         // solves G_m(r2) = u
  double lower() const noexcept { return constrained < full ? constrained : full; }
  double upper() const noexcept { return constrained < full ? full : constrained; }
};

/// |gamma| above this uses the standard-t limit of the tail equations.
inline constexpr double kGammaLimit = 1e8;

/// The tail-area equations for one ProblemConfig. Holds the Student t
/// distributions for m and m + 1 and an exact-key memo of TailSolution values;
/// the memo is guarded, so one TailModel can be shared between threads.
class TailModel {
 public:
  explicit TailModel(ProblemConfig cfg);
  TailModel(const TailModel&) = delete;
  TailModel& operator=(const TailModel&) = delete;

  const ProblemConfig& config() const noexcept { return cfg_; }
  const StudentT& t_m() const noexcept { return t_m_; }

  double weight(double gamma_sq) const { return cfg_.weight(gamma_sq, cfg_.m); }

  /// k(a, gamma) = w G_{m+1}{ ((m+1)/(m+gamma^2))^{1/2} (a - rho gamma)/(1-rho^2)^{1/2} }
  ///             + (1 - w) G_m(a),  with w = w(gamma^2).
  double k_value(double a, double gamma) const;

  /// Interval between the two single-model solutions of k(a, gamma) = u.
  DeltaBracket tail_bracket(double u, double gamma) const;
  /// The unique a with k(a, gamma) = u.
  double solve_tail(double u, double gamma) const;

  /// Both tails at gamma, without touching the memo.
  TailSolution solve(double gamma) const;
  /// Memoized solve(); results are bitwise identical to solve().
  TailSolution solution(double gamma) const;
  std::size_t cache_size() const;

  /// h(delta, x, y) = w(x^2/y^2) G_{m+1}(r1(delta, x, y)) + {1 - w(x^2/y^2)} G_m(delta / y).
  double h_value(double delta, double x, double y) const;
  DeltaBracket delta_bracket(double u, double x, double y) const;
  /// Solution of h(delta, x, y) = u, clamped into delta_bracket().
  double delta_u(double u, double x, double y) const;

  /// G_m^{-1}(1 - alpha/2), the half-width multiplier of the standard interval.
  double standard_quantile() const noexcept { return q_hi_m_; }

 private:
  double quantile_m(double u) const;
  double quantile_m1(double u) const;

  ProblemConfig cfg_;
  StudentT t_m_;
  StudentT t_m1_;
  double sqrt_1m_rho2_;
  double q_lo_m_, q_hi_m_, q_lo_m1_, q_hi_m1_;

  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, TailSolution> cache_;
};

double k_value(double a, double gamma, const ProblemConfig& cfg);
double solve_tail(double u, double gamma, const ProblemConfig& cfg);
TailSolution tail_solution(double gamma, const ProblemConfig& cfg);
double delta_u(double u, double x, double y, const ProblemConfig& cfg);

/// [theta_hat - v_theta^{1/2} sigma_hat a_l(gamma_hat), theta_hat - v_theta^{1/2} sigma_hat a_u(gamma_hat)].
Interval mata_interval(const RegressionSummary& summary, double alpha, const WeightSpec& weight);

}  // namespace mata

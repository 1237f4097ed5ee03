#pragma once

#include <functional>
#include <string>

#include "mata/distributions.hpp"
#include "mata/regression.hpp"

namespace mata {

enum class WeightKind { Mic, Gic, Custom };

/// Weight w(gamma_hat^2) given to the constrained model M1. Library-provided
/// kinds are the exponentiated-criterion weights; custom weights must be
/// continuous and nonincreasing with w(z) -> 0, which is checked only on a
/// sampled grid.
class WeightSpec {
 public:
  using Function = std::function<double(double)>;

  static WeightSpec mic(double d);
  /// GIC weight with sample size n (n > m is required at evaluation time).
  static WeightSpec gic(double d, int n);
  /// Validated by sampled monotonicity on a log grid up to z = 1e6.
  static WeightSpec custom(Function w, std::string label = "custom");
  /// Skips validation. Only for algebraic checks with inadmissible weights.
  static WeightSpec custom_unchecked(Function w, std::string label = "custom");
  /// w == 0, which reduces the MATA to the standard full-model t interval.
  static WeightSpec none();

  WeightKind kind() const noexcept { return kind_; }
  double d() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  const std::string& label() const noexcept { return label_; }
  bool is_zero() const noexcept { return zero_; }
  /// False for custom weights: they are checked only by sampled monotonicity.
  bool validated() const noexcept { return kind_ != WeightKind::Custom; }

  /// Same kind with a different penalty. Custom weights have no penalty.
  WeightSpec with_d(double d) const;

  double operator()(double gamma_sq, DegreesOfFreedom m) const;

 private:
  WeightSpec() = default;

  WeightKind kind_ = WeightKind::Mic;
  double d_ = 0.0;
  int n_ = 0;
  bool zero_ = false;
  std::string label_;
  Function custom_;
};

/// 1 / (1 + (1 + z/m)^{m/2} exp(-d/2)), evaluated in log space.
double mic_weight(double gamma_sq, double d, DegreesOfFreedom m);
/// 1 / (1 + (1 + z/m)^{n/2} exp(-d/2)).
double gic_weight(double gamma_sq, double d, int n, DegreesOfFreedom m);

enum class CriterionFamily { Mic, Gic };

/// Information criteria of M1 (constrained) and M2 (full).
struct CriteriaPair {
  double crit1 = 0.0;
  double crit2 = 0.0;

  /// M2 is chosen when its criterion is not larger.
  bool selects_full() const noexcept { return crit2 <= crit1; }
};

CriteriaPair criteria(const RegressionSummary& summary, double d, CriterionFamily family);

/// Weight of M1 from exponentiated half-criteria, relative to the smaller one.
double model1_weight(const CriteriaPair& pair);

struct CpPair {
  double cp1 = 0.0;
  double cp2 = 0.0;

  bool selects_full() const noexcept { return cp2 <= cp1; }
};

/// Mallows' Cp for M1 and M2.
CpPair cp_pair(const RegressionSummary& summary);

/// Penalty d = m log(1 + 2/m) for which the MIC rule coincides with the Cp rule.
double cp_equivalent_d(DegreesOfFreedom m);

/// Level of the test of tau = 0 implied by choosing M2 iff MIC2 <= MIC1:
/// 2 (1 - G_m[ sqrt(m (exp(d/m) - 1)) ]).
double mic_significance_level(double d, DegreesOfFreedom m);

}  // namespace mata

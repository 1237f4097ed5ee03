#include "mata/weights.hpp"

#include <cmath>
#include <utility>

#include "mata/errors.hpp"

namespace mata {
namespace {

void require_penalty(double d) {
  if (!(d >= 0.0) || !std::isfinite(d)) throw InputError("penalty d must be finite and >= 0");
}

void require_gamma_sq(double z) {
  if (!(z >= 0.0)) throw InputError("gamma^2 must be >= 0");
}

// 1 / (1 + exp(log_odds)) without overflow.
double logistic_complement(double log_odds) {
  if (log_odds > 0.0) {
    const double e = std::exp(-log_odds);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(log_odds));
}

constexpr double kMonotoneTolerance = 1e-9;

void validate_custom(const WeightSpec::Function& w, const std::string& label) {
  double previous = w(0.0);
  const double at_zero = previous;
  if (!(previous >= 0.0 && previous <= 1.0)) {
    throw InputError("custom weight '" + label + "' must map into [0, 1]");
  }
  // Log grid from 1e-6 to 1e6, 20 points per decade.
  for (int k = -120; k <= 120; ++k) {
    const double z = std::pow(10.0, k / 20.0);
    const double value = w(z);
    if (!(value >= 0.0 && value <= 1.0)) {
      throw InputError("custom weight '" + label + "' must map into [0, 1]");
    }
    if (value > previous + kMonotoneTolerance) {
      throw InputError("custom weight '" + label + "' is not nonincreasing on the sampled grid");
    }
    previous = value;
  }
  if (at_zero > 0.0 && !(previous < at_zero)) {
    throw InputError("custom weight '" + label + "' does not decay towards 0");
  }
}

}  // namespace

WeightSpec WeightSpec::mic(double d) {
  require_penalty(d);
  WeightSpec w;
  w.kind_ = WeightKind::Mic;
  w.d_ = d;
  w.label_ = "mic";
  return w;
}

WeightSpec WeightSpec::gic(double d, int n) {
  require_penalty(d);
  if (n < 2) throw InputError("GIC weight needs a sample size n >= 2");
  WeightSpec w;
  w.kind_ = WeightKind::Gic;
  w.d_ = d;
  w.n_ = n;
  w.label_ = "gic";
  return w;
}

WeightSpec WeightSpec::custom(Function fn, std::string label) {
  if (!fn) throw InputError("custom weight function is empty");
  validate_custom(fn, label);
  return custom_unchecked(std::move(fn), std::move(label));
}

WeightSpec WeightSpec::custom_unchecked(Function fn, std::string label) {
  if (!fn) throw InputError("custom weight function is empty");
  WeightSpec w;
  w.kind_ = WeightKind::Custom;
  w.label_ = std::move(label);
  w.custom_ = std::move(fn);
  return w;
}

WeightSpec WeightSpec::none() {
  WeightSpec w = custom_unchecked([](double) { return 0.0; }, "none");
  w.zero_ = true;
  return w;
}

WeightSpec WeightSpec::with_d(double d) const {
  switch (kind_) {
    case WeightKind::Mic: return mic(d);
    case WeightKind::Gic: return gic(d, n_);
    case WeightKind::Custom: break;
  }
  throw InputError("custom weight '" + label_ + "' has no penalty parameter");
}

double WeightSpec::operator()(double gamma_sq, DegreesOfFreedom m) const {
  switch (kind_) {
    case WeightKind::Mic: return mic_weight(gamma_sq, d_, m);
    case WeightKind::Gic: return gic_weight(gamma_sq, d_, n_, m);
    case WeightKind::Custom: return zero_ ? 0.0 : custom_(gamma_sq);
  }
  return 0.0;
}

double mic_weight(double gamma_sq, double d, DegreesOfFreedom m) {
  require_gamma_sq(gamma_sq);
  require_penalty(d);
  const double md = m.value();
  return logistic_complement(0.5 * md * std::log1p(gamma_sq / md) - 0.5 * d);
}

double gic_weight(double gamma_sq, double d, int n, DegreesOfFreedom m) {
  require_gamma_sq(gamma_sq);
  require_penalty(d);
  if (n <= m.value()) throw InputError("GIC weight needs n > m");
  const double md = m.value();
  return logistic_complement(0.5 * n * std::log1p(gamma_sq / md) - 0.5 * d);
}

CriteriaPair criteria(const RegressionSummary& s, double d, CriterionFamily family) {
  require_penalty(d);
  if (!(s.sigma2_hat > 0.0)) throw InputError("criteria need sigma2_hat > 0 (log of zero RSS)");
  const double mult = family == CriterionFamily::Mic ? s.m : s.n;
  const double rss = s.m * s.sigma2_hat;
  const double rss_star = s.tau_hat * s.tau_hat / s.v_tau + rss;
  CriteriaPair out;
  out.crit2 = mult * std::log(rss / s.n) + d * s.p;
  out.crit1 = mult * std::log(rss_star / s.n) + d * (s.p - 1);
  return out;
}

double model1_weight(const CriteriaPair& pair) {
  const double lowest = std::fmin(pair.crit1, pair.crit2);
  const double e1 = std::exp(-0.5 * (pair.crit1 - lowest));
  const double e2 = std::exp(-0.5 * (pair.crit2 - lowest));
  return e1 / (e1 + e2);
}

CpPair cp_pair(const RegressionSummary& s) {
  if (!(s.sigma2_hat > 0.0)) throw InputError("Mallows' Cp needs sigma2_hat > 0");
  CpPair out;
  out.cp2 = static_cast<double>(s.m - s.n + 2 * s.p);
  // M1 has p - 1 free parameters, so its penalty term is 2 (p - 1).
  out.cp1 = (s.tau_hat * s.tau_hat / s.v_tau + s.m * s.sigma2_hat) / s.sigma2_hat - s.n + 2 * (s.p - 1);
  return out;
}

double cp_equivalent_d(DegreesOfFreedom m) {
  const double md = m.value();
  return md * std::log1p(2.0 / md);
}

double mic_significance_level(double d, DegreesOfFreedom m) {
  require_penalty(d);
  const double md = m.value();
  const double threshold = std::sqrt(md * std::expm1(d / md));
  return 2.0 * StudentT(m).sf(threshold);
}

}  // namespace mata

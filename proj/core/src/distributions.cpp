#include "mata/distributions.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "mata/errors.hpp"

namespace mata {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxContinuedFractionTerms = 5000;

std::atomic<double> g_t_cdf_bias{0.0};

// lgamma_r avoids the shared `signgam` global, so concurrent callers are safe.
double log_gamma(double x) {
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

double log_beta(double a, double b) { return log_gamma(a) + log_gamma(b) - log_gamma(a + b); }

// log B(1/2, b) without the cancellation between large lgamma values.
double log_beta_half(double b) {
  return 0.5 * std::log(std::numbers::pi) + std::log(boost::math::tgamma_delta_ratio(b, 0.5));
}

void require_finite(double x, const char* where) {
  if (!std::isfinite(x)) throw InputError(std::string(where) + ": argument must be finite");
}

void require_open_probability(double p, const char* where) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InputError(std::string(where) + ": probability must lie strictly inside (0, 1)");
  }
}

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int i = 1; i <= kMaxContinuedFractionTerms; ++i) {
    const double m2 = 2.0 * i;
    double aa = i * (b - i) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + i) * (qab + i) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

// log_front = a log x + b log y - log B(a, b).
double regularized_beta_front(double a, double b, double x, double y, double log_front) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

double regularized_beta_impl(double a, double b, double x, double y, double lbeta) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  return regularized_beta_front(a, b, x, y, a * std::log(x) + b * std::log(y) - lbeta);
}

double gamma_series(double a, double x, double lgam) {
  double ap = a;
  double del = 1.0 / a;
  double sum = del;
  for (int i = 0; i < 100000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) {
      return sum * std::exp(-x + a * std::log(x) - lgam);
    }
  }
  throw NumericalError("incomplete gamma series did not converge");
}

double gamma_continued_fraction(double a, double x, double lgam) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxContinuedFractionTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return std::exp(-x + a * std::log(x) - lgam) * h;
  }
  throw NumericalError("incomplete gamma continued fraction did not converge");
}

// 1 - Phi(x) = erfc(x / sqrt 2) / 2. The rounding of x / sqrt 2 costs about
// x^2 ulps in the far tail, so it is corrected to first order.
double upper_normal_tail(double x) {
  constexpr double r_hi = 0.5 * std::numbers::sqrt2;
  constexpr double r_lo = -4.833646656726457e-17;
  const double u = x * r_hi;
  const double e = std::fma(x, r_hi, -u) + x * r_lo;
  return 0.5 * (std::erfc(u) - e * std::numbers::inv_sqrtpi * 2.0 * std::exp(-u * u));
}

double apply_bias(double p) {
  const double bias = g_t_cdf_bias.load(std::memory_order_relaxed);
  if (bias == 0.0) return p;
  return std::fmin(1.0, std::fmax(0.0, p + bias));
}

// Solves P(a, v) = p for v > 0 (or Q(a, v) = 1 - p in the upper half) by a
// geometric bracket followed by safeguarded Newton steps.
double invert_gamma_p(double a, double p) {
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  const double lgam = log_gamma(a);
  // Positive when v is below the root.
  auto excess = [&](double v) { return upper ? gamma_q(a, v) - target : target - gamma_p(a, v); };

  double lo = a;
  double hi = a;
  while (excess(lo) <= 0.0) {
    lo *= 0.25;
    if (lo < 1e-300) return lo;
  }
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("chi-square quantile bracket overflow");
  }
  double v = std::sqrt(lo * hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = excess(v);
    if (f > 0.0) lo = v; else hi = v;
    if (f == 0.0) return v;
    const double density = std::exp(-v + (a - 1.0) * std::log(v) - lgam);
    double next = v + f / density;
    if (!(next > lo && next < hi)) next = std::sqrt(lo * hi);
    if (std::fabs(next - v) <= 4.0 * kEps * v || hi - lo <= 4.0 * kEps * hi) return next;
    v = next;
  }
  return v;
}

}  // namespace

DegreesOfFreedom::DegreesOfFreedom(int m) : m_(m) {
  if (m < 1) throw InputError("degrees of freedom must be >= 1, got " + std::to_string(m));
}

double normal_pdf(double x) {
  require_finite(x, "normal_pdf");
  return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2);
}

double normal_cdf(double x) {
  require_finite(x, "normal_cdf");
  return upper_normal_tail(-x);
}

double normal_sf(double x) {
  require_finite(x, "normal_sf");
  return upper_normal_tail(x);
}

double normal_quantile(double p) {
  require_open_probability(p, "normal_quantile");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_interval_probability(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (lo >= 0.0) return upper_normal_tail(lo) - upper_normal_tail(hi);
  if (hi <= 0.0) return upper_normal_tail(-hi) - upper_normal_tail(-lo);
  return 1.0 - (upper_normal_tail(-lo) + upper_normal_tail(hi));
}

double regularized_beta(double a, double b, double x, double y) {
  if (!(a > 0.0 && b > 0.0)) throw InputError("regularized_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
    throw InputError("regularized_beta: x must lie in [0, 1]");
  }
  return regularized_beta_impl(a, b, x, y, log_beta(a, b));
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InputError("gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  const double lgam = log_gamma(a);
  if (x < a + 1.0) return gamma_series(a, x, lgam);
  return 1.0 - gamma_continued_fraction(a, x, lgam);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InputError("gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  const double lgam = log_gamma(a);
  if (x < a + 1.0) return 1.0 - gamma_series(a, x, lgam);
  return gamma_continued_fraction(a, x, lgam);
}

// ---------------------------------------------------------------- Student t

StudentT::StudentT(DegreesOfFreedom m)
    : m_(m),
      half_m_(0.5 * m.value()),
      log_beta_(log_beta_half(0.5 * m.value())),
      log_pdf_norm_(-0.5 * std::log(static_cast<double>(m.value())) - log_beta_) {}

double StudentT::tail_pair(double x) const {
  const double md = m_.value();
  const double t2 = x * x;
  if (!std::isfinite(t2)) return 0.0;
  const double denom = md + t2;
  const double log_front = -half_m_ * std::log1p(t2 / md) + 0.5 * (std::log(t2) - std::log(denom)) - log_beta_;
  return regularized_beta_front(half_m_, 0.5, md / denom, t2 / denom, log_front);
}

double StudentT::pdf(double x) const {
  require_finite(x, "StudentT::pdf");
  const double md = m_.value();
  return std::exp(log_pdf_norm_ - 0.5 * (md + 1.0) * std::log1p(x * x / md));
}

double StudentT::cdf(double x) const {
  require_finite(x, "StudentT::cdf");
  if (x == 0.0) return apply_bias(0.5);
  const double half_tail = 0.5 * tail_pair(x);
  return apply_bias(x > 0.0 ? 1.0 - half_tail : half_tail);
}

double StudentT::sf(double x) const {
  require_finite(x, "StudentT::sf");
  if (x == 0.0) return 1.0 - apply_bias(0.5);
  const double half_tail = 0.5 * tail_pair(x);
  const double sf = x > 0.0 ? half_tail : 1.0 - half_tail;
  const double bias = g_t_cdf_bias.load(std::memory_order_relaxed);
  return bias == 0.0 ? sf : std::fmin(1.0, std::fmax(0.0, sf - bias));
}

double StudentT::quantile(double p) const {
  require_open_probability(p, "StudentT::quantile");
  if (p == 0.5) return 0.0;
  // Solve sf(x) = q on x > 0 and reflect.
  const double q = p < 0.5 ? p : 1.0 - p;
  double lo = 0.0;
  double hi = 1.0;
  while (sf(hi) > q) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("Student t quantile bracket overflow");
  }
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 400; ++iter) {
    const double f = sf(x) - q;  // decreasing in x
    if (f > 0.0) lo = x; else hi = x;
    if (f == 0.0) break;
    double next = x + f / pdf(x);
    if (!(next > lo && next < hi)) next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
    const bool done = std::fabs(next - x) <= 2.0 * kEps * std::fabs(next) ||
                      hi - lo <= 2.0 * kEps * hi;
    x = next;
    if (done) break;
  }
  return p < 0.5 ? -x : x;
}

double student_t_cdf(double x, DegreesOfFreedom m) { return StudentT(m).cdf(x); }
double student_t_quantile(double p, DegreesOfFreedom m) { return StudentT(m).quantile(p); }

// -------------------------------------------------------------- sigma ratio

SigmaRatio::SigmaRatio(DegreesOfFreedom m)
    : m_(m),
      half_m_(0.5 * m.value()),
      log_norm_(std::log(2.0) + half_m_ * std::log(half_m_) - log_gamma(half_m_)),
      mean_(std::sqrt(2.0 / m.value()) * (1.0 / boost::math::tgamma_delta_ratio(half_m_, 0.5))) {}

double SigmaRatio::log_pdf(double w) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw InputError("SigmaRatio::log_pdf: w must be positive");
  const double md = m_.value();
  return log_norm_ + (md - 1.0) * std::log(w) - 0.5 * md * w * w;
}

double SigmaRatio::pdf(double w) const { return std::exp(log_pdf(w)); }

double SigmaRatio::cdf(double w) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw InputError("SigmaRatio::cdf: w must be positive");
  return gamma_p(half_m_, half_m_ * w * w);
}

double SigmaRatio::sf(double w) const {
  if (!(w > 0.0) || !std::isfinite(w)) throw InputError("SigmaRatio::sf: w must be positive");
  return gamma_q(half_m_, half_m_ * w * w);
}

double SigmaRatio::quantile(double p) const {
  require_open_probability(p, "SigmaRatio::quantile");
  return std::sqrt(invert_gamma_p(half_m_, p) / half_m_);
}

double SigmaRatio::partial_mean_below(double w) const {
  if (w <= 0.0) return 0.0;
  if (!std::isfinite(w)) return mean_;
  return mean_ * gamma_p(half_m_ + 0.5, half_m_ * w * w);
}

double SigmaRatio::partial_mean_above(double w) const {
  if (w <= 0.0) return mean_;
  if (!std::isfinite(w)) return 0.0;
  return mean_ * gamma_q(half_m_ + 0.5, half_m_ * w * w);
}

double sigma_ratio_pdf(double w, DegreesOfFreedom m) { return SigmaRatio(m).pdf(w); }
double sigma_ratio_cdf(double w, DegreesOfFreedom m) { return SigmaRatio(m).cdf(w); }
double sigma_ratio_quantile(double p, DegreesOfFreedom m) { return SigmaRatio(m).quantile(p); }
double sigma_ratio_mean(DegreesOfFreedom m) { return SigmaRatio(m).mean(); }

namespace testing {
void set_student_t_cdf_bias(double bias) { g_t_cdf_bias.store(bias, std::memory_order_relaxed); }
double student_t_cdf_bias() { return g_t_cdf_bias.load(std::memory_order_relaxed); }
}  // namespace testing

}  // namespace mata

#pragma once

// Special-function primitives: standard normal, Student t with integer degrees
// of freedom, and the distribution of W = sigma_hat / sigma where m W^2 ~ chi^2_m.

namespace mata {

/// Residual degrees of freedom m = n - p. Always >= 1.
class DegreesOfFreedom {
 public:
  explicit DegreesOfFreedom(int m);

  int value() const noexcept { return m_; }
  DegreesOfFreedom next() const { return DegreesOfFreedom(m_ + 1); }

  friend bool operator==(DegreesOfFreedom, DegreesOfFreedom) = default;

 private:
  int m_;
};

double normal_pdf(double x);
double normal_cdf(double x);
/// Upper tail 1 - Phi(x), without cancellation for large x.
double normal_sf(double x);
double normal_quantile(double p);
/// Phi(hi) - Phi(lo) evaluated on whichever side of zero keeps precision.
double normal_interval_probability(double lo, double hi);

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately keeps precision when x is close to one.
double regularized_beta(double a, double b, double x, double y);
/// Regularized lower and upper incomplete gamma functions.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

/// Student t distribution with m degrees of freedom. Construction precomputes
/// the normalizing constants so that cdf() is cheap on hot paths.
class StudentT {
 public:
  explicit StudentT(DegreesOfFreedom m);

  DegreesOfFreedom dof() const noexcept { return m_; }
  double pdf(double x) const;
  double cdf(double x) const;
  /// P(T > x).
  double sf(double x) const;
  double quantile(double p) const;

 private:
  double tail_pair(double x) const;  // P(|T| > |x|)

  DegreesOfFreedom m_;
  double half_m_;
  double log_beta_;  // log B(1/2, m/2)
  double log_pdf_norm_;
};

double student_t_cdf(double x, DegreesOfFreedom m);
double student_t_quantile(double p, DegreesOfFreedom m);

/// W = sigma_hat / sigma with m W^2 ~ chi^2_m. Density
/// q_m(w) = 2 (m/2)^{m/2} / Gamma(m/2) w^{m-1} exp(-m w^2 / 2).
class SigmaRatio {
 public:
  explicit SigmaRatio(DegreesOfFreedom m);

  DegreesOfFreedom dof() const noexcept { return m_; }
  double pdf(double w) const;
  /// log q_m(w), finite for every w > 0.
  double log_pdf(double w) const;
  double cdf(double w) const;
  double sf(double w) const;
  double quantile(double p) const;
  double mean() const noexcept { return mean_; }

  /// E[W; W < w] and E[W; W > w]. Uses w q_m(w) = E[W] * (density of a
  /// variable with (m+1) degrees of freedom on the chi^2 scale of m w^2).
  double partial_mean_below(double w) const;
  double partial_mean_above(double w) const;

 private:
  DegreesOfFreedom m_;
  double half_m_;
  double log_norm_;
  double mean_;
};

double sigma_ratio_pdf(double w, DegreesOfFreedom m);
double sigma_ratio_cdf(double w, DegreesOfFreedom m);
double sigma_ratio_quantile(double p, DegreesOfFreedom m);
double sigma_ratio_mean(DegreesOfFreedom m);

namespace testing {
/// Fault-injection hook for self-check tests: adds `bias` to every Student t
/// CDF value returned by this library (clamped to [0, 1]). Zero disables it.
void set_student_t_cdf_bias(double bias);
double student_t_cdf_bias();
}  // namespace testing

}  // namespace mata

#include "mata/tail.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "mata/errors.hpp"

namespace mata {
namespace {

constexpr int kMaxRootIterations = 200;

struct BracketTolerance {
  double floor;
  bool operator()(double a, double b) const {
    return std::fabs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fmax(std::fabs(a), std::fabs(b)) + floor;
  }
};

// Root of an increasing function f on a bracket that is known analytically to
// contain it. The bracket is widened by 10% (plus a rounding margin) first.
template <class F>
double solve_increasing(F&& f, double lo, double hi, double scale, const char* what) {
  const double margin = 0.1 * (hi - lo) + 1e-12 * (scale + std::fmax(std::fabs(lo), std::fabs(hi)));
  lo -= margin;
  hi += margin;
  double flo = f(lo);
  double fhi = f(hi);
  for (int expand = 0; expand < 60 && (flo > 0.0 || fhi < 0.0); ++expand) {
    const double width = hi - lo;
    if (flo > 0.0) {
      lo -= width;
      flo = f(lo);
    }
    if (fhi < 0.0) {
      hi += width;
      fhi = f(hi);
    }
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo > 0.0 || fhi < 0.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": bracket [" << lo << ", " << hi << "] does not contain a root (f = " << flo
        << ", " << fhi << ")";
    throw NumericalError(msg.str());
  }
  boost::uintmax_t iterations = kMaxRootIterations;
  const auto root = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi,
                                                      BracketTolerance{1e-15 * scale}, iterations);
  return 0.5 * (root.first + root.second);
}

std::uint64_t cache_key(double gamma) { return std::bit_cast<std::uint64_t>(gamma == 0.0 ? 0.0 : gamma); }

}  // namespace

void ProblemConfig::validate() const {
  if (!(std::fabs(rho) < 1.0)) throw InputError("|rho| must be < 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
}

TailModel::TailModel(ProblemConfig cfg)
    : cfg_((cfg.validate(), std::move(cfg))),
      t_m_(cfg_.m),
      t_m1_(cfg_.m.next()),
      sqrt_1m_rho2_(std::sqrt(1.0 - cfg_.rho * cfg_.rho)),
      q_lo_m_(-t_m_.quantile(1.0 - 0.5 * cfg_.alpha)),
      q_hi_m_(-q_lo_m_),
      q_lo_m1_(-t_m1_.quantile(1.0 - 0.5 * cfg_.alpha)),
      q_hi_m1_(-q_lo_m1_) {}

double TailModel::quantile_m(double u) const {
  if (u == 0.5 * cfg_.alpha) return q_lo_m_;
  if (u == 1.0 - 0.5 * cfg_.alpha) return q_hi_m_;
  return t_m_.quantile(u);
}

double TailModel::quantile_m1(double u) const {
  if (u == 0.5 * cfg_.alpha) return q_lo_m1_;
  if (u == 1.0 - 0.5 * cfg_.alpha) return q_hi_m1_;
  return t_m1_.quantile(u);
}

double TailModel::k_value(double a, double gamma) const {
  if (std::fabs(gamma) > kGammaLimit) return t_m_.cdf(a);
  const double z = gamma * gamma;
  const double w = weight(z);
  const double full = t_m_.cdf(a);
  if (w == 0.0) return full;
  const double md = cfg_.m.value();
  const double r1 = std::sqrt((md + 1.0) / (md + z)) * (a - cfg_.rho * gamma) / sqrt_1m_rho2_;
  return w * t_m1_.cdf(r1) + (1.0 - w) * full;
}

DeltaBracket TailModel::tail_bracket(double u, double gamma) const {
  const double md = cfg_.m.value();
  DeltaBracket out;
  out.constrained = cfg_.rho * gamma +
                    quantile_m1(u) * std::sqrt((md + gamma * gamma) / (md + 1.0)) * sqrt_1m_rho2_;
  out.full = quantile_m(u);
  return out;
}

double TailModel::solve_tail(double u, double gamma) const {
  if (!(u > 0.0 && u < 1.0)) throw InputError("solve_tail: u must lie in (0, 1)");
  if (!std::isfinite(gamma)) throw InputError("solve_tail: gamma must be finite");
  if (std::fabs(gamma) > kGammaLimit || weight(gamma * gamma) == 0.0) return quantile_m(u);
  const DeltaBracket br = tail_bracket(u, gamma);
  const double root = solve_increasing([&](double a) { return k_value(a, gamma) - u; }, br.lower(),
                                       br.upper(), 1.0, "solve_tail");
  return std::fmin(br.upper(), std::fmax(br.lower(), root));
}

TailSolution TailModel::solve(double gamma) const {
  TailSolution out;
  out.gamma = gamma;
  out.a_lower = solve_tail(1.0 - 0.5 * cfg_.alpha, gamma);
  out.a_upper = solve_tail(0.5 * cfg_.alpha, gamma);
  out.b = 0.5 * (out.a_lower + out.a_upper);
  out.s = 0.5 * (out.a_lower - out.a_upper);
  return out;
}

TailSolution TailModel::solution(double gamma) const {
  const std::uint64_t key = cache_key(gamma);
  {
    std::shared_lock lock(mutex_);
    if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const TailSolution computed = solve(gamma);
  std::unique_lock lock(mutex_);
  cache_.emplace(key, computed);
  return computed;
}

std::size_t TailModel::cache_size() const {
  std::shared_lock lock(mutex_);
  return cache_.size();
}

double TailModel::h_value(double delta, double x, double y) const {
  const double ratio_sq = (x / y) * (x / y);
  const double w = weight(ratio_sq);
  const double full = t_m_.cdf(delta / y);
  if (w == 0.0) return full;
  const double md = cfg_.m.value();
  const double r1 = std::sqrt((md + 1.0) / (md + ratio_sq)) * (delta - cfg_.rho * x) / (y * sqrt_1m_rho2_);
  return w * t_m1_.cdf(r1) + (1.0 - w) * full;
}

DeltaBracket TailModel::delta_bracket(double u, double x, double y) const {
  if (!(y > 0.0)) throw InputError("delta_bracket: y must be positive");
  const double md = cfg_.m.value();
  const double ratio_sq = (x / y) * (x / y);
  DeltaBracket out;
  out.constrained = cfg_.rho * x + quantile_m1(u) * y * std::sqrt((md + ratio_sq) / (md + 1.0)) * sqrt_1m_rho2_;
  out.full = quantile_m(u) * y;
  return out;
}

double TailModel::delta_u(double u, double x, double y) const {
  if (!(y > 0.0) || !std::isfinite(y)) throw InputError("delta_u: y must be positive");
  if (!(u > 0.0 && u < 1.0)) throw InputError("delta_u: u must lie in (0, 1)");
  if (!std::isfinite(x)) throw InputError("delta_u: x must be finite");
  const DeltaBracket br = delta_bracket(u, x, y);
  const double root = solve_increasing([&](double delta) { return h_value(delta, x, y) - u; }, br.lower(),
                                       br.upper(), y, "delta_u");
  return std::fmin(br.upper(), std::fmax(br.lower(), root));
}

double k_value(double a, double gamma, const ProblemConfig& cfg) { return TailModel(cfg).k_value(a, gamma); }

double solve_tail(double u, double gamma, const ProblemConfig& cfg) {
  return TailModel(cfg).solve_tail(u, gamma);
}

TailSolution tail_solution(double gamma, const ProblemConfig& cfg) { return TailModel(cfg).solve(gamma); }

double delta_u(double u, double x, double y, const ProblemConfig& cfg) {
  return TailModel(cfg).delta_u(u, x, y);
}

Interval mata_interval(const RegressionSummary& summary, double alpha, const WeightSpec& weight) {
  ProblemConfig cfg{DegreesOfFreedom(summary.m), summary.rho, alpha, weight};
  const TailModel model(std::move(cfg));
  const TailSolution sol = model.solve(summary.gamma_hat);
  const double scale = std::sqrt(summary.v_theta) * summary.sigma_hat();
  return Interval{summary.theta_hat - scale * sol.a_lower, summary.theta_hat - scale * sol.a_upper};
}

}  // namespace mata

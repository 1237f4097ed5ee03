#pragma once

// Globally adaptive 21-point Gauss-Kronrod quadrature for vector-valued
// integrands, after QUADPACK's QAG with the qk21 rule.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace mata::quad {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct Result {
  Vec<N> value{};
  Vec<N> error{};
  int intervals = 0;
  int evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478320, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <std::size_t N>
struct Panel {
  double a;
  double b;
  Vec<N> value;
  Vec<N> error;
  double priority;
};

template <std::size_t N, class F>
void gk21(F& f, double a, double b, Vec<N>& result, Vec<N>& abserr) {
  constexpr double epmach = std::numeric_limits<double>::epsilon();
  constexpr double uflow = std::numeric_limits<double>::min();
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double dhalf = std::fabs(half);

  std::array<Vec<N>, 10> fv1{};
  std::array<Vec<N>, 10> fv2{};
  const Vec<N> fc = f(centre);
  Vec<N> resg{};
  Vec<N> resk{};
  Vec<N> resabs{};
  for (std::size_t i = 0; i < N; ++i) {
    resk[i] = kWgk[10] * fc[i];
    resabs[i] = std::fabs(resk[i]);
  }
  for (std::size_t j = 0; j < 10; ++j) {
    const double absc = half * kXgk[j];
    fv1[j] = f(centre - absc);
    fv2[j] = f(centre + absc);
    const bool gauss = (j % 2) == 1;
    for (std::size_t i = 0; i < N; ++i) {
      const double fsum = fv1[j][i] + fv2[j][i];
      if (gauss) resg[i] += kWg[j / 2] * fsum;
      resk[i] += kWgk[j] * fsum;
      resabs[i] += kWgk[j] * (std::fabs(fv1[j][i]) + std::fabs(fv2[j][i]));
    }
  }
  for (std::size_t i = 0; i < N; ++i) {
    const double reskh = 0.5 * resk[i];
    double resasc = kWgk[10] * std::fabs(fc[i] - reskh);
    for (std::size_t j = 0; j < 10; ++j) {
      resasc += kWgk[j] * (std::fabs(fv1[j][i] - reskh) + std::fabs(fv2[j][i] - reskh));
    }
    result[i] = resk[i] * half;
    const double abs_int = resabs[i] * dhalf;
    resasc *= dhalf;
    double err = std::fabs((resk[i] - resg[i]) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::fmin(1.0, std::pow(200.0 * err / resasc, 1.5));
    if (abs_int > uflow / (50.0 * epmach)) err = std::fmax(epmach * 50.0 * abs_int, err);
    abserr[i] = err;
  }
}

}  // namespace detail

/// Integrates f over [breakpoints.front(), breakpoints.back()], starting from
/// one panel per consecutive breakpoint pair and bisecting the panel with the
/// largest scaled error until every component i satisfies
/// error[i] <= max(abs_tol[i], rel_tol * |value[i]|). Components with an
/// infinite abs_tol are integrated but never drive refinement.
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> breakpoints, const Vec<N>& abs_tol, double rel_tol,
                    int max_intervals) {
  using detail::Panel;
  Result<N> out;
  std::vector<Panel<N>> panels;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    const double a = breakpoints[k];
    const double b = breakpoints[k + 1];
    if (!(b > a)) continue;
    Panel<N> p{a, b, {}, {}, 0.0};
    detail::gk21<N>(f, a, b, p.value, p.error);
    out.evaluations += 21;
    panels.push_back(p);
  }
  if (panels.empty()) {
    out.intervals = 0;
    return out;
  }

  Vec<N> total{};
  Vec<N> total_err{};
  for (const auto& p : panels) {
    for (std::size_t i = 0; i < N; ++i) {
      total[i] += p.value[i];
      total_err[i] += p.error[i];
    }
  }
  Vec<N> scale{};
  for (std::size_t i = 0; i < N; ++i) {
    scale[i] = std::isinf(abs_tol[i]) ? 0.0
                                      : std::fmax(std::fmax(abs_tol[i], rel_tol * std::fabs(total[i])),
                                                  std::numeric_limits<double>::min());
  }
  auto priority_of = [&](const Panel<N>& p) {
    double worst = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (scale[i] > 0.0) worst = std::fmax(worst, p.error[i] / scale[i]);
    }
    return worst;
  };
  auto by_priority = [](const Panel<N>& x, const Panel<N>& y) { return x.priority < y.priority; };
  for (auto& p : panels) p.priority = priority_of(p);
  std::make_heap(panels.begin(), panels.end(), by_priority);

  auto satisfied = [&] {
    for (std::size_t i = 0; i < N; ++i) {
      if (std::isinf(abs_tol[i])) continue;
      if (total_err[i] > std::fmax(abs_tol[i], rel_tol * std::fabs(total[i]))) return false;
    }
    return true;
  };

  while (!satisfied()) {
    if (static_cast<int>(panels.size()) >= max_intervals) {
      out.converged = false;
      break;
    }
    std::pop_heap(panels.begin(), panels.end(), by_priority);
    Panel<N> worst = panels.back();
    panels.pop_back();
    if (worst.priority <= 0.0) {
      panels.push_back(worst);
      std::push_heap(panels.begin(), panels.end(), by_priority);
      break;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        worst.b - worst.a <= 64.0 * std::numeric_limits<double>::epsilon() * std::fmax(std::fabs(worst.a), std::fabs(worst.b))) {
      // Cannot be split further; keep it but stop selecting it.
      worst.priority = 0.0;
      panels.push_back(worst);
      std::push_heap(panels.begin(), panels.end(), by_priority);
      continue;
    }
    Panel<N> left{worst.a, mid, {}, {}, 0.0};
    Panel<N> right{mid, worst.b, {}, {}, 0.0};
    detail::gk21<N>(f, left.a, left.b, left.value, left.error);
    detail::gk21<N>(f, right.a, right.b, right.value, right.error);
    out.evaluations += 42;
    for (std::size_t i = 0; i < N; ++i) {
      total[i] += left.value[i] + right.value[i] - worst.value[i];
      total_err[i] += left.error[i] + right.error[i] - worst.error[i];
    }
    left.priority = priority_of(left);
    right.priority = priority_of(right);
    panels.push_back(left);
    std::push_heap(panels.begin(), panels.end(), by_priority);
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end(), by_priority);
  }

  // Final sums in left-to-right order.
  std::sort(panels.begin(), panels.end(), [](const Panel<N>& x, const Panel<N>& y) { return x.a < y.a; });
  for (std::size_t i = 0; i < N; ++i) {
    out.value[i] = 0.0;
    out.error[i] = 0.0;
  }
  for (const auto& p : panels) {
    for (std::size_t i = 0; i < N; ++i) {
      out.value[i] += p.value[i];
      out.error[i] += p.error[i];
    }
  }
  out.intervals = static_cast<int>(panels.size());
  return out;
}

}  // namespace mata::quad

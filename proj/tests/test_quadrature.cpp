#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "mata/extremum.hpp"
#include "mata/quadrature.hpp"

using namespace mata;

TEST_CASE("adaptive integration of smooth and kinked integrands") {
  const std::array<double, 2> pts{0.0, M_PI};
  const auto r = quad::integrate<2>([](double x) { return quad::Vec<2>{std::sin(x), x * x}; }, pts,
                                    quad::Vec<2>{1e-14, 1e-14}, 1e-13, 200);
  CHECK(r.converged);
  CHECK(std::fabs(r.value[0] - 2.0) < 1e-13);
  CHECK(std::fabs(r.value[1] - M_PI * M_PI * M_PI / 3.0) < 1e-12);
  CHECK(r.error[0] < 1e-12);

  const std::array<double, 2> unit{-1.0, 2.0};
  const auto kink = quad::integrate<1>([](double x) { return quad::Vec<1>{std::fabs(x)}; }, unit,
                                       quad::Vec<1>{1e-12}, 1e-12, 500);
  CHECK(std::fabs(kink.value[0] - 2.5) < 1e-10);

  const std::array<double, 3> split{-1.0, 0.0, 2.0};
  const auto exact = quad::integrate<1>([](double x) { return quad::Vec<1>{std::fabs(x)}; }, split,
                                        quad::Vec<1>{1e-12}, 1e-12, 500);
  CHECK(exact.intervals == 2);
  CHECK(std::fabs(exact.value[0] - 2.5) < 1e-14);
}

TEST_CASE("components with infinite tolerance never drive refinement") {
  const double inf = std::numeric_limits<double>::infinity();
  const std::array<double, 2> pts{0.0, 1.0};
  const auto r = quad::integrate<2>([](double x) { return quad::Vec<2>{1.0, std::sqrt(x)}; }, pts,
                                    quad::Vec<2>{1e-12, inf}, 1e-12, 100);
  CHECK(r.converged);
  CHECK(r.intervals == 1);
}

TEST_CASE("subdivision limit is reported") {
  const std::array<double, 2> pts{0.0, 1.0};
  const auto r = quad::integrate<1>([](double x) { return quad::Vec<1>{std::sin(1.0 / (x + 1e-3))}; }, pts,
                                    quad::Vec<1>{1e-15}, 1e-15, 5);
  CHECK_FALSE(r.converged);
  CHECK(r.intervals <= 5);
}

TEST_CASE("golden section") {
  const auto r = golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3) + 1.0; }, -1.0, 2.0, 1e-8);
  CHECK(std::fabs(r.x - 0.3) < 1e-7);
  CHECK(r.fx == doctest::Approx(1.0));
  const auto edge = golden_section_minimize([](double x) { return x; }, 0.0, 1.0, 1e-6);
  CHECK(edge.x < 1e-5);
}

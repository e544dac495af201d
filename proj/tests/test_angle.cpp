#include <doctest.h>

#include <numbers>

#include "jpsn/angle.hpp"
#include "jpsn/rng.hpp"

using namespace jpsn;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("atan_star quadrants") {
  CHECK(atan_star({1.0, 0.0}).value() == doctest::Approx(0.0));
  CHECK(atan_star({0.0, 1.0}).value() == doctest::Approx(pi / 2));
  CHECK(atan_star({-1.0, -1.0}).value() == doctest::Approx(5 * pi / 4));
  CHECK_THROWS_AS(atan_star({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(atan_star({1e-301, -1e-310}), std::invalid_argument);
}

TEST_CASE("atan_star inverts the circle parameterization") {
  for (int i = 0; i < 10000; ++i) {
    const double theta = two_pi * i / 10000.0;
    const Angle a = atan_star({std::cos(theta), std::sin(theta)});
    CHECK(angular_distance(a, Angle(theta)) < 1e-12);
  }
}

TEST_CASE("to_polar basics and round trip") {
  auto [a1, r1] = to_polar({0.0, 2.0});
  CHECK(a1.value() == doctest::Approx(pi / 2));
  CHECK(r1 == doctest::Approx(2.0));
  auto [a2, r2] = to_polar({3.0, 4.0});
  CHECK(r2 == doctest::Approx(5.0));
  CHECK(a2.value() == doctest::Approx(atan_star({3.0, 4.0}).value()));
  CHECK_THROWS_AS(to_polar({0.0, 0.0}), std::invalid_argument);

  Rng rng(42);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    PlanarPoint p{rng.normal() * 3.0, rng.normal() * 3.0};
    auto [a, r] = to_polar(p);
    PlanarPoint back = from_polar(a, r);
    worst = std::max({worst, std::fabs(back.c1 - p.c1), std::fabs(back.c2 - p.c2)});
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("angular distance") {
  CHECK(angular_distance(Angle(0.0), Angle(0.0)) == 0.0);
  CHECK(angular_distance(Angle(0.0), Angle(pi)) == doctest::Approx(pi));
  CHECK(angular_distance(Angle(0.1), Angle(two_pi - 0.1)) == doctest::Approx(0.2));

  Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    const Angle a(rng.uniform(0.0, 10.0)), b(rng.uniform(-10.0, 10.0)),
        c(rng.uniform(0.0, two_pi));
    const double ab = angular_distance(a, b);
    CHECK(ab == doctest::Approx(angular_distance(b, a)));
    CHECK(ab >= 0.0);
    CHECK(ab <= pi + 1e-15);
    CHECK(ab + angular_distance(b, c) >= angular_distance(a, c) - 1e-12);
  }
}

TEST_CASE("angle wrapping at construction") {
  CHECK(Angle(two_pi).value() == doctest::Approx(0.0));
  CHECK(Angle(-0.5).value() == doctest::Approx(two_pi - 0.5));
  CHECK(Angle(7 * pi).value() == doctest::Approx(pi));
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Angle a(rng.uniform(-100.0, 100.0));
    CHECK(a.value() >= 0.0);
    CHECK(a.value() < two_pi);
  }
}

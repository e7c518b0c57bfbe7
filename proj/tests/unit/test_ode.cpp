#include <doctest.h>

#include <cmath>
#include <vector>

#include "chlab/ode.hpp"

using chlab::Dopri5;

TEST_CASE("dopri5 integrates exponential decay to tolerance") {
  Dopri5::Options o;
  o.rtol = o.atol = 1e-10;
  Dopri5 s([](double, std::span<const double> y, std::span<double> d) { d[0] = -y[0]; }, o);
  const std::vector<double> y0{1.0};
  s.reset(0.0, y0);
  while (s.t() < 3.0) REQUIRE(s.step(3.0) == Dopri5::Status::ok);
  CHECK(s.t() == 3.0);
  CHECK(std::abs(s.y()[0] - std::exp(-3.0)) < 1e-9);
}

TEST_CASE("dense output follows the harmonic oscillator between steps") {
  Dopri5::Options o;
  o.rtol = o.atol = 1e-11;
  Dopri5 s(
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = -y[0];
      },
      o);
  const std::vector<double> y0{0.0, 1.0};
  s.reset(0.0, y0);
  double worst = 0.0;
  std::vector<double> buf(2);
  while (s.t() < 10.0) {
    REQUIRE(s.step(10.0) == Dopri5::Status::ok);
    const auto& seg = s.last_segment();
    for (int k = 0; k <= 10; ++k) {
      const double t = seg.t0 + seg.h * k / 10.0;
      seg.eval(t, buf);
      worst = std::max({worst, std::abs(buf[0] - std::sin(t)), std::abs(buf[1] - std::cos(t))});
    }
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("backward integration and step clamping") {
  Dopri5::Options o;
  o.max_step = 0.1;
  Dopri5 s([](double, std::span<const double> y, std::span<double> d) { d[0] = y[0]; }, o);
  const std::vector<double> y0{1.0};
  s.reset(1.0, y0);
  while (s.t() > 0.0) {
    const double before = s.t();
    REQUIRE(s.step(0.0) == Dopri5::Status::ok);
    CHECK(before - s.t() <= 0.1 + 1e-15);
  }
  CHECK(s.t() == 0.0);
  CHECK(std::abs(s.y()[0] - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("finite-time blowup ends in step underflow, not a hang") {
  Dopri5::Options o;
  o.rtol = o.atol = 1e-9;
  Dopri5 s([](double, std::span<const double> y, std::span<double> d) { d[0] = y[0] * y[0]; }, o);
  const std::vector<double> y0{1.0};  // y = 1/(1-t)
  s.reset(0.0, y0);
  Dopri5::Status st = Dopri5::Status::ok;
  for (int k = 0; k < 100000 && st == Dopri5::Status::ok && s.t() < 2.0; ++k) st = s.step(2.0);
  CHECK(st != Dopri5::Status::ok);
  CHECK(s.t() < 1.0);
  CHECK(s.t() > 0.99);
}

TEST_CASE("validator rejections shrink the step") {
  Dopri5::Options o;
  int rejected = 0;
  Dopri5 s([](double, std::span<const double>, std::span<double> d) { d[0] = 1.0; }, o,
           [&](std::span<const double> y) {
             if (y[0] > 0.5 && rejected < 3) {
               ++rejected;
               return false;
             }
             return true;
           });
  const std::vector<double> y0{0.0};
  s.reset(0.0, y0);
  while (s.t() < 1.0) REQUIRE(s.step(1.0) == Dopri5::Status::ok);
  CHECK(rejected == 3);
  CHECK(std::abs(s.y()[0] - 1.0) < 1e-12);
}

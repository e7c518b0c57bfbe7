#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "chlab/field.hpp"

using namespace chlab;

TEST_CASE("pointwise field examples") {
  const PeakonState single(0.0, {0.0}, {1.0});
  CHECK(eval_u(single, 0.0) == 1.0);
  CHECK(eval_ux(single, 0.0) == 0.0);

  const auto o = oracle::R0();
  const auto s0 = o.state(0.0);
  CHECK(std::abs(eval_u(s0, 0.0)) < 1e-16);
  CHECK(std::abs(eval_u(s0, std::log(0.75) / 2) - 0.125) < 1e-15);
  CHECK(std::abs(eval_P_Px(s0, 0.0).second) < 1e-15);
  CHECK(eval_P_Px(PeakonState::zero(0.0), 1.0) == std::pair<double, double>{0.0, 0.0});
  for (double t : {0.0, 1.0, 2.0, 2.19}) {
    const auto s = o.state(t);
    CHECK(eval_ux(s, 0.0) == doctest::Approx(-o.p(t) * std::exp(o.q(t) / 2)).epsilon(1e-12));
    for (int k = 0; k <= 40; ++k) CHECK(std::abs(eval_ux(s, -2.0 + 0.1 * k + 1e-3)) <= o.p(t) * (1 + 1e-12));
  }
}

TEST_CASE("single peakon pressure matches quadrature") {
  const PeakonState single(0.0, {0.0}, {1.0});
  const auto [P, Px] = eval_P_Px(single, 0.0);
  const auto [Pq, Pxq] = oracle::P_Px(single, 0.0);
  CHECK(std::abs(P - Pq) < 1e-10);
  CHECK(std::abs(Px - Pxq) < 1e-10);
  CHECK(P == doctest::Approx(0.5));  // (3/4) * int e^{-3|y|} dy = 1/2
}

TEST_CASE("property: P, Px and energy agree with quadrature on random states") {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto s = oracle::random_state(rng);
    const double x = oracle::uniform(rng, -7.0, 7.0);
    const auto [P, Px] = eval_P_Px(s, x);
    const auto [Pq, Pxq] = oracle::P_Px(s, x);
    CHECK(P >= 0.0);
    worst = std::max({worst, std::abs(P - Pq), std::abs(Px - Pxq)});
    const double a = oracle::uniform(rng, -6.0, 6.0), b = a + oracle::uniform(rng, 0.0, 4.0);
    const auto rep = energy(s, a, b);
    worst = std::max(worst, std::abs(rep.on_interval - oracle::energy(s, a, b)));
    worst = std::max(worst, std::abs(rep.pos_part - oracle::slope_part(s, a, b, true)));
    worst = std::max(worst, std::abs(rep.neg_part - oracle::slope_part(s, a, b, false)));
    worst = std::max(worst, std::abs(energy(s).total - oracle::energy_total(s)));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("property: finite differences of P converge to Px at second order") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const auto s = oracle::random_state(rng);
    double x = oracle::uniform(rng, -6.0, 6.0);
    bool near_kink = false;
    for (double q : s.q()) near_kink = near_kink || std::abs(x - q) < 0.05;
    if (near_kink) continue;
    const PeakonField f(s);
    auto fd = [&](double h) { return (f.P_Px(x + h).first - f.P_Px(x - h).first) / (2 * h); };
    const double px = f.P_Px(x).second;
    const double e1 = std::abs(fd(1e-2) - px), e2 = std::abs(fd(5e-3) - px);
    CHECK(e1 < 1e-3);
    if (e1 > 1e-10) CHECK(e2 < 0.3 * e1);
  }
}

TEST_CASE("energy report invariants") {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 50; ++k) {
    const auto s = oracle::random_state(rng);
    const double a = oracle::uniform(rng, -6.0, 0.0), b = oracle::uniform(rng, 0.0, 3.0), c = oracle::uniform(rng, 3.0, 6.0);
    const PeakonField f(s);
    const double ab = f.integral(Density::energy, a, b), bc = f.integral(Density::energy, b, c);
    CHECK(std::abs(ab + bc - f.integral(Density::energy, a, c)) <= 1e-12 * std::max(1.0, ab + bc));
    const auto rep = energy(s, a, c);
    const double uxsq = f.integral(Density::ux_sq, a, c);
    CHECK(std::abs(rep.neg_part + rep.pos_part - uxsq) <= 1e-10 * std::max(uxsq, 1e-300));
    CHECK(rep.total >= rep.on_interval);
    CHECK(rep.on_interval >= 0.0);
    CHECK(std::abs(rep.total - total_energy_closed_form(s)) <= 1e-10 * rep.total);
  }
  const auto empty = energy(PeakonState(0.0, {0.0}, {1.0}), 0.5, 0.5);
  CHECK(empty.on_interval == 0.0);
  CHECK(empty.neg_part == 0.0);
  CHECK(empty.pos_part == 0.0);
}

TEST_CASE("energy examples") {
  CHECK(energy(PeakonState(0.0, {0.0}, {1.0})).total == doctest::Approx(2.0).epsilon(1e-14));
  const auto o = oracle::R0();
  CHECK(std::abs(energy(o.state(0.0)).total - 0.25) < 1e-14);
  CHECK(std::abs(oracle::energy_total(o.state(0.0)) - 0.25) < 1e-10);
}

TEST_CASE("hat-weighted integrals match quadrature") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 40; ++k) {
    const auto s = oracle::random_state(rng);
    const double a = oracle::uniform(rng, -4.0, 2.0), b = a + oracle::uniform(rng, 0.0, 2.0);
    const double eps = oracle::uniform(rng, 0.01, 0.5);
    const Hat h = Hat::around(a, b, eps);
    const PeakonField f(s);
    auto br = oracle::kinks(s);
    br.insert(br.end(), {h.lo_outer, h.lo_inner, h.hi_inner, h.hi_outer});
    const double q = oracle::quad(
        [&](double x) {
          const double w = std::max(oracle::ux(s, x), 0.0);
          return h(x) * w * w;
        },
        h.lo_outer, h.hi_outer, br);
    CHECK(std::abs(f.weighted_integral(Density::ux_plus_sq, h) - q) < 1e-9);
  }
}

TEST_CASE("extreme slopes include one-sided limits at peaks") {
  const PeakonState single(0.0, {0.0}, {2.0});
  CHECK(max_abs_slope(single) == doctest::Approx(2.0));
  CHECK(min_slope(single) == doctest::Approx(-2.0));
  CHECK(max_abs_slope(PeakonState::zero(0.0)) == 0.0);
}

TEST_CASE("far-apart peakons do not overflow") {
  const PeakonState s(0.0, {-800.0, 800.0}, {1.0, -1.0});
  CHECK(eval_u(s, -800.0) == doctest::Approx(1.0));
  CHECK(std::isfinite(eval_P_Px(s, 0.0).first));
  CHECK(energy(s).total == doctest::Approx(4.0));
}

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "../oracles.hpp"
#include "chlab/characteristics.hpp"
#include "chlab/field.hpp"

using namespace chlab;

namespace {

struct Fixtures {
  oracle::Pair o = oracle::R0();
  ClosedFormPair pair = ClosedFormPair::from_initial(1.0, std::log(0.75));
  ExactPairSolution cons{pair, PairContinuation::reflection};
  ZeroSolution zero;
};

// single peakon u = p e^{-|x - q0 - p t|}
class Traveling final : public Solution {
 public:
  Traveling(double p, double q0) : p_(p), q0_(q0) {}
  PeakonState at(double t) const override { return PeakonState(t, {q0_ + p_ * t}, {p_}); }
  std::string describe() const override { return "traveling"; }

 private:
  double p_, q0_;
};

}  // namespace

TEST_CASE("zero solution: constant characteristics") {
  Fixtures f;
  const auto path = integrate_char(f.zero, 0.0, 1.3, 2.0);
  for (std::size_t k = 0; k < path.size(); ++k) {
    CHECK(path.zeta[k] == 1.3);
    CHECK(path.v[k] == 0.0);
  }
  CHECK(riccati_residual(path, f.zero) == 0.0);
  CHECK(cov_jacobian(path) == 1.0);
  const auto e = extremal_char(f.zero, 0.0, 1.3, 2.0, Side::right);
  CHECK(std::abs(e.path.zeta_end() - 1.3) < 1e-15);
  const auto pf = thick_pushforward(f.zero, 0.0, IntervalSet::parse("[-1,1]"), 3.0);
  REQUIRE(pf.pieces.size() == 1);
  CHECK(pf.pieces[0].lo == doctest::Approx(-1.0));
  CHECK(pf.pieces[0].hi == doctest::Approx(1.0));
}

TEST_CASE("R0 centre characteristic: zeta = 0 and v = -p e^{q/2}") {
  Fixtures f;
  const double t1 = 0.9 * f.o.T;
  const auto path = integrate_char(f.cons, 0.0, 0.0, t1);
  REQUIRE_FALSE(path.truncated);
  double dz = 0.0, dv = 0.0, bound = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double t = path.t[k];
    const double v_exact = -f.o.p(t) * std::exp(f.o.q(t) / 2);
    dz = std::max(dz, std::abs(path.zeta[k]));
    dv = std::max(dv, std::abs(path.v[k] - v_exact) / std::abs(v_exact));
    bound = std::max(bound, std::abs(path.v[k]) * (f.o.T - t));
  }
  CHECK(dz < 1e-12);
  CHECK(dv < 1e-7);
  CHECK(bound <= 4.0);  // (e^{H0 T} + 1) / (T - t)
  CHECK(riccati_residual(path, f.cons) < 1e-6);

  // Jacobian: below one, decreasing, and equal to the flow derivative
  double prev = 1.0;
  for (double t : {0.5, 1.0, 1.5, 1.9}) {
    const auto p = integrate_char(f.cons, 0.0, 0.0, t);
    const double J = cov_jacobian(p);
    CHECK(J < prev);
    prev = J;
    const double h = 1e-5;
    const auto a = integrate_char(f.cons, 0.0, h, t), b = integrate_char(f.cons, 0.0, -h, t);
    const double fd = (a.zeta_end() - b.zeta_end()) / (2 * h);
    CHECK(std::abs(fd - J) <= 0.05 * J);
  }
}

TEST_CASE("single peakon crest path rides the peak") {
  const Traveling sol(1.0, 0.0);
  const auto path = integrate_char(sol, 0.0, 0.0, 2.0);
  for (std::size_t k = 0; k < path.size(); ++k) CHECK(std::abs(path.zeta[k] - path.t[k]) < 1e-8);
  CHECK(riccati_residual(path, sol) < 1e-6);
  // At the crest u^2 - P = p^2/2, so the slope equation drives v away from 0 even though
  // u_x(crest) = 0 by convention; v = tanh(t/2) and the Jacobian is cosh^2(t/2).
  const PeakonField fld(sol.at(0.0));
  CHECK(fld.u(0.0) * fld.u(0.0) - fld.P_Px(0.0).first == doctest::Approx(0.5));
  CHECK(std::abs(path.v.back() - std::tanh(1.0)) < 1e-8);
  CHECK(std::abs(cov_jacobian(path) - std::pow(std::cosh(1.0), 2)) < 1e-7);
}

TEST_CASE("property: U matches u along paths and speed is bounded") {
  Fixtures f;
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const double z0 = oracle::uniform(rng, -5.0, 5.0);
    const double t1 = oracle::uniform(rng, 0.1, 0.95 * f.o.T);
    CharOptions co;
    co.samples = 101;
    const auto path = integrate_char(f.cons, 0.0, z0, t1, co);
    double umax = 0.0;
    for (std::size_t j = 0; j < path.size(); ++j) {
      const auto s = f.cons.at(path.t[j]);
      CHECK(std::abs(path.U[j] - oracle::u(s, path.zeta[j])) < 1e-7);
      umax = std::max(umax, f.o.p(path.t[j]));  // |u| <= sum |p_i| = p
    }
    for (std::size_t j = 1; j < path.size(); ++j)
      CHECK(std::abs(path.zeta[j] - path.zeta[j - 1]) <= umax * (path.t[j] - path.t[j - 1]) + 1e-12);
  }
}

TEST_CASE("characteristics are cut at the breaking time") {
  Fixtures f;
  const auto path = integrate_char(f.cons, 0.0, 0.5, 1.5 * f.o.T);
  CHECK(path.truncated);
  CHECK(path.t.back() <= f.o.T);
  CHECK_THROWS_AS(cov_jacobian(path), std::domain_error);
}

TEST_CASE("extremal characteristics where the flow is unique") {
  const Traveling sol(1.0, 0.0);
  const auto g = integrate_char(sol, 0.0, 2.0, 1.0);
  const auto L = extremal_char(sol, 0.0, 2.0, 1.0, Side::left);
  const auto R = extremal_char(sol, 0.0, 2.0, 1.0, Side::right);
  CHECK(std::abs(L.path.zeta_end() - g.zeta_end()) < 1e-6);
  CHECK(std::abs(R.path.zeta_end() - g.zeta_end()) < 1e-6);
  CHECK(L.path.flavor == CharFlavor::leftmost);
  CHECK(R.path.flavor == CharFlavor::rightmost);

  Fixtures f;
  for (double z0 : {-12.0, 11.0}) {
    const auto l = extremal_char(f.cons, 0.0, z0, 1.0, Side::left);
    const auto r = extremal_char(f.cons, 0.0, z0, 1.0, Side::right);
    CHECK(std::abs(l.path.zeta_end() - r.path.zeta_end()) < 1e-8);
  }
}

TEST_CASE("property: extremal endpoints are monotone in the start point") {
  Fixtures f;
  const std::array<double, 1> times{1.5};
  double prev = -1e300;
  for (int k = 0; k <= 40; ++k) {
    const double z0 = -3.0 + 0.15 * k;
    const auto r = extremal_char_at(f.cons, 0.0, z0, times, Side::right);
    CHECK(r.path.zeta.back() >= prev - 1e-12);
    prev = r.path.zeta.back();
  }
}

TEST_CASE("interval sets") {
  const auto a = IntervalSet::parse("[-1, 1]");
  REQUIRE(a.pieces.size() == 1);
  CHECK(a.pieces[0].lo_closed);
  const auto b = IntervalSet::parse("(0,2)");
  CHECK(b.pieces[0].is_open());
  const auto c = IntervalSet::parse("{0.5}");
  CHECK(c.pieces[0].is_point());
  const auto d = IntervalSet::parse("[2,3] u [0,2.5] U {7}").normalized();
  REQUIRE(d.pieces.size() == 2);
  CHECK(d.pieces[0].lo == 0.0);
  CHECK(d.pieces[0].hi == 3.0);
  CHECK(IntervalSet::parse(d.to_string()).normalized().pieces.size() == 2);
  CHECK_THROWS_AS(IntervalSet::parse("[1,0]"), std::invalid_argument);
  CHECK_THROWS_AS(IntervalSet::parse("1,2"), std::invalid_argument);
  CHECK_THROWS_AS(IntervalSet::parse(""), std::invalid_argument);
}

TEST_CASE("R0 pushforward of the origin stays degenerate before T") {
  Fixtures f;
  const auto pf = thick_pushforward(f.cons, 0.0, IntervalSet::parse("{0}"), 0.8 * f.o.T);
  REQUIRE(pf.pieces.size() == 1);
  CHECK(pf.pieces[0].hi - pf.pieces[0].lo < 1e-8);
}

TEST_CASE("single peakon pushforward against a dense characteristic hull") {
  const Traveling sol(1.0, 0.0);
  const auto pf = thick_pushforward(sol, 0.0, IntervalSet::parse("[-1,1]"), 1.0);
  REQUIRE(pf.pieces.size() == 1);
  const std::array<double, 1> times{1.0};
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < 1000; ++k) {
    const double z0 = -1.0 + 2.0 * k / 999.0;
    const auto p = integrate_char_at(sol, 0.0, z0, times);
    lo = std::min(lo, p.zeta.back());
    hi = std::max(hi, p.zeta.back());
  }
  CHECK(std::abs(pf.pieces[0].lo - lo) < 1e-6);
  CHECK(std::abs(pf.pieces[0].hi - hi) < 1e-6);
  const double width = pf.pieces[0].hi - pf.pieces[0].lo;
  CHECK(width > 0.0);
  CHECK(width <= 2.0 + 2.0 * 1.0 * 1.0);
  CHECK(pf.pieces[0].lo < 1.0);
  CHECK(pf.pieces[0].hi > 1.0);  // contains q(1) = 1
}

TEST_CASE("open intervals: inner approximation inside the outer one") {
  Fixtures f;
  const double T = f.o.T;
  for (double t : {T + 0.05, T + 0.2}) {
    const auto pf = thick_pushforward(f.cons, T, IntervalSet::parse("(-0.5,0)"), t);
    REQUIRE(pf.pieces.size() == 1);
    const auto& p = pf.pieces[0];
    REQUIRE(p.outer_lo.has_value());
    REQUIRE(p.outer_hi.has_value());
    CHECK(*p.outer_lo <= p.lo);
    CHECK(p.hi <= *p.outer_hi);
  }
}

TEST_CASE("pushbackward of the breaking point spans the two peaks") {
  Fixtures f;
  const double T = f.o.T;
  const double t = T - 0.5;
  const auto pb = thick_pushforward(f.cons, T, IntervalSet::parse("{0}"), t);
  REQUIRE(pb.pieces.size() == 1);
  CHECK_FALSE(pb.truncated);
  CHECK(std::abs(pb.pieces[0].lo - f.o.q(t) / 2) < 1e-5);
  CHECK(std::abs(pb.pieces[0].hi + f.o.q(t) / 2) < 1e-5);
}

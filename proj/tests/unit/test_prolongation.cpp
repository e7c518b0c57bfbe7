#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "chlab/field.hpp"
#include "chlab/prolongation.hpp"

using namespace chlab;

namespace {
double half_energy(const PeakonState& s) { return 0.5 * oracle::energy_total(s); }
}  // namespace

TEST_CASE("policy names") {
  CHECK(parse_policy("conservative_reflection") == PolicyKind::conservative_reflection);
  CHECK(parse_policy("dissipative_zero") == PolicyKind::dissipative_zero);
  CHECK(parse_policy("dissipative_merge") == PolicyKind::dissipative_merge);
  CHECK_THROWS_AS(parse_policy("alpha"), std::invalid_argument);
}

TEST_CASE("conservative reflection of R0") {
  const auto o = oracle::R0();
  const auto res = prolong(o.state(0.0), {PolicyKind::conservative_reflection}, 2 * o.T);
  const auto& sol = *res.solution;
  double mirror = 0.0;
  for (double s : {0.01, 0.3, 1.0, 2.0}) {
    for (int k = 0; k <= 20; ++k) {
      const double x = -3.0 + 0.3 * k + 1e-3;
      mirror = std::max(mirror, std::abs(oracle::u(sol.at(o.T + s), x) + oracle::u(sol.at(o.T - s), x)));
    }
  }
  CHECK(mirror < 1e-8);
  const double E0 = half_energy(o.state(0.0));
  CHECK(std::abs(res.ledger.E.back() - E0) < 1e-6);
  REQUIRE(res.ledger.jumps.size() == 1);
  CHECK(std::abs(res.ledger.jumps[0].dE) < 1e-12);
  REQUIRE(res.ledger.analytic_T.has_value());
  CHECK(*res.ledger.analytic_T == doctest::Approx(o.T));
  REQUIRE(res.ledger.detected_T.size() == 1);
  CHECK(res.ledger.detected_T[0] > o.T - 1e-3);
  CHECK_FALSE(res.oleinik_constant.has_value());
}

TEST_CASE("dissipative zero and merge agree on R0") {
  const auto o = oracle::R0();
  const double E0 = half_energy(o.state(0.0));
  const auto z = prolong(o.state(0.0), {PolicyKind::dissipative_zero}, 2 * o.T);
  const auto m = prolong(o.state(0.0), {PolicyKind::dissipative_merge}, 2 * o.T);
  REQUIRE(z.ledger.jumps.size() == 1);
  REQUIRE(m.ledger.jumps.size() == 1);
  CHECK(std::abs(z.ledger.jumps[0].dE + E0) < 1e-12);
  CHECK(std::abs(m.ledger.jumps[0].dE + E0) < 1e-6);
  CHECK(m.ledger.jumps[0].t == doctest::Approx(m.ledger.detected_T[0]));
  for (double t : {1.01 * o.T, 1.5 * o.T, 2 * o.T}) {
    CHECK(z.solution->at(t).empty());
    CHECK(m.solution->at(t).empty());
  }
  for (double t : {0.2, 1.0, 2.0}) {
    const auto a = z.solution->at(t), b = m.solution->at(t);
    CHECK(std::abs(a.q()[0] - b.q()[0]) < 1e-7);
    CHECK(std::abs(a.p()[0] - b.p()[0]) < 1e-7);
  }
  REQUIRE(z.oleinik_constant.has_value());
  CHECK(*z.oleinik_constant < 1.0);
}

TEST_CASE("weak energy condition and ledger consistency for a merging three-peakon run") {
  const PeakonState s0(0.0, {-2.0, 0.0, 2.0}, {1.5, 0.2, -1.0});
  const auto res = prolong(s0, {PolicyKind::dissipative_merge}, 8.0);
  CHECK_FALSE(res.events.empty());
  const double E0 = res.ledger.E.front();
  for (std::size_t k = 0; k < res.ledger.t.size(); ++k) {
    CHECK(res.ledger.E[k] <= E0 + 1e-6);
    CHECK(res.ledger.E[k] >= 0.0);
    const double direct = 0.5 * energy(res.solution->at(res.ledger.t[k])).total;
    CHECK(std::abs(direct - res.ledger.E[k]) <= 1e-9 * std::max(1.0, direct));
  }
  for (const auto& j : res.ledger.jumps) CHECK(j.dE <= 0.0);
  REQUIRE(res.oleinik_constant.has_value());
  CHECK(std::isfinite(*res.oleinik_constant));
}

TEST_CASE("unsupported policies") {
  const PeakonState s0(0.0, {-1.0, 1.0}, {1.0, 0.5});
  CHECK_THROWS_AS(prolong(s0, {PolicyKind::conservative_reflection}, 1.0), UnsupportedPolicy);
  CHECK_THROWS_AS(prolong(s0, {PolicyKind::dissipative_zero}, 1.0), UnsupportedPolicy);
  CHECK_THROWS_AS(prolong(s0, {PolicyKind::dissipative_merge}, 0.0), std::invalid_argument);
}

TEST_CASE("pair creation") {
  const auto o = oracle::R0();
  const auto pc = pair_creation_scenario(ClosedFormPair::from_initial(1.0, std::log(0.75)));
  CHECK(pc.solution->at(0.0).empty());
  CHECK(pc.C_tilde == doctest::Approx(4.0));
  for (double t : {1e-4, 1e-3, 1e-2, 0.1, 0.5}) {
    const auto s = pc.solution->at(t);
    CHECK(max_abs_slope(s) * t <= 4.0);
    // w(t) = -u(T - t)
    CHECK(oracle::u(s, 0.37) == doctest::Approx(-oracle::u(o.state(o.T - t), 0.37)).epsilon(1e-10));
  }
  const ZeroSolution zero;
  const auto cmp = max_dissipation_compare(*pc.solution, zero, 0.0, IntervalSet::parse("[-1,1]"));
  CHECK(cmp.applicable);
  CHECK(cmp.strict);
  CHECK(cmp.margin >= cmp.required_margin);
  CHECK(std::abs(cmp.mu_plus - 0.25) < 1e-4);
}

TEST_CASE("comparison is not applicable without accretion") {
  const auto pr = ClosedFormPair::from_initial(1.0, std::log(0.75));
  const ExactPairSolution diss(pr, PairContinuation::zero), cons(pr, PairContinuation::reflection);
  const auto na = max_dissipation_compare(diss, diss, pr.T, IntervalSet::parse("[-1,1]"));
  CHECK_FALSE(na.applicable);
  const auto gap = max_dissipation_compare(cons, diss, pr.T, IntervalSet::parse("[-1,1]"));
  CHECK(gap.applicable);
  CHECK(std::abs(gap.margin - 0.125) < 1e-6);  // E(0)
}

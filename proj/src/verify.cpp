#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chlab/field.hpp"
#include "chlab/scenario.hpp"

namespace chlab {

namespace {

std::string fmt(double x) { return format_double(x); }

struct R0 {
  ClosedFormPair pair = ClosedFormPair::from_initial(1.0, std::log(0.75));
  SolutionPtr cons = std::make_shared<ExactPairSolution>(pair, PairContinuation::reflection);
  SolutionPtr diss = std::make_shared<ExactPairSolution>(pair, PairContinuation::zero);
  double T() const { return pair.T; }
  double H0sq() const { return pair.H0 * pair.H0; }
};

double quad_energy(const PeakonState& s) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> cuts;
  const double lo = s.empty() ? -40.0 : s.q().front() - 40.0;
  const double hi = s.empty() ? 40.0 : s.q().back() + 40.0;
  cuts.push_back(lo);
  for (double q : s.q()) cuts.push_back(q);
  cuts.push_back(hi);
  auto f = [&](double x) {
    double u = 0.0, ux = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double e = s.p()[i] * std::exp(-std::abs(x - s.q()[i]));
      u += e;
      ux -= (x > s.q()[i] ? 1.0 : -1.0) * e;
    }
    return u * u + ux * ux;
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    if (cuts[k + 1] > cuts[k]) total += gauss_kronrod<double, 61>::integrate(f, cuts[k], cuts[k + 1], 15, 1e-14);
  return total;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

using Criterion = std::function<void(RunReport&, const VerifyOptions&, const R0&)>;

void c1(RunReport& rep, const VerifyOptions& o, const R0& r) {
  IntegrateOptions io;
  io.tol = o.tol;
  const double t1 = 0.9 * r.T();
  const auto traj = integrate_trajectory(r.pair.state_unchecked(0.0), t1, io);
  double err = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const double t = t1 * k / 1000.0;
    const auto a = traj.at(t);
    const auto b = closed_form_eval(r.pair, t);
    for (std::size_t i = 0; i < 2; ++i)
      err = std::max({err, std::abs(a.q()[i] - b.q()[i]), std::abs(a.p()[i] - b.p()[i])});
  }
  rep.add({"C1_oracle_fidelity", "integrator matches closed form on [0, 0.9T]", "0", err, "1e-6", err <= 1e-6});
}

void c2(RunReport& rep, const VerifyOptions& o, const R0& r) {
  const double H2 = r.H0sq();
  double cf = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double t = 0.999 * r.T() * k / 999.0;
    cf = std::max(cf, std::abs(r.pair.invariant(t) - H2));
  }
  IntegrateOptions io;
  io.tol = o.tol;
  const double t1 = 0.9 * r.T();
  const auto traj = integrate_trajectory(r.pair.state_unchecked(0.0), t1, io);
  double num = 0.0;
  for (int k = 0; k <= 1000; ++k) {
    const auto s = traj.at(t1 * k / 1000.0);
    const double p = s.p()[0] - s.p()[1];
    const double q = s.q()[0] - s.q()[1];
    num = std::max(num, std::abs(p * p * -std::expm1(q) - H2));
  }
  rep.values["C2_closed_form_invariant_drift"] = cf / H2;
  rep.values["C2_integrator_invariant_drift"] = num / H2;
  const bool pass = cf <= 1e-10 * H2 && num <= 1e-6 * H2;
  rep.add({"C2_invariant_conservation", "H0 invariant drift relative to H0^2 (integrator; closed form in values)",
           "0", num / H2, "1e-6 (closed form 1e-10)", pass});
}

void c3(RunReport& rep, const VerifyOptions&, const R0& r) {
  const double T = r.T();
  double worst_hi = 0.0, worst_lo = 1e300;
  const int n = 400;
  for (int k = 0; k <= n; ++k) {
    // geometric towards T - 1e-4
    const double gap = 0.5 * T * std::pow(1e-4 / (0.5 * T), static_cast<double>(k) / n);
    const double t = T - gap;
    const double s = max_abs_slope(r.cons->at(t)) * gap;
    worst_hi = std::max(worst_hi, s);
    worst_lo = std::min(worst_lo, s);
  }
  rep.values["C3_max_slope_times_gap"] = worst_hi;
  rep.values["C3_min_slope_times_gap"] = worst_lo;
  rep.add({"C3_oleinik_blowup", "0.5 <= (T-t) sup|u_x| <= 4 on [0.5T, T-1e-4]", "[0.5, 4]", worst_hi, "bounds",
           worst_hi <= 4.0 && worst_lo >= 0.5});
}

void c4(RunReport& rep, const VerifyOptions& o, const R0& r) {
  const double T = r.T();
  const double E0 = energy(r.cons->at(0.0)).total;
  double drift = 0.0;
  for (int k = 0; k <= 400; ++k) {
    const double t = T - T * std::pow(1e-4 / T, static_cast<double>(k) / 400);
    drift = std::max(drift, std::abs(energy(r.cons->at(t)).total - E0) / E0);
  }
  IntegrateOptions io;
  io.tol = o.tol;
  const auto traj = integrate_trajectory(r.pair.state_unchecked(0.0), T, io);
  for (int k = 0; k <= 400; ++k) {
    const double t = traj.t_stop() * k / 400.0;
    drift = std::max(drift, std::abs(energy(traj.at(t)).total - E0) / E0);
  }
  double agree = 0.0;
  for (double t : {0.0, 0.5 * T, 0.9 * T}) {
    const auto s = r.cons->at(t);
    const double cf = total_energy_closed_form(s);
    agree = std::max({agree, std::abs(energy(s).total - cf), std::abs(quad_energy(s) - cf)});
  }
  rep.values["C4_energy_integral"] = E0;
  rep.values["C4_energy_relative_drift"] = drift;
  rep.values["C4_closed_form_quadrature_gap"] = agree;
  rep.add({"C4_energy_constancy", "int(u^2+u_x^2) constant to 1e-6 rel; formula = quadrature to 1e-8", "0", drift,
           "1e-6 / 1e-8", drift <= 1e-6 && agree <= 1e-8});
}

void c5(RunReport& rep, const VerifyOptions&, const R0& r) {
  const double T = r.T();
  const auto s = r.cons->at(T - 1e-4);
  const double width = s.q()[1] - s.q()[0];
  const double eps = 10.0 * width;
  const double ratio = energy(s, -eps, eps).neg_part / energy(s).neg_part;
  const std::vector<double> radii = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  const auto prof = concentration_profile(*r.cons, T, MeasureSign::minus, 0.0, radii);
  const std::size_t m = prof.masses.size();
  double plateau = 1e300;
  for (std::size_t k = m - 2; k < m; ++k) plateau = std::min(plateau, prof.masses[k] / prof.masses[k - 1]);
  rep.values["C5_capture_ratio"] = ratio;
  rep.values["C5_plateau_ratio"] = plateau;
  rep.values["C5_profile"] = to_json(prof);
  rep.add({"C5_concentration", "99% of (u_x^-)^2 within 10 gap widths at T-1e-4; profile plateau >= 0.9", ">= 0.99",
           ratio, "plateau >= 0.9", ratio >= 0.99 && plateau >= 0.9});
}

double agreement_ratio(double a, double b) {
  const double allowed = std::max(0.02 * std::max(std::abs(a), std::abs(b)), 1e-4);
  return std::abs(a - b) / allowed;
}

void c6(RunReport& rep, const VerifyOptions&, const R0& r) {
  double worst = 0.0;
  auto arr = nlohmann::ordered_json::array();
  for (const char* b : {"[-1,1]", "{0}", "[1,2]"}) {
    const auto B = IntervalSet::parse(b);
    const auto a = mu_plus_testfn(*r.cons, r.T(), B);
    const auto p = mu_plus_pushforward(*r.cons, r.T(), B);
    worst = std::max(worst, agreement_ratio(a.value, p.value));
    arr.push_back({{"B", b}, {"test_function", a.value}, {"pushforward", p.value}});
  }
  rep.values["C6_mu_plus_at_T"] = arr;
  rep.add({"C6_dual_representation", "mu+ test-function = pushforward (2% rel / 1e-4 abs)", "<= 1", worst,
           "1 (normalized)", worst <= 1.0});
}

void c7(RunReport& rep, const VerifyOptions&, const R0& r) {
  const double T = r.T();
  const auto scan = atom_time_scan(*r.diss, {0.0, 0.5 * T, T, 1.5 * T}, IntervalSet::parse("[-1,1]"));
  double worst = 0.0;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : scan) {
    worst = std::max(worst, std::abs(e.mu_plus));
    arr.push_back({{"t", e.t}, {"mu_plus", e.mu_plus}, {"mu_minus", e.mu_minus}});
  }
  rep.values["C7_dissipative_scan"] = arr;
  rep.add({"C7_dissipative_vanishing", "|mu+| on {0, T/2, T, 1.5T} under dissipative_zero", "0", worst, "1e-4",
           worst <= 1e-4});
}

void c8(RunReport& rep, const VerifyOptions&, const R0& r) {
  const auto B = IntervalSet::parse("[-1,1]");
  const auto mp = mu_plus_testfn(*r.cons, r.T(), B);
  const auto mm = mu_minus(*r.cons, r.T(), B, MeasureMethod::test_function);
  const double mag = std::max(std::abs(mp.value), std::abs(mm.value));
  const double rel = std::abs(mp.value + mm.value) / mag;
  rep.values["C8_mu_plus"] = mp.value;
  rep.values["C8_mu_minus"] = mm.value;
  rep.values["C8_H0_squared"] = r.H0sq();
  rep.add({"C8_conservative_balance", "mu+(T,[-1,1]) + mu-(T,[-1,1]) = 0", "0", rel, "2% of magnitude",
           rel <= 0.02 && mag > 1e-4});
}

void c9(RunReport& rep, const VerifyOptions&, const R0& r) {
  const double a = -5.0, b = -1.0, t = 0.5;
  const std::size_t n = 1000;  // intervals; n + 1 characteristics
  const std::array<double, 2> times{0.0, t};
  const PeakonField f(r.cons->at(t));
  std::vector<double> g(n + 1), Mend(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double z0 = a + (b - a) * static_cast<double>(k) / n;
    const auto path = integrate_char_at(*r.cons, 0.0, z0, times);
    const double z = path.zeta.back();
    const double ux = f.ux(z);
    g[k] = (ux > 0 ? ux * ux : 0.0) * std::exp(path.log_jacobian.back());
    Mend[k] = z;
  }
  double rhs = 0.0;  // composite Simpson
  const double h = (b - a) / n;
  for (std::size_t k = 0; k <= n; ++k) rhs += g[k] * (k == 0 || k == n ? 1.0 : (k % 2 ? 4.0 : 2.0));
  rhs *= h / 3.0;
  const double lhs = f.integral(Density::ux_plus_sq, Mend.front(), Mend.back());
  const double rel = std::abs(lhs - rhs) / std::abs(lhs);
  rep.values["C9_lhs"] = lhs;
  rep.values["C9_rhs"] = rhs;
  rep.add({"C9_change_of_variables", "int_{M(A)} (u_x^+)^2 = int_A (u_x^+)^2(M) e^{int v}", "0", rel, "1e-4 rel",
           rel <= 1e-4});
}

void c10(RunReport& rep, const VerifyOptions&, const R0& r) {
  const auto path = integrate_char(*r.cons, 0.0, 0.0, 0.9 * r.T());
  const double res = riccati_residual(path, *r.cons);
  rep.add({"C10_riccati_residual", "slope equation residual along zeta=0 up to 0.9T", "0", res, "1e-6", res <= 1e-6});
}

void c11(RunReport& rep, const VerifyOptions& o, const R0& r) {
  std::mt19937_64 rng(o.seed);
  const double t1 = 0.5 * r.T();
  const std::array<double, 1> times{t1};
  ExtremalOptions eo;
  for (int k = 0; k <= 20; ++k) eo.delta_seq.push_back(1e-2 * std::ldexp(1.0, -k));
  const auto s0 = r.cons->at(0.0);
  double worst = 0.0, worst_rich = 0.0;
  int count = 0;
  while (count < 20) {
    const double z0 = -6.0 + 12.0 * uniform01(rng);
    if (std::abs(z0 - s0.q()[0]) < 0.05 || std::abs(z0 - s0.q()[1]) < 0.05) continue;
    ++count;
    const auto L = extremal_char_at(*r.cons, 0.0, z0, times, Side::left, eo);
    const auto R = extremal_char_at(*r.cons, 0.0, z0, times, Side::right, eo);
    double lo = 1e300, hi = -1e300;
    for (const auto* e : {&L, &R}) {
      const std::size_t m = e->family.size();
      for (std::size_t k = m - 3; k < m; ++k) {
        lo = std::min(lo, e->family[k][0]);
        hi = std::max(hi, e->family[k][0]);
      }
      worst_rich = std::max(worst_rich, e->richardson_spread);
    }
    worst = std::max(worst, hi - lo);
  }
  rep.values["C11_richardson_spread"] = worst_rich;
  rep.add({"C11_extremal_convergence", "delta-family spread at t1 over the three smallest delta, 20 points", "0",
           worst, "1e-6", worst <= 1e-6});
}

void c12(RunReport& rep, const VerifyOptions&, const R0& r) {
  const auto pc = pair_creation_scenario(r.pair);
  const ZeroSolution zero;
  const auto cmp = max_dissipation_compare(*pc.solution, zero, 0.0, IntervalSet::parse("[-1,1]"));
  rep.values["C12_comparison"] = to_json(cmp);
  rep.add({"C12_max_dissipation", "E(accreting) - E(u=0) >= mu+(0,[-1,1])/4 strictly", ">= " + fmt(cmp.required_margin),
           cmp.margin, "extrapolation error", cmp.applicable && cmp.strict});
}

void c13(RunReport& rep, const VerifyOptions&, const R0& r) {
  const auto B = IntervalSet::parse("[1,2]");
  double worst = 0.0;
  for (MeasureMethod m : {MeasureMethod::test_function, MeasureMethod::pushforward}) {
    worst = std::max(worst, std::abs(mu_plus(*r.cons, r.T(), B, m).value));
    worst = std::max(worst, std::abs(mu_minus(*r.cons, r.T(), B, m).value));
  }
  const auto prof = concentration_profile(*r.cons, r.T(), MeasureSign::minus, 3.0, {1.0, 0.5, 0.25});
  rep.values["C13_profile_at_3"] = to_json(prof);
  rep.add({"C13_localization", "mu+-(T,[1,2]) = 0", "0", worst, "1e-4", worst <= 1e-4});
}

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> m = {{1, c1},  {2, c2},  {3, c3},   {4, c4},  {5, c5},
                                             {6, c6},  {7, c7},  {8, c8},   {9, c9},  {10, c10},
                                             {11, c11}, {12, c12}, {13, c13}};
  return m;
}

const std::map<std::string, std::vector<int>>& suites() {
  static const std::map<std::string, std::vector<int>> m = {
      {"oracle", {1, 2, 3, 4}},
      {"characteristics", {9, 10, 11}},
      {"measures", {5, 6, 7, 8, 13}},
      {"prolongation", {12}},
      {"determinism", {14}},
      {"all", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14}},
  };
  return m;
}

RunReport run_criteria(const std::string& name, const std::vector<int>& ids, const VerifyOptions& opts) {
  RunReport rep;
  rep.name = "verify:" + name;
  const R0 r;
  rep.values["seed"] = opts.seed;
  rep.values["R0_H0"] = r.pair.H0;
  rep.values["R0_T"] = r.T();
  for (int id : ids) {
    if (id == 14) continue;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria().at(id)(rep, opts, r);
    } catch (const std::exception& e) {
      rep.add({"C" + std::to_string(id) + "_error", e.what(), "no exception", NAN, "-", false});
    }
    rep.timings.emplace_back("C" + std::to_string(id),
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  return rep;
}

}  // namespace

std::vector<std::string> verify_suites() {
  std::vector<std::string> names;
  for (const auto& [k, v] : suites()) names.push_back(k);
  return names;
}

RunReport verify(const std::string& suite, const VerifyOptions& opts) {
  const auto it = suites().find(suite);
  if (it == suites().end()) throw std::invalid_argument("unknown verify suite '" + suite + "'");
  const auto& ids = it->second;
  RunReport rep = run_criteria(suite, ids, opts);
  if (std::find(ids.begin(), ids.end(), 14) != ids.end()) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<int> rest;
    for (const auto& [id, fn] : criteria()) rest.push_back(id);
    const std::string a = run_criteria("determinism", rest, opts).to_json().dump();
    const std::string b = run_criteria("determinism", rest, opts).to_json().dump();
    rep.add({"C14_determinism", "two in-process runs of criteria 1-13 serialize identically", "identical",
             a == b ? 0.0 : 1.0, "byte-for-byte", a == b});
    rep.timings.emplace_back("C14", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  rep.notes.push_back(
      "Singularity of the accretion measure and countability of its atoms are not checked for arbitrary weak "
      "solutions; they are exercised on the implemented scenario family through C5 (concentration), C7 "
      "(dissipative vanishing) and C13 (localization).");
  const R0 r;
  rep.notes.push_back("The atom mass observed at the breaking time equals H0^2 = " + fmt(r.H0sq()) +
                      " (energy integral int(u^2+u_x^2)); a value of 2 H0^2 would indicate a factor-2 "
                      "discrepancy and is not asserted.");
  return rep;
}

}  // namespace chlab

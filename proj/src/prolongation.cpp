#include "chlab/prolongation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "chlab/field.hpp"

namespace chlab {

std::string to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::conservative_reflection: return "conservative_reflection";
    case PolicyKind::dissipative_zero: return "dissipative_zero";
    case PolicyKind::dissipative_merge: return "dissipative_merge";
  }
  return "dissipative_merge";
}

PolicyKind parse_policy(const std::string& name) {
  if (name == "conservative_reflection" || name == "conservative") return PolicyKind::conservative_reflection;
  if (name == "dissipative_zero") return PolicyKind::dissipative_zero;
  if (name == "dissipative_merge" || name == "dissipative") return PolicyKind::dissipative_merge;
  throw std::invalid_argument("unknown prolongation policy '" + name + "'");
}

namespace {

double half_energy(const PeakonState& s) { return 0.5 * total_energy_closed_form(s); }

PeakonState merge_pair(const PeakonState& s, std::size_t i, double cancel_tol) {
  std::vector<double> q(s.q().begin(), s.q().end()), p(s.p().begin(), s.p().end());
  const std::size_t j = i + 1;
  const double pm = p[i] + p[j];
  const double qm = 0.5 * (q[i] + q[j]);
  q.erase(q.begin() + static_cast<std::ptrdiff_t>(j));
  p.erase(p.begin() + static_cast<std::ptrdiff_t>(j));
  if (std::abs(pm) <= cancel_tol * (std::abs(s.p()[i]) + std::abs(s.p()[j]))) {
    q.erase(q.begin() + static_cast<std::ptrdiff_t>(i));
    p.erase(p.begin() + static_cast<std::ptrdiff_t>(i));
  } else {
    q[i] = qm;
    p[i] = pm;
  }
  return PeakonState(s.t(), std::move(q), std::move(p));
}

}  // namespace

EnergyLedger energy_ledger(const Solution& sol, double t_from, double t_to, std::size_t samples) {
  EnergyLedger led;
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = k + 1 == samples ? t_to : t_from + (t_to - t_from) * static_cast<double>(k) / static_cast<double>(samples - 1);
    led.t.push_back(t);
    led.E.push_back(half_energy(sol.at(t)));
  }
  return led;
}

double oleinik_constant(const Solution& sol, double t_from, double t_to, double x_lo, double x_hi, std::size_t n) {
  double c = -std::numeric_limits<double>::infinity();
  n = std::max<std::size_t>(n, 2);
  for (std::size_t k = 1; k <= n; ++k) {
    const double t = t_from + (t_to - t_from) * static_cast<double>(k) / static_cast<double>(n);
    const PeakonField f(sol.at(t));
    const double w = std::min(t, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double x = x_lo + (x_hi - x_lo) * static_cast<double>(j) / static_cast<double>(n - 1);
      c = std::max(c, f.ux(x) * w);
    }
  }
  return c;
}

Prolonged prolong(const PeakonState& initial, const ProlongationPolicy& policy, double t_end,
                  const ProlongOptions& opts) {
  const double t0 = initial.t();
  if (!(t_end > t0)) throw std::invalid_argument("prolong: t_end must exceed the initial time");
  const auto pair = ClosedFormPair::from_state(initial);
  if (!pair && policy.kind != PolicyKind::dissipative_merge)
    throw UnsupportedPolicy("policy " + to_string(policy.kind) +
                            " needs antisymmetric two-peakon data; use dissipative_merge instead");

  Prolonged out;
  std::vector<LedgerJump> jumps;
  std::ostringstream notes;

  if (pair && policy.kind != PolicyKind::dissipative_merge) {
    const auto cont = policy.kind == PolicyKind::conservative_reflection ? PairContinuation::reflection
                                                                        : PairContinuation::zero;
    auto exact = std::make_shared<ExactPairSolution>(*pair, cont, -t0);
    const double T_abs = exact->breaking_time();
    out.solution = exact;
    out.ledger.analytic_T = T_abs;
    // the integrator's view of the same collision, for the record
    auto detected = integrate(initial, std::max(t_end, T_abs) + 1.0, opts.integrate);
    if (auto* ev = std::get_if<BreakingEvent>(&detected)) {
      out.events.push_back(*ev);
      out.ledger.detected_T.push_back(ev->t_break);
    }
    if (T_abs <= t_end) {
      const double before = 0.5 * pair->H0 * pair->H0;
      const double after = cont == PairContinuation::reflection ? before : 0.0;
      jumps.push_back({T_abs, after - before, to_string(policy.kind)});
    }
    notes << "exact pair switched at analytic T=" << T_abs;
  } else {
    std::vector<NumericSolution::Piece> pieces;
    std::vector<double> event_times;
    PeakonState state = initial;
    for (int guard = 0;; ++guard) {
      if (guard > 10000) throw std::runtime_error("prolong: too many collisions");
      PeakonTrajectory traj = integrate_trajectory(state, t_end, opts.integrate);
      const double from = state.t();
      if (auto* fin = std::get_if<PeakonState>(&traj.end)) {
        (void)fin;
        pieces.push_back({from, t_end, std::move(traj)});
        break;
      }
      const BreakingEvent ev = std::get<BreakingEvent>(traj.end);
      pieces.push_back({from, ev.t_break, std::move(traj)});
      out.events.push_back(ev);
      out.ledger.detected_T.push_back(ev.t_break);
      event_times.push_back(ev.t_break);
      const PeakonState merged = merge_pair(ev.state_at_stop, ev.indices.first, policy.cancel_tol);
      jumps.push_back({ev.t_break, half_energy(merged) - half_energy(ev.state_at_stop), "merge"});
      state = merged.with_time(ev.t_break);
    }
    if (pair) out.ledger.analytic_T = t0 + pair->T;
    out.solution = std::make_shared<NumericSolution>(std::move(pieces), event_times, "dissipative_merge");
    notes << "numeric evolution with " << event_times.size() << " merge event(s)";
  }

  EnergyLedger led = energy_ledger(*out.solution, t0, t_end, opts.ledger_samples);
  led.jumps = std::move(jumps);
  led.analytic_T = out.ledger.analytic_T;
  led.detected_T = out.ledger.detected_T;
  out.ledger = std::move(led);

  if (policy.kind != PolicyKind::conservative_reflection) {
    double speed = 0.0;
    for (double p : initial.p()) speed += std::abs(p);
    const double reach = 5.0 + speed * (t_end - t0);
    const double lo = initial.empty() ? -reach : initial.q().front() - reach;
    const double hi = initial.empty() ? reach : initial.q().back() + reach;
    out.oleinik_constant = oleinik_constant(*out.solution, t0, t_end, lo, hi, opts.oleinik_grid);
  }
  out.notes = notes.str();
  return out;
}

PairCreation pair_creation_scenario(const ClosedFormPair& pair) {
  PairCreation pc;
  pc.pair = pair;
  pc.solution = std::make_shared<ExactPairSolution>(pair, PairContinuation::reflection, pair.T);
  pc.C_tilde = std::exp(pair.H0 * pair.T) + 1.0;
  return pc;
}

DissipationComparison max_dissipation_compare(const Solution& accreting, const Solution& alternative, double t0,
                                              const IntervalSet& B, const MeasureOptions& opts) {
  DissipationComparison c;
  c.t0 = t0;
  c.B = B.to_string();
  const MeasureEstimate mu = mu_plus_testfn(accreting, t0, B, opts);
  c.mu_plus = mu.value;
  c.mu_plus_error = mu.extrapolation_error;
  c.required_margin = mu.value / 4.0;

  std::vector<double> gaps, ea, eb;
  for (double t : mu.t_sequence) {
    gaps.push_back(t - t0);
    ea.push_back(half_energy(accreting.at(t)));
    eb.push_back(half_energy(alternative.at(t)));
  }
  const Limit la = extrapolate_to_zero(gaps, ea), lb = extrapolate_to_zero(gaps, eb);
  c.E_accreting = la.value;
  c.E_alternative = lb.value;
  c.E_error = la.error + lb.error;
  c.margin = la.value - lb.value;

  if (is_vanishing(mu, opts.zero_abs)) {
    c.applicable = false;
    c.note = "no accretion, test not applicable";
    return c;
  }
  const double slack = c.E_error + 0.25 * c.mu_plus_error;
  c.strict = c.margin - slack >= c.required_margin && c.margin > 0.0;
  c.inconclusive = !c.strict && c.margin + slack >= c.required_margin;
  c.note = c.strict ? "strict inequality with the required margin"
                    : (c.inconclusive ? "inconclusive within extrapolation error" : "inequality violated");
  return c;
}

}  // namespace chlab

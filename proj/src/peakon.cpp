#include "chlab/peakon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "chlab/field.hpp"

namespace chlab {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::string collision_message(std::size_t i, std::size_t j, double gap) {
  std::ostringstream os;
  os << "peakons " << i << " and " << j << " collided (gap " << gap << ")";
  return os.str();
}

// log cosh(s) without overflow.
double log_cosh(double s) {
  s = std::abs(s);
  if (s > 20.0) return s + std::log1p(std::exp(-2.0 * s)) - std::log(2.0);
  const double sh = std::sinh(0.5 * s);
  return std::log1p(2.0 * sh * sh);
}

}  // namespace

CollisionError::CollisionError(std::size_t i_, std::size_t j_, double gap_)
    : std::runtime_error(collision_message(i_, j_, gap_)), i(i_), j(j_), gap(gap_) {}

PeakonState::PeakonState(double t, std::vector<double> q, std::vector<double> p) : t_(t) {
  if (q.size() != p.size()) throw std::invalid_argument("PeakonState: q and p differ in length");
  if (!std::isfinite(t)) throw std::invalid_argument("PeakonState: non-finite time");
  for (std::size_t i = 0; i < q.size(); ++i)
    if (!std::isfinite(q[i]) || !std::isfinite(p[i]))
      throw std::invalid_argument("PeakonState: non-finite entry");
  std::vector<std::size_t> order(q.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return q[a] < q[b]; });
  q_.reserve(q.size());
  p_.reserve(p.size());
  for (auto k : order) {
    q_.push_back(q[k]);
    p_.push_back(p[k]);
  }
}

PeakonState PeakonState::with_time(double t) const {
  PeakonState s = *this;
  s.t_ = t;
  return s;
}

PeakonState PeakonState::negated() const {
  PeakonState s = *this;
  for (auto& v : s.p_) v = -v;
  return s;
}

double PeakonState::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < q_.size(); ++i) g = std::min(g, q_[i] - q_[i - 1]);
  return g;
}

std::size_t PeakonState::closest_pair() const {
  std::size_t best = 0;
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < q_.size(); ++i) {
    if (q_[i] - q_[i - 1] < g) {
      g = q_[i] - q_[i - 1];
      best = i - 1;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

ClosedFormPair ClosedFormPair::from_initial(double p0, double q0) {
  if (!(p0 > 0.0) || !(q0 < 0.0) || !std::isfinite(p0) || !std::isfinite(q0))
    throw std::invalid_argument("ClosedFormPair: need p0 > 0 and q0 < 0");
  ClosedFormPair c;
  c.p0 = p0;
  c.q0 = q0;
  c.H0 = p0 * std::sqrt(-std::expm1(q0));
  // T = (1/H0) log((p0+H0)/(p0-H0)) = (2/H0) atanh(H0/p0)
  c.T = 2.0 * std::atanh(c.H0 / p0) / c.H0;
  return c;
}

std::optional<ClosedFormPair> ClosedFormPair::from_state(const PeakonState& s, double rel_tol) {
  if (s.size() != 2) return std::nullopt;
  const double a = s.q()[0], b = s.p()[0];
  const double scale_q = std::max(std::abs(a), std::abs(s.q()[1]));
  const double scale_p = std::max(std::abs(b), std::abs(s.p()[1]));
  if (!(a < 0.0) || !(b > 0.0)) return std::nullopt;
  if (std::abs(a + s.q()[1]) > rel_tol * scale_q) return std::nullopt;
  if (std::abs(b + s.p()[1]) > rel_tol * scale_p) return std::nullopt;
  return from_initial(2.0 * b, 2.0 * a);
}

// With s = H0 (T - t)/2 the closed form reduces to p = H0 coth(s), q = -2 log cosh(s).
double ClosedFormPair::momentum(double t) const {
  const double s = 0.5 * H0 * (T - t);
  return H0 / std::tanh(s);
}

double ClosedFormPair::separation(double t) const { return -2.0 * log_cosh(0.5 * H0 * (T - t)); }

PeakonState ClosedFormPair::state_unchecked(double t) const {
  const double p = momentum(t);
  const double q = separation(t);
  return PeakonState(t, {0.5 * q, -0.5 * q}, {0.5 * p, -0.5 * p});
}

double ClosedFormPair::invariant(double t) const {
  const double p = momentum(t);
  return -p * p * std::expm1(separation(t));
}

PeakonState closed_form_eval(const ClosedFormPair& pair, double t) {
  if (!(t >= 0.0) || !(t < pair.T))
    throw std::domain_error("closed_form_eval: t must lie in [0, T)");
  return pair.state_unchecked(t);
}

// ---------------------------------------------------------------------------

void npeakon_rhs_flat(std::span<const double> y, std::span<double> dydt) {
  const std::size_t n = y.size() / 2;
  auto q = y.subspan(0, n);
  auto p = y.subspan(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double dq = 0.0, dp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = q[i] - q[j];
      const double k = std::exp(-std::abs(d));
      dq += p[j] * k;
      dp += p[j] * sgn(d) * k;
    }
    dydt[i] = dq;
    dydt[n + i] = p[i] * dp;
  }
}

PeakonRhs npeakon_rhs(const PeakonState& state, double epsilon_gap) {
  const std::size_t n = state.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double gap = state.q()[i] - state.q()[i - 1];
    if (gap < epsilon_gap) throw CollisionError(i - 1, i, gap);
  }
  std::vector<double> y(2 * n), d(2 * n);
  std::copy(state.q().begin(), state.q().end(), y.begin());
  std::copy(state.p().begin(), state.p().end(), y.begin() + static_cast<std::ptrdiff_t>(n));
  npeakon_rhs_flat(y, d);
  PeakonRhs out;
  out.dq.assign(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(n));
  out.dp.assign(d.begin() + static_cast<std::ptrdiff_t>(n), d.end());
  return out;
}

// ---------------------------------------------------------------------------

double PeakonTrajectory::t_start() const {
  return segments.empty() ? t_stop() : segments.front().t0;
}

double PeakonTrajectory::t_stop() const {
  return std::visit(
      [](auto& e) {
        if constexpr (std::is_same_v<std::decay_t<decltype(e)>, PeakonState>) return e.t();
        else return e.t_break;
      },
      end);
}

PeakonState PeakonTrajectory::at(double t) const {
  if (segments.empty()) {
    if (auto* s = std::get_if<PeakonState>(&end)) return s->with_time(t);
    return std::get<BreakingEvent>(end).state_at_stop.with_time(t);
  }
  const double lo = segments.front().t0, hi = segments.back().t1();
  if (t < lo - 1e-12 * std::max(1.0, std::abs(lo)) || t > hi + 1e-12 * std::max(1.0, std::abs(hi)))
    throw std::domain_error("PeakonTrajectory::at: time outside the integrated range");
  auto it = std::upper_bound(segments.begin(), segments.end(), t,
                             [](double v, const Dopri5::Segment& s) { return v < s.t1(); });
  if (it == segments.end()) --it;
  std::vector<double> y(2 * n);
  it->eval(t, y);
  return PeakonState(t, std::vector<double>(y.begin(), y.begin() + static_cast<std::ptrdiff_t>(n)),
                     std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(n), y.end()));
}

PeakonTrajectory integrate_trajectory(const PeakonState& state, double t_end,
                                      const IntegrateOptions& opts) {
  if (t_end < state.t()) throw std::invalid_argument("integrate: t_end before the state time");
  if (!(opts.tol > 0.0) || opts.tol > 1e-2) throw std::invalid_argument("integrate: tol must lie in (0, 1e-2]");

  PeakonTrajectory traj;
  const std::size_t n = state.size();
  traj.n = n;
  if (n >= 2 && state.min_gap() < opts.epsilon_gap) {
    const std::size_t i = state.closest_pair();
    traj.end = BreakingEvent{state.t(), {i, i + 1}, state.min_gap(), min_slope(state), state};
    return traj;
  }
  if (n == 0 || t_end == state.t()) {
    traj.end = state.with_time(t_end);
    return traj;
  }

  std::vector<double> y(2 * n);
  std::copy(state.q().begin(), state.q().end(), y.begin());
  std::copy(state.p().begin(), state.p().end(), y.begin() + static_cast<std::ptrdiff_t>(n));

  Dopri5::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  o.max_step = opts.max_step;
  // The integrator never reorders q: steps that swap two peakons are rejected.
  auto ordered = [n](std::span<const double> v) {
    for (std::size_t i = 1; i < n; ++i)
      if (!(v[i] > v[i - 1])) return false;
    return true;
  };
  Dopri5 solver([](double, std::span<const double> v, std::span<double> d) { npeakon_rhs_flat(v, d); },
                o, ordered);
  solver.reset(state.t(), y);

  auto current_state = [&] {
    auto v = solver.y();
    return PeakonState(solver.t(), std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)),
                       std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
  };
  double vmin = min_slope(state);

  while (solver.t() < t_end) {
    const auto status = solver.step(t_end);
    if (status != Dopri5::Status::ok) {
      PeakonState s = current_state();
      const std::size_t i = s.closest_pair();
      traj.end = BreakingEvent{s.t(), {i, i + 1}, std::max(0.0, s.min_gap()), vmin, s};
      return traj;
    }
    traj.segments.push_back(solver.last_segment());
    PeakonState s = current_state();
    vmin = std::min(vmin, min_slope(s));
    if (n >= 2 && s.min_gap() < opts.epsilon_gap) {
      const std::size_t i = s.closest_pair();
      traj.end = BreakingEvent{s.t(), {i, i + 1}, std::max(0.0, s.min_gap()), vmin, s};
      return traj;
    }
  }
  traj.end = current_state();
  return traj;
}

IntegrateResult integrate(const PeakonState& state, double t_end, const IntegrateOptions& opts) {
  return integrate_trajectory(state, t_end, opts).end;
}

std::optional<double> breaking_time_estimate(const PeakonState& state, double horizon,
                                             const IntegrateOptions& opts) {
  if (auto pair = ClosedFormPair::from_state(state)) return state.t() + pair->T;
  auto result = integrate(state, state.t() + horizon, opts);
  if (auto* ev = std::get_if<BreakingEvent>(&result)) return ev->t_break;
  return std::nullopt;
}

}  // namespace chlab

#include "chlab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "chlab/field.hpp"

namespace chlab {

std::string to_string(MeasureSign s) { return s == MeasureSign::plus ? "plus" : "minus"; }
std::string to_string(MeasureMethod m) { return m == MeasureMethod::test_function ? "test_function" : "pushforward"; }

std::vector<double> default_eps_seq() {
  std::vector<double> e;
  for (int k = 0; k <= 6; ++k) e.push_back(0.1 * std::ldexp(1.0, -k));
  return e;
}

Limit extrapolate_to_zero(const std::vector<double>& g, const std::vector<double>& f) {
  const std::size_t n = std::min(g.size(), f.size());
  if (n == 0) throw std::invalid_argument("extrapolate_to_zero: no samples");
  if (n == 1) return {f[0], std::numeric_limits<double>::infinity()};
  auto lin = [&](std::size_t a, std::size_t b) { return (g[a] * f[b] - g[b] * f[a]) / (g[a] - g[b]); };
  const double L = lin(n - 2, n - 1);
  const double err = n >= 3 ? std::abs(L - lin(n - 3, n - 2)) : std::abs(L - f[n - 1]);
  return {L, err};
}

namespace {

SolutionPtr borrow(const Solution& sol) { return SolutionPtr(SolutionPtr{}, &sol); }

// Gaps t_k - t0 (forward) or t0 - t_k (backward) that stay clear of other singular times.
std::vector<double> time_gaps(const Solution& sol, double t0, bool forward, const MeasureOptions& opts) {
  double room = forward ? sol.t_max() - t0 : t0 - sol.t_min();
  if (!(room > 0.0)) throw std::domain_error("measures: no room for a one-sided limit at this t0");
  for (double s : sol.singular_times()) {
    const double d = forward ? s - t0 : t0 - s;
    if (d > 0.0) room = std::min(room, d);
  }
  const double delta = std::min(opts.delta_t, 0.5 * room);
  std::vector<double> g;
  for (int k = 0; k < opts.t_levels; ++k) g.push_back(delta * std::ldexp(1.0, -k));
  return g;
}

bool hat_for(const IntervalPiece& p, double eps, Hat& h) {
  h.lo_outer = p.lo_closed ? p.lo - 2 * eps : p.lo + eps;
  h.lo_inner = p.lo_closed ? p.lo - eps : p.lo + 2 * eps;
  h.hi_inner = p.hi_closed ? p.hi + eps : p.hi - 2 * eps;
  h.hi_outer = p.hi_closed ? p.hi + 2 * eps : p.hi - eps;
  return h.lo_inner <= h.hi_inner;
}

bool reliable_estimate(double value, double err, double zero_abs) {
  return err <= std::max(0.05 * std::abs(value), zero_abs);
}

}  // namespace

MeasureEstimate mu_plus_testfn(const Solution& sol, double t0, const IntervalSet& B, const MeasureOptions& opts) {
  const IntervalSet src = B.normalized();
  const auto gaps = time_gaps(sol, t0, true, opts);
  const std::vector<double> eps_all = opts.eps_seq.empty() ? default_eps_seq() : opts.eps_seq;

  MeasureEstimate est;
  est.t0 = t0;
  est.B = B.to_string();
  est.method = MeasureMethod::test_function;
  est.sign = MeasureSign::plus;
  for (double g : gaps) est.t_sequence.push_back(t0 + g);

  std::vector<PeakonField> fields;
  fields.reserve(gaps.size());
  for (double t : est.t_sequence) fields.emplace_back(sol.at(t));
  const PeakonField base(sol.at(t0));

  std::vector<double> eps_used, lim_eps;
  double t_err = 0.0;
  for (double eps : eps_all) {
    std::vector<Hat> hats;
    bool ok = true;
    for (const auto& p : src.pieces) {
      Hat h{};
      ok = ok && hat_for(p, eps, h);
      if (!hats.empty() && h.lo_outer < hats.back().hi_outer) ok = false;
      hats.push_back(h);
    }
    if (!ok) continue;
    auto total = [&](const PeakonField& f) {
      double s = 0.0;
      for (const auto& h : hats) s += f.weighted_integral(Density::ux_plus_sq, h);
      return s;
    };
    std::vector<double> vals;
    for (const auto& f : fields) vals.push_back(total(f));
    const Limit L = extrapolate_to_zero(gaps, vals);
    eps_used.push_back(eps);
    lim_eps.push_back(L.value - total(base));
    t_err = L.error;
    est.values = vals;
  }
  if (eps_used.size() < 2) throw std::invalid_argument("mu_plus_testfn: eps sequence too coarse for " + est.B);
  const Limit L = extrapolate_to_zero(eps_used, lim_eps);
  est.value = L.value;
  est.extrapolation_error = std::max(L.error, t_err);
  est.reliable = reliable_estimate(est.value, est.extrapolation_error, opts.zero_abs);
  return est;
}

MeasureEstimate mu_plus_pushforward(const Solution& sol, double t0, const IntervalSet& B,
                                    const MeasureOptions& opts) {
  const IntervalSet src = B.normalized();
  const auto gaps = time_gaps(sol, t0, true, opts);

  MeasureEstimate est;
  est.t0 = t0;
  est.B = B.to_string();
  est.method = MeasureMethod::pushforward;
  est.sign = MeasureSign::plus;
  for (double g : gaps) est.t_sequence.push_back(t0 + g);

  std::vector<double> t_asc(est.t_sequence.rbegin(), est.t_sequence.rend());
  const auto pfs = thick_pushforward_at(sol, t0, src, t_asc, opts.pushforward);
  std::vector<double> vals(gaps.size());
  double pf_err = 0.0;
  for (std::size_t k = 0; k < pfs.size(); ++k) {
    const auto& pf = pfs[k];
    if (pf.truncated) throw std::runtime_error("mu_plus_pushforward: pushforward truncated by breaking");
    const PeakonField f(sol.at(pf.t));
    double s = 0.0;
    for (const auto& piece : pf.pieces) s += f.integral(Density::ux_plus_sq, piece.lo, piece.hi);
    vals[gaps.size() - 1 - k] = s;
    pf_err = std::max(pf_err, pf.extrapolation_error);
  }
  const PeakonField base(sol.at(t0));
  double base_val = 0.0;
  for (const auto& p : src.pieces) base_val += base.integral(Density::ux_plus_sq, p.lo, p.hi);

  const Limit L = extrapolate_to_zero(gaps, vals);
  est.values = vals;
  est.value = L.value - base_val;
  est.extrapolation_error = L.error;
  est.reliable = reliable_estimate(est.value, est.extrapolation_error, opts.zero_abs);
  return est;
}

MeasureEstimate mu_plus(const Solution& sol, double t0, const IntervalSet& B, MeasureMethod method,
                        const MeasureOptions& opts) {
  return method == MeasureMethod::test_function ? mu_plus_testfn(sol, t0, B, opts)
                                                : mu_plus_pushforward(sol, t0, B, opts);
}

MeasureEstimate mu_minus(const Solution& sol, double t0, const IntervalSet& B, MeasureMethod method,
                         const MeasureOptions& opts) {
  const TimeReversed rev(borrow(sol), t0);
  MeasureEstimate est = mu_plus(rev, 0.0, B, method, opts);
  est.t0 = t0;
  est.sign = MeasureSign::minus;
  est.value = -est.value;
  for (auto& t : est.t_sequence) t = t0 - t;
  return est;
}

bool is_vanishing(const MeasureEstimate& e, double zero_abs) {
  return std::abs(e.value) < std::max(zero_abs, 10.0 * e.extrapolation_error);
}

ConcentrationProfile concentration_profile(const Solution& sol, double t0, MeasureSign side, double x_star,
                                           const std::vector<double>& radii, const MeasureOptions& opts) {
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] < radii[k - 1])) throw std::invalid_argument("concentration_profile: radii must decrease");
  const bool plus = side == MeasureSign::plus;
  const auto gaps = time_gaps(sol, t0, plus, opts);
  const Density d = plus ? Density::ux_plus_sq : Density::ux_minus_sq;

  std::vector<PeakonField> fields;
  for (double g : gaps) fields.emplace_back(sol.at(plus ? t0 + g : t0 - g));
  const PeakonField base(sol.at(t0));

  ConcentrationProfile prof;
  prof.t0 = t0;
  prof.side = side;
  prof.x_star = x_star;
  prof.radii = radii;
  for (double r : radii) {
    std::vector<double> vals;
    for (const auto& f : fields) vals.push_back(f.integral(d, x_star - r, x_star + r));
    const Limit L = extrapolate_to_zero(gaps, vals);
    prof.masses.push_back(std::max(0.0, std::abs(L.value - base.integral(d, x_star - r, x_star + r))));
    prof.errors.push_back(L.error);
  }
  return prof;
}

std::vector<AtomScanEntry> atom_time_scan(const Solution& sol, const std::vector<double>& t_grid,
                                          const IntervalSet& B, const MeasureOptions& opts) {
  std::vector<AtomScanEntry> out;
  for (double t : t_grid) {
    AtomScanEntry e;
    e.t = t;
    if (t < sol.t_max()) {
      const auto m = mu_plus_testfn(sol, t, B, opts);
      e.mu_plus = m.value;
      e.error = std::max(e.error, m.extrapolation_error);
    }
    if (t > sol.t_min()) {
      const auto m = mu_minus(sol, t, B, MeasureMethod::test_function, opts);
      e.mu_minus = m.value;
      e.error = std::max(e.error, m.extrapolation_error);
    }
    e.magnitude = std::abs(e.mu_plus) + std::abs(e.mu_minus);
    out.push_back(e);
  }
  return out;
}

}  // namespace chlab

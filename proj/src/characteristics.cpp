#include "chlab/characteristics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "chlab/field.hpp"
#include "chlab/ode.hpp"

namespace chlab {

std::string to_string(CharFlavor f) {
  switch (f) {
    case CharFlavor::generic: return "generic";
    case CharFlavor::leftmost: return "leftmost";
    case CharFlavor::rightmost: return "rightmost";
    case CharFlavor::left_rightmost: return "left-rightmost";
    case CharFlavor::right_leftmost: return "right-leftmost";
    case CharFlavor::leftmost_backward: return "leftmost-backward";
    case CharFlavor::rightmost_backward: return "rightmost-backward";
  }
  return "generic";
}

namespace {

SolutionPtr borrow(const Solution& sol) { return SolutionPtr(SolutionPtr{}, &sol); }

bool is_backward(double t0, std::span<const double> times) {
  bool back = false, fwd = false;
  for (double t : times) {
    back = back || t < t0;
    fwd = fwd || t > t0;
  }
  if (back && fwd) throw std::invalid_argument("characteristics: sample times on both sides of t0");
  return back;
}

CharPath integrate_forward(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                           const CharOptions& opts) {
  for (std::size_t k = 1; k < times.size(); ++k)
    if (times[k] < times[k - 1]) throw std::invalid_argument("integrate_char: sample times must be increasing");
  CharPath path;
  if (times.empty()) return path;
  const double t_last = times.back();

  double limit = t_last;
  for (double s : sol.singular_times()) {
    if (s > t0 && s < limit) limit = s;
  }

  const PeakonField f0(sol.at(t0));
  std::array<double, 4> y0{zeta0, f0.u(zeta0), f0.ux(zeta0), 0.0};

  auto rhs = [&sol](double t, std::span<const double> y, std::span<double> d) {
    const PeakonField f(sol.at(t));
    const double z = y[0];
    const double u = f.u(z);
    const auto [P, Px] = f.P_Px(z);
    d[0] = u;
    d[1] = -Px;
    d[2] = u * u - 0.5 * y[2] * y[2] - P;
    d[3] = y[2];
  };
  Dopri5::Options o;
  o.rtol = opts.tol;
  o.atol = opts.tol;
  o.max_step = opts.max_step;
  Dopri5 solver(rhs, o);
  solver.reset(t0, y0);

  auto push = [&](double t, std::span<const double> y) {
    path.t.push_back(t);
    path.zeta.push_back(y[0]);
    path.U.push_back(y[1]);
    path.v.push_back(y[2]);
    path.log_jacobian.push_back(y[3]);
  };

  std::size_t k = 0;
  while (k < times.size() && times[k] <= t0) push(times[k++], y0);
  std::array<double, 4> buf{};
  while (k < times.size() && solver.t() < limit) {
    const auto status = solver.step(limit);
    if (status != Dopri5::Status::ok) {
      path.truncated = true;
      path.t_truncated = solver.t();
      return path;
    }
    const auto& seg = solver.last_segment();
    while (k < times.size() && times[k] <= seg.t1()) {
      seg.eval(times[k], buf);
      push(times[k++], buf);
    }
  }
  if (k < times.size()) {
    path.truncated = true;
    path.t_truncated = solver.t();
  }
  return path;
}

// Lagrange cubic through four nodes, integrated over [a, b] with 3-point Gauss-Legendre.
double cubic_interval_integral(const double* x, const double* y, double a, double b) {
  static constexpr double g[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double xx = 0.5 * (a + b) + 0.5 * (b - a) * g[i];
    double val = 0.0;
    for (int j = 0; j < 4; ++j) {
      double l = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != j) l *= (xx - x[m]) / (x[j] - x[m]);
      val += y[j] * l;
    }
    s += w[i] * val;
  }
  return 0.5 * (b - a) * s;
}

}  // namespace

CharPath integrate_char_at(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                           const CharOptions& opts) {
  if (!is_backward(t0, times)) return integrate_forward(sol, t0, zeta0, times, opts);
  const TimeReversed rev(borrow(sol), t0);
  std::vector<double> tau(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) tau[k] = t0 - times[k];
  CharPath p = integrate_forward(rev, 0.0, zeta0, tau, opts);
  for (auto& t : p.t) t = t0 - t;
  for (auto& u : p.U) u = -u;
  for (auto& v : p.v) v = -v;
  if (p.truncated) p.t_truncated = t0 - p.t_truncated;
  return p;
}

CharPath integrate_char(const Solution& sol, double t0, double zeta0, double t1, const CharOptions& opts) {
  const std::size_t n = std::max<std::size_t>(opts.samples, 2);
  std::vector<double> times(n);
  for (std::size_t k = 0; k < n; ++k) times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
  times.back() = t1;
  return integrate_char_at(sol, t0, zeta0, times, opts);
}

double riccati_residual(const CharPath& path, const Solution& sol) {
  const std::size_t n = path.size();
  if (n < 2) return 0.0;
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const PeakonField f(sol.at(path.t[k]));
    const double P = f.P_Px(path.zeta[k]).first;
    g[k] = path.U[k] * path.U[k] - 0.5 * path.v[k] * path.v[k] - P;
  }
  double integral = 0.0, worst = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    double step;
    if (n < 4) {
      step = 0.5 * (g[k] + g[k + 1]) * (path.t[k + 1] - path.t[k]);
    } else {
      const std::size_t s = std::min(k == 0 ? 0 : k - 1, n - 4);
      step = cubic_interval_integral(&path.t[s], &g[s], path.t[k], path.t[k + 1]);
    }
    integral += step;
    worst = std::max(worst, std::abs(path.v[k + 1] - path.v[0] - integral));
  }
  return worst;
}

double cov_jacobian(const CharPath& path) {
  if (path.truncated) throw std::domain_error("cov_jacobian: path truncated at breaking");
  if (path.log_jacobian.empty()) throw std::domain_error("cov_jacobian: empty path");
  return std::exp(path.log_jacobian.back());
}

// ---------------------------------------------------------------------------

std::vector<double> default_delta_seq() {
  std::vector<double> d;
  for (int k = 0; k <= 8; ++k) d.push_back(1e-2 * std::ldexp(1.0, -k));
  return d;
}

ExtremalChar extremal_char_at(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                              Side side, const ExtremalOptions& opts) {
  const std::vector<double> deltas = opts.delta_seq.empty() ? default_delta_seq() : opts.delta_seq;
  if (deltas.size() < 2) throw std::invalid_argument("extremal_char: need at least two offsets");
  for (std::size_t k = 1; k < deltas.size(); ++k)
    if (!(deltas[k] < deltas[k - 1]) || !(deltas[k] > 0.0))
      throw std::invalid_argument("extremal_char: offsets must decrease strictly to 0");

  const double sign = side == Side::right ? 1.0 : -1.0;
  const bool backward = is_backward(t0, times);
  ExtremalChar out;
  out.deltas = deltas;
  std::vector<CharPath> members;
  members.reserve(deltas.size());
  std::size_t common = times.size();
  for (double d : deltas) {
    members.push_back(integrate_char_at(sol, t0, zeta0 + sign * d, times, opts.char_opts));
    common = std::min(common, members.back().size());
  }

  CharPath& path = out.path;
  const CharPath& closest = members.back();
  path.flavor = side == Side::right ? (backward ? CharFlavor::rightmost_backward : CharFlavor::rightmost)
                                    : (backward ? CharFlavor::leftmost_backward : CharFlavor::leftmost);
  for (const auto& m : members) {
    if (m.truncated) {
      path.truncated = true;
      path.t_truncated = m.t_truncated;
    }
  }
  const std::size_t nd = deltas.size();
  for (const auto& m : members) out.family.emplace_back(m.zeta.begin(), m.zeta.begin() + static_cast<std::ptrdiff_t>(common));

  auto richardson = [&](std::size_t a, std::size_t b, std::size_t k) {
    const double da = deltas[a], db = deltas[b];
    return (da * out.family[b][k] - db * out.family[a][k]) / (da - db);
  };

  for (std::size_t k = 0; k < common; ++k) {
    // the flow preserves order, so the family moves monotonically towards the limit
    for (std::size_t m = 1; m < nd; ++m) {
      const double step = sign * (out.family[m - 1][k] - out.family[m][k]);
      if (step < -opts.monotone_tol) out.monotone = false;
    }
    const double lim = richardson(nd - 2, nd - 1, k);
    // never extrapolate past the starting point's side
    const double z_close = out.family[nd - 1][k];
    const double limit = side == Side::right ? std::min(lim, z_close) : std::max(lim, z_close);
    path.t.push_back(closest.t[k]);
    path.zeta.push_back(limit);
    path.U.push_back(closest.U[k]);
    path.v.push_back(closest.v[k]);
    path.log_jacobian.push_back(closest.log_jacobian[k]);
    out.extrapolation_error = std::max(out.extrapolation_error, std::abs(limit - z_close));
    if (nd >= 3) out.richardson_spread = std::max(out.richardson_spread, std::abs(lim - richardson(nd - 3, nd - 2, k)));
  }
  if (!out.monotone) {
    std::ostringstream os;
    os << "extremal_char: delta family from zeta0=" << zeta0 << " at t0=" << t0
       << " is not monotone; uniqueness heuristic failed";
    throw NonMonotoneFamily(os.str());
  }
  return out;
}

ExtremalChar extremal_char(const Solution& sol, double t0, double zeta0, double t1, Side side,
                           const ExtremalOptions& opts) {
  const std::size_t n = std::max<std::size_t>(opts.char_opts.samples, 2);
  std::vector<double> times(n);
  for (std::size_t k = 0; k < n; ++k) times[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(n - 1);
  times.back() = t1;
  return extremal_char_at(sol, t0, zeta0, times, side, opts);
}

// ---------------------------------------------------------------------------

namespace {

double parse_number(const std::string& s) {
  std::size_t used = 0;
  const std::string trimmed = [&] {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }();
  double v = 0.0;
  try {
    v = std::stod(trimmed, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("IntervalSet: bad number '" + s + "'");
  }
  if (used != trimmed.size()) throw std::invalid_argument("IntervalSet: bad number '" + s + "'");
  return v;
}

}  // namespace

IntervalSet IntervalSet::parse(const std::string& text) {
  IntervalSet out;
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == 'u' || text[pos] == 'U')) ++pos;
  };
  skip();
  while (pos < text.size()) {
    const char open = text[pos];
    const char close_want = open == '{' ? '}' : 0;
    std::size_t end = text.find_first_of(open == '{' ? "}" : "])", pos + 1);
    if (end == std::string::npos || (open != '[' && open != '(' && open != '{'))
      throw std::invalid_argument("IntervalSet: cannot parse '" + text + "'");
    const std::string body = text.substr(pos + 1, end - pos - 1);
    const char close = text[end];
    if (close_want) {
      out.pieces.push_back(IntervalPiece::point(parse_number(body)));
    } else {
      const auto comma = body.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("IntervalSet: missing ',' in '" + text + "'");
      const double a = parse_number(body.substr(0, comma));
      const double b = parse_number(body.substr(comma + 1));
      if (b < a) throw std::invalid_argument("IntervalSet: interval with b < a in '" + text + "'");
      out.pieces.push_back({a, b, open == '[', close == ']'});
    }
    pos = end + 1;
    skip();
  }
  if (out.pieces.empty()) throw std::invalid_argument("IntervalSet: empty set");
  return out;
}

std::string IntervalSet::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    const auto& p = pieces[k];
    if (k) os << "u";
    if (p.is_point() && p.lo_closed && p.hi_closed) {
      os << "{" << p.lo << "}";
    } else {
      os << (p.lo_closed ? "[" : "(") << p.lo << "," << p.hi << (p.hi_closed ? "]" : ")");
    }
  }
  return os.str();
}

IntervalSet IntervalSet::normalized() const {
  IntervalSet s = *this;
  std::sort(s.pieces.begin(), s.pieces.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const auto& p : s.pieces) {
    if (!out.pieces.empty()) {
      auto& last = out.pieces.back();
      const bool touch = p.lo < last.hi || (p.lo == last.hi && (p.lo_closed || last.hi_closed));
      if (touch) {
        if (p.hi > last.hi) {
          last.hi = p.hi;
          last.hi_closed = p.hi_closed;
        } else if (p.hi == last.hi) {
          last.hi_closed = last.hi_closed || p.hi_closed;
        }
        continue;
      }
    }
    out.pieces.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct EndpointPaths {
  std::vector<double> value;
  double error = 0.0;
  bool truncated = false;
};

EndpointPaths extremal_values(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                              Side side, const ExtremalOptions& opts) {
  ExtremalChar e = extremal_char_at(sol, t0, zeta0, times, side, opts);
  return {e.path.zeta, e.extrapolation_error, e.path.truncated};
}

// Left-rightmost (side = left) or right-leftmost (side = right) characteristic: follow the
// rightmost (resp. leftmost) characteristic up to t0 + eta, then branch off to the other side.
EndpointPaths branched_values(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                              Side side, const PushforwardOptions& opts) {
  std::vector<double> etas = opts.eta_seq;
  if (etas.empty())
    for (int k = 0; k <= 4; ++k) etas.push_back(1e-3 * std::ldexp(1.0, -k));
  const Side first = side == Side::left ? Side::right : Side::left;
  const EndpointPaths base = extremal_values(sol, t0, zeta0, times, first, opts.extremal);
  EndpointPaths out = base;
  for (double eta : etas) {
    const double tb = t0 + eta;
    const std::array<double, 1> tb_arr{tb};
    const EndpointPaths at_b = extremal_values(sol, t0, zeta0, tb_arr, first, opts.extremal);
    if (at_b.value.empty()) continue;
    std::vector<double> later;
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < times.size(); ++k)
      if (times[k] > tb) {
        later.push_back(times[k]);
        idx.push_back(k);
      }
    if (later.empty()) continue;
    const EndpointPaths br = extremal_values(sol, tb, at_b.value[0], later, side, opts.extremal);
    for (std::size_t m = 0; m < br.value.size(); ++m) {
      const std::size_t k = idx[m];
      if (k >= out.value.size()) continue;
      out.value[k] = side == Side::left ? std::min(out.value[k], br.value[m]) : std::max(out.value[k], br.value[m]);
    }
    out.truncated = out.truncated || br.truncated;
    out.error = std::max(out.error, br.error);
  }
  return out;
}

std::vector<Pushforward> forward_pushforward(const Solution& sol, double t0, const IntervalSet& B,
                                             std::span<const double> times, const PushforwardOptions& opts) {
  const IntervalSet src = B.normalized();
  std::vector<Pushforward> out(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    out[k].t0 = t0;
    out[k].t = times[k];
    out[k].source = B;
  }
  for (const auto& piece : src.pieces) {
    const EndpointPaths lo = extremal_values(sol, t0, piece.lo, times, piece.lo_closed ? Side::left : Side::right,
                                             opts.extremal);
    const EndpointPaths hi = extremal_values(sol, t0, piece.hi, times, piece.hi_closed ? Side::right : Side::left,
                                             opts.extremal);
    std::optional<EndpointPaths> outer_lo, outer_hi;
    if (opts.outer_for_open && !piece.lo_closed) outer_lo = branched_values(sol, t0, piece.lo, times, Side::left, opts);
    if (opts.outer_for_open && !piece.hi_closed) outer_hi = branched_values(sol, t0, piece.hi, times, Side::right, opts);
    for (std::size_t k = 0; k < times.size(); ++k) {
      Pushforward& pf = out[k];
      if (k >= lo.value.size() || k >= hi.value.size()) {
        pf.truncated = true;
        continue;
      }
      PushforwardPiece pp{lo.value[k], hi.value[k], std::nullopt, std::nullopt};
      if (pp.hi < pp.lo) std::swap(pp.lo, pp.hi);
      if (outer_lo && k < outer_lo->value.size()) pp.outer_lo = std::min(outer_lo->value[k], pp.lo);
      if (outer_hi && k < outer_hi->value.size()) pp.outer_hi = std::max(outer_hi->value[k], pp.hi);
      pf.pieces.push_back(pp);
      pf.extrapolation_error = std::max({pf.extrapolation_error, lo.error, hi.error});
    }
    if (lo.truncated || hi.truncated)
      for (auto& pf : out) pf.truncated = true;
  }
  // merge overlapping images
  for (auto& pf : out) {
    std::sort(pf.pieces.begin(), pf.pieces.end(), [](auto& a, auto& b) { return a.lo < b.lo; });
    std::vector<PushforwardPiece> merged;
    for (const auto& p : pf.pieces) {
      if (!merged.empty() && p.lo <= merged.back().hi) {
        auto& m = merged.back();
        if (p.hi > m.hi) {
          m.hi = p.hi;
          m.outer_hi = p.outer_hi;
        }
        continue;
      }
      merged.push_back(p);
    }
    pf.pieces = std::move(merged);
  }
  return out;
}

}  // namespace

std::vector<Pushforward> thick_pushforward_at(const Solution& sol, double t0, const IntervalSet& B,
                                              std::span<const double> times, const PushforwardOptions& opts) {
  if (!is_backward(t0, times)) return forward_pushforward(sol, t0, B, times, opts);
  const TimeReversed rev(borrow(sol), t0);
  std::vector<double> tau(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) tau[k] = t0 - times[k];
  auto out = forward_pushforward(rev, 0.0, B, tau, opts);
  for (auto& pf : out) {
    pf.t0 = t0;
    pf.t = t0 - pf.t;
  }
  return out;
}

Pushforward thick_pushforward(const Solution& sol, double t0, const IntervalSet& B, double t,
                              const PushforwardOptions& opts) {
  const std::array<double, 1> times{t};
  return thick_pushforward_at(sol, t0, B, times, opts).front();
}

}  // namespace chlab

#include "chlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chlab {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// c e^{rate (y - anchor)} on [x1, x2], exponent <= 0 there, times the linear weight
// w(x1) = w1 -> w(x2) = w2. Infinite ends only with a constant weight.
double term_integral(double c, double rate, double anchor, double x1, double x2, double w1,
                     double w2) {
  if (c == 0.0 || !(x2 > x1)) return 0.0;
  if (rate == 0.0) return c * (x2 - x1) * 0.5 * (w1 + w2);
  const double L = x2 - x1;
  double base, wa, wb;
  if (rate > 0.0) {
    base = c * std::exp(rate * (x2 - anchor));
    wa = w2;
    wb = w1;
  } else {
    base = c * std::exp(rate * (x1 - anchor));
    wa = w1;
    wb = w2;
  }
  const double mu = std::abs(rate);
  const double x = mu * L;
  const double j0 = -std::expm1(-x) / mu;
  if (wa == wb) return base * wa * j0;
  // int_0^L z e^{-mu z} dz = (1 - e^{-x}(1 + x)) / mu^2
  double j1;
  if (x < 1e-3) j1 = x * x * (0.5 - x * (1.0 / 3.0 - x * (0.125 - x / 30.0)));
  else j1 = -std::expm1(-x) - x * std::exp(-x);
  j1 /= mu * mu;
  return base * (wa * j0 + (wb - wa) / L * j1);
}

// c e^{E(y)} on [y1, y2] where E is linear with slope m != 0 and e^{E} <= 1 on the interval.
template <class Exponent>
double exp_integral(double c, double m, double y1, double y2, Exponent E) {
  if (c == 0.0 || !(y2 > y1)) return 0.0;
  if (m > 0.0) return c * std::exp(E(y2)) * (-std::expm1(-m * (y2 - y1))) / m;
  return c * std::exp(E(y1)) * (-std::expm1(m * (y2 - y1))) / (-m);
}

struct Term {
  double c, rate, anchor;
};

}  // namespace

double Hat::operator()(double x) const {
  if (x <= lo_outer || x >= hi_outer) return (x >= lo_inner && x <= hi_inner) ? 1.0 : 0.0;
  if (x < lo_inner) return (x - lo_outer) / (lo_inner - lo_outer);
  if (x > hi_inner) return (hi_outer - x) / (hi_outer - hi_inner);
  return 1.0;
}

PeakonField::PeakonField(const PeakonState& state)
    : q_(state.q().begin(), state.q().end()), p_(state.p().begin(), state.p().end()) {
  const std::size_t n = q_.size();
  regions_.resize(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    regions_[j].l = j == 0 ? -kInf : q_[j - 1];
    regions_[j].r = j == n ? kInf : q_[j];
  }
  regions_[n].A = 0.0;
  for (std::size_t j = n; j-- > 0;)
    regions_[j].A = p_[j] + (j + 1 < n ? std::exp(q_[j] - q_[j + 1]) * regions_[j + 1].A : 0.0);
  regions_[0].B = 0.0;
  for (std::size_t j = 1; j <= n; ++j)
    regions_[j].B = p_[j - 1] + (j >= 2 ? std::exp(q_[j - 2] - q_[j - 1]) * regions_[j - 1].B : 0.0);
}

const PeakonField::Region& PeakonField::region_of(double x) const {
  // first region whose right end is >= x
  auto it = std::lower_bound(q_.begin(), q_.end(), x);
  return regions_[static_cast<std::size_t>(it - q_.begin())];
}

double PeakonField::u(double x) const {
  const Region& R = region_of(x);
  return R.A * std::exp(x - R.r) + R.B * std::exp(R.l - x);
}

double PeakonField::ux(double x) const {
  if (std::binary_search(q_.begin(), q_.end(), x)) {
    double s = 0.0;
    for (std::size_t i = 0; i < q_.size(); ++i)
      s -= p_[i] * sgn(x - q_[i]) * std::exp(-std::abs(x - q_[i]));
    return s;
  }
  const Region& R = region_of(x);
  return R.A * std::exp(x - R.r) - R.B * std::exp(R.l - x);
}

std::pair<double, double> PeakonField::P_Px(double x) const {
  double left = 0.0, right = 0.0;  // int_{y<x} e^{y-x} f, int_{y>x} e^{x-y} f
  for (const Region& R : regions_) {
    const double C = (std::isfinite(R.l) && std::isfinite(R.r)) ? std::exp(R.l - R.r) : 0.0;
    const Term terms[3] = {{1.5 * R.A * R.A, 2.0, R.r}, {R.A * R.B * C, 0.0, 0.0}, {1.5 * R.B * R.B, -2.0, R.l}};
    for (const Term& tm : terms) {
      if (tm.c == 0.0) continue;
      const double k = tm.rate, a = tm.anchor;
      auto expo = [k, a](double y) { return k == 0.0 ? 0.0 : k * (y - a); };
      // y <= x
      const double y1 = R.l, y2 = std::min(R.r, x);
      left += exp_integral(tm.c, k + 1.0, y1, y2, [&](double y) { return expo(y) + (y - x); });
      // y >= x
      const double z1 = std::max(R.l, x), z2 = R.r;
      right += exp_integral(tm.c, k - 1.0, z1, z2, [&](double y) { return expo(y) - (y - x); });
    }
  }
  return {0.5 * (left + right), 0.5 * (right - left)};
}

FieldPoint PeakonField::at(double x) const {
  auto [P, Px] = P_Px(x);
  return {u(x), ux(x), P, Px};
}

double PeakonField::integral_piece(const Region& R, Density d, double x1, double x2, double w1,
                                   double w2) const {
  // [x1, x2] lies inside R
  const double C = (std::isfinite(R.l) && std::isfinite(R.r)) ? std::exp(R.l - R.r) : 0.0;
  const double AA = R.A * R.A, BB = R.B * R.B, AB = R.A * R.B * C;
  double ca, cc, cb;
  switch (d) {
    case Density::energy: ca = 2 * AA, cc = 0.0, cb = 2 * BB; break;
    case Density::u_sq: ca = AA, cc = 2 * AB, cb = BB; break;
    case Density::pressure_source: ca = 1.5 * AA, cc = AB, cb = 1.5 * BB; break;
    default: ca = AA, cc = -2 * AB, cb = BB; break;
  }
  return term_integral(ca, 2.0, R.r, x1, x2, w1, w2) + term_integral(cc, 0.0, 0.0, x1, x2, w1, w2) +
         term_integral(cb, -2.0, R.l, x1, x2, w1, w2);
}

double PeakonField::integral(Density d, double a, double b) const {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  for (const Region& R : regions_) {
    const double x1 = std::max(a, R.l), x2 = std::min(b, R.r);
    if (!(x2 > x1)) continue;
    if (d != Density::ux_plus_sq && d != Density::ux_minus_sq) {
      total += integral_piece(R, d, x1, x2, 1.0, 1.0);
      continue;
    }
    const double want = d == Density::ux_plus_sq ? 1.0 : -1.0;
    // u_x = A e^{x-r} - B e^{l-x} changes sign at most once in the region
    double split = kInf;
    double sign_left, sign_right;
    if (R.A * R.B > 0.0 && std::isfinite(R.l) && std::isfinite(R.r)) {
      split = 0.5 * (R.l + R.r + std::log(R.B / R.A));
      sign_left = R.A > 0.0 ? -1.0 : 1.0;
      sign_right = -sign_left;
    } else {
      sign_left = sign_right = R.A != 0.0 ? sgn(R.A) : -sgn(R.B);
    }
    if (split > x1 && split < x2) {
      if (sign_left == want) total += integral_piece(R, Density::ux_sq, x1, split, 1.0, 1.0);
      if (sign_right == want) total += integral_piece(R, Density::ux_sq, split, x2, 1.0, 1.0);
    } else {
      const double s = split <= x1 ? sign_right : sign_left;
      if (s == want) total += integral_piece(R, Density::ux_sq, x1, x2, 1.0, 1.0);
    }
  }
  return total;
}

double PeakonField::weighted_integral(Density d, const Hat& h) const {
  if (!(h.lo_outer <= h.lo_inner && h.lo_inner <= h.hi_inner && h.hi_inner <= h.hi_outer))
    throw std::invalid_argument("Hat: breakpoints out of order");
  double total = integral(d, h.lo_inner, h.hi_inner);
  // ramps: split at region boundaries and sign changes via the unit integral machinery
  auto ramp = [&](double x1, double x2, double w1, double w2) {
    if (!(x2 > x1)) return 0.0;
    double acc = 0.0;
    std::vector<double> cuts{x1};
    for (double q : q_)
      if (q > x1 && q < x2) cuts.push_back(q);
    for (const Region& R : regions_) {
      if (R.A * R.B > 0.0 && std::isfinite(R.l) && std::isfinite(R.r)) {
        const double s = 0.5 * (R.l + R.r + std::log(R.B / R.A));
        if (s > x1 && s < x2 && s > R.l && s < R.r) cuts.push_back(s);
      }
    }
    cuts.push_back(x2);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double y1 = cuts[k], y2 = cuts[k + 1];
      if (!(y2 > y1)) continue;
      const double wy1 = w1 + (w2 - w1) * (y1 - x1) / (x2 - x1);
      const double wy2 = w1 + (w2 - w1) * (y2 - x1) / (x2 - x1);
      Density dd = d;
      if (d == Density::ux_plus_sq || d == Density::ux_minus_sq) {
        const double s = ux(0.5 * (y1 + y2));
        const bool keep = d == Density::ux_plus_sq ? s > 0.0 : s < 0.0;
        if (!keep) continue;
        dd = Density::ux_sq;
      }
      acc += integral_piece(region_of(0.5 * (y1 + y2)), dd, y1, y2, wy1, wy2);
    }
    return acc;
  };
  total += ramp(h.lo_outer, h.lo_inner, 0.0, 1.0);
  total += ramp(h.hi_inner, h.hi_outer, 1.0, 0.0);
  return total;
}

double PeakonField::total_energy() const { return integral(Density::energy, -kInf, kInf); }

double PeakonField::sup_slope() const {
  double s = 0.0;
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const Region& L = regions_[k];
    const Region& R = regions_[k + 1];
    s = std::max(s, L.A - L.B * std::exp(L.l - q_[k]));
    s = std::max(s, R.A * std::exp(q_[k] - R.r) - R.B);
  }
  return s;
}

double PeakonField::inf_slope() const {
  double s = 0.0;
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const Region& L = regions_[k];
    const Region& R = regions_[k + 1];
    s = std::min(s, L.A - L.B * std::exp(L.l - q_[k]));
    s = std::min(s, R.A * std::exp(q_[k] - R.r) - R.B);
  }
  return s;
}

// ---------------------------------------------------------------------------

double eval_u(const PeakonState& state, double x) { return PeakonField(state).u(x); }
double eval_ux(const PeakonState& state, double x) { return PeakonField(state).ux(x); }
std::pair<double, double> eval_P_Px(const PeakonState& state, double x) {
  return PeakonField(state).P_Px(x);
}

EnergyReport energy(const PeakonState& state, double a, double b) {
  if (b < a) throw std::invalid_argument("energy: interval with b < a");
  const PeakonField f(state);
  EnergyReport r;
  r.total = f.total_energy();
  r.on_interval = f.integral(Density::energy, a, b);
  r.neg_part = f.integral(Density::ux_minus_sq, a, b);
  r.pos_part = f.integral(Density::ux_plus_sq, a, b);
  return r;
}

double total_energy_closed_form(const PeakonState& state) {
  double s = 0.0;
  const auto q = state.q();
  const auto p = state.p();
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) s += p[i] * p[j] * std::exp(-std::abs(q[i] - q[j]));
  return 2.0 * s;
}

double max_abs_slope(const PeakonState& state) {
  const PeakonField f(state);
  return std::max(f.sup_slope(), -f.inf_slope());
}

double min_slope(const PeakonState& state) { return PeakonField(state).inf_slope(); }

}  // namespace chlab

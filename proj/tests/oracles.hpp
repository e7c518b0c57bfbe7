// Independent reference computations used only by the tests: a direct transcription of the
// exact peakon-antipeakon formulas, naive pointwise sums and adaptive quadrature.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chlab/peakon.hpp"

namespace oracle {

struct Pair {
  double p0, q0, H0, T;
  explicit Pair(double p0_, double q0_) : p0(p0_), q0(q0_) {
    H0 = p0 * std::sqrt(1.0 - std::exp(q0));
    T = 2.0 / H0 * std::atanh(H0 / p0);
  }
  double p(double t) const { return H0 / std::tanh(H0 * (T - t) / 2.0); }
  double q(double t) const {
    const double h = std::sinh(H0 * (T - t) / 4.0);
    return -2.0 * std::log1p(2.0 * h * h);  // log cosh without cancellation near T
  }
  chlab::PeakonState state(double t) const {
    return chlab::PeakonState(t, {q(t) / 2.0, -q(t) / 2.0}, {p(t) / 2.0, -p(t) / 2.0});
  }
};

inline Pair R0() { return Pair(1.0, std::log(0.75)); }

inline double u(const chlab::PeakonState& s, double x) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) v += s.p()[i] * std::exp(-std::abs(x - s.q()[i]));
  return v;
}

inline double ux(const chlab::PeakonState& s, double x) {
  double v = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = x - s.q()[i];
    v -= s.p()[i] * ((d > 0) - (d < 0)) * std::exp(-std::abs(d));
  }
  return v;
}

/// int_a^b f with breakpoints (kinks) honoured; Gauss-Kronrod 61 per smooth piece.
template <class F>
double quad(F f, double a, double b, std::vector<double> breaks = {}) {
  using boost::math::quadrature::gauss_kronrod;
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double lo = std::max(a, breaks[k]), hi = std::min(b, breaks[k + 1]);
    if (hi > lo) s += gauss_kronrod<double, 61>::integrate(f, lo, hi, 15, 1e-12);
  }
  return s;
}

inline std::vector<double> kinks(const chlab::PeakonState& s) { return {s.q().begin(), s.q().end()}; }

inline double lo_end(const chlab::PeakonState& s) { return (s.empty() ? 0.0 : s.q().front()) - 40.0; }
inline double hi_end(const chlab::PeakonState& s) { return (s.empty() ? 0.0 : s.q().back()) + 40.0; }

/// P(x) and P_x(x) by quadrature of the convolution.
inline std::pair<double, double> P_Px(const chlab::PeakonState& s, double x) {
  auto src = [&](double y) {
    const double a = u(s, y), b = ux(s, y);
    return a * a + 0.5 * b * b;
  };
  auto br = kinks(s);
  br.push_back(x);
  const double a = std::min(lo_end(s), x - 40.0), b = std::max(hi_end(s), x + 40.0);
  const double P = quad([&](double y) { return 0.5 * std::exp(-std::abs(x - y)) * src(y); }, a, b, br);
  const double Px = quad(
      [&](double y) {
        const double d = x - y;
        return -0.5 * ((d > 0) - (d < 0)) * std::exp(-std::abs(d)) * src(y);
      },
      a, b, br);
  return {P, Px};
}

inline double energy(const chlab::PeakonState& s, double a, double b) {
  return quad(
      [&](double x) {
        const double v = u(s, x), w = ux(s, x);
        return v * v + w * w;
      },
      a, b, kinks(s));
}

inline double energy_total(const chlab::PeakonState& s) { return energy(s, lo_end(s), hi_end(s)); }

/// int_a^b (u_x^+)^2 (plus) or (u_x^-)^2 (minus).
inline double slope_part(const chlab::PeakonState& s, double a, double b, bool plus) {
  return quad(
      [&](double x) {
        const double w = ux(s, x);
        const double part = plus ? std::max(w, 0.0) : std::max(-w, 0.0);
        return part * part;
      },
      a, b, kinks(s));
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// N <= 5 peakons with |p| <= 2 and |q| <= 5, positions at least 0.05 apart.
inline chlab::PeakonState random_state(std::mt19937_64& rng) {
  const int n = 1 + static_cast<int>(rng() % 5);
  std::vector<double> q, p;
  while (static_cast<int>(q.size()) < n) {
    const double c = uniform(rng, -5.0, 5.0);
    bool ok = true;
    for (double e : q) ok = ok && std::abs(e - c) > 0.05;
    if (ok) q.push_back(c);
  }
  std::sort(q.begin(), q.end());
  for (int i = 0; i < n; ++i) p.push_back(uniform(rng, -2.0, 2.0));
  return chlab::PeakonState(0.0, q, p);
}

}  // namespace oracle

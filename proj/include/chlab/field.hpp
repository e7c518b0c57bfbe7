#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "chlab/peakon.hpp"

namespace chlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pointwise field values. ux uses sgn(0) = 0 at peaks.
struct FieldPoint {
  double u = 0.0;
  double ux = 0.0;
  double P = 0.0;
  double Px = 0.0;
};

/// Integrals over an interval: total is over the whole line, the others over the interval.
struct EnergyReport {
  double total = 0.0;       // int_R (u^2 + u_x^2)
  double on_interval = 0.0;  // int_[a,b] (u^2 + u_x^2)
  double neg_part = 0.0;     // int_[a,b] (u_x^-)^2
  double pos_part = 0.0;     // int_[a,b] (u_x^+)^2
};

/// Densities that can be integrated exactly over intervals.
enum class Density {
  energy,           // u^2 + u_x^2
  u_sq,             // u^2
  ux_sq,            // u_x^2
  ux_plus_sq,       // (max(u_x, 0))^2
  ux_minus_sq,      // (max(-u_x, 0))^2
  pressure_source,  // u^2 + u_x^2 / 2
};

/// Continuous piecewise-linear weight: 0 outside (lo_outer, hi_outer), 1 on
/// [lo_inner, hi_inner], linear ramps in between.
struct Hat {
  double lo_outer, lo_inner, hi_inner, hi_outer;

  /// Plateau [alpha - eps, beta + eps], support [alpha - 2 eps, beta + 2 eps].
  static Hat around(double alpha, double beta, double eps) {
    return {alpha - 2 * eps, alpha - eps, beta + eps, beta + 2 * eps};
  }
  /// Plateau [alpha + 2 eps, beta - 2 eps], support [alpha + eps, beta - eps].
  static Hat inside(double alpha, double beta, double eps) {
    return {alpha + eps, alpha + 2 * eps, beta - 2 * eps, beta - eps};
  }
  double operator()(double x) const;
};

/// Multipeakon field u = sum_i p_i e^{-|x - q_i|} with exact, piecewise-exponential
/// evaluation of u, u_x, P = (1/2) e^{-|x|} * (u^2 + u_x^2/2), P_x and interval integrals.
///
/// Between consecutive peaks u = A e^{x - r} + B e^{l - x} on [l, r]; both exponents are
/// nonpositive inside the region, so nothing overflows however far apart the peaks sit.
class PeakonField {
 public:
  explicit PeakonField(const PeakonState& state);

  double u(double x) const;
  double ux(double x) const;
  std::pair<double, double> P_Px(double x) const;
  FieldPoint at(double x) const;

  /// int_a^b density dx, a may be -inf and b +inf.
  double integral(Density d, double a, double b) const;
  /// int hat(x) density(x) dx.
  double weighted_integral(Density d, const Hat& hat) const;

  /// int_R (u^2 + u_x^2) = 2 sum_{i,j} p_i p_j e^{-|q_i - q_j|}.
  double total_energy() const;

  /// Extremes of u_x including one-sided limits at the peaks (u_x -> 0 at infinity).
  double sup_slope() const;
  double inf_slope() const;

  std::size_t size() const { return q_.size(); }

 private:
  struct Region {
    double l, r;  // l = -inf for the leftmost, r = +inf for the rightmost region
    double A, B;
  };
  const Region& region_of(double x) const;
  double integral_piece(const Region& R, Density d, double x1, double x2, double w1, double w2) const;

  std::vector<double> q_, p_;
  std::vector<Region> regions_;
};

double eval_u(const PeakonState& state, double x);
double eval_ux(const PeakonState& state, double x);
std::pair<double, double> eval_P_Px(const PeakonState& state, double x);
/// Energy integrals over [a, b]; pass (-kInf, kInf) for the whole line.
EnergyReport energy(const PeakonState& state, double a = -kInf, double b = kInf);

/// 2 sum_{i,j} p_i p_j e^{-|q_i - q_j|}, straight from the peakon parameters.
double total_energy_closed_form(const PeakonState& state);
/// sup_x |u_x| over both one-sided limits at the peaks.
double max_abs_slope(const PeakonState& state);
/// inf_x u_x (most negative slope, one-sided limits included).
double min_slope(const PeakonState& state);

}  // namespace chlab

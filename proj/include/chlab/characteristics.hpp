#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chlab/solution.hpp"

namespace chlab {

enum class CharFlavor {
  generic,
  leftmost,
  rightmost,
  left_rightmost,
  right_leftmost,
  leftmost_backward,
  rightmost_backward,
};

std::string to_string(CharFlavor f);

/// A characteristic zeta(t) sampled on an increasing (forward) or decreasing (backward)
/// time grid, with U = u(t, zeta), v = u_x(t, zeta) from the slope equation and
/// log_jacobian = int_{t0}^{t} v ds.
struct CharPath {
  std::vector<double> t;
  std::vector<double> zeta;
  std::vector<double> U;
  std::vector<double> v;
  std::vector<double> log_jacobian;
  CharFlavor flavor = CharFlavor::generic;
  bool truncated = false;
  double t_truncated = 0.0;

  std::size_t size() const { return t.size(); }
  double t0() const { return t.front(); }
  double zeta_end() const { return zeta.back(); }
};

struct CharOptions {
  double tol = 1e-11;
  double max_step = 0.05;
  std::size_t samples = 1001;  // uniform grid used by integrate_char
};

/// zeta' = u(t, zeta), U' = -P_x(t, zeta), v' = u^2 - v^2/2 - P along zeta, v(t0) = u_x(t0, zeta0).
/// Integration never crosses a singular time of the solution strictly inside (t0, t1):
/// the path is cut there and flagged as truncated.
CharPath integrate_char(const Solution& sol, double t0, double zeta0, double t1, const CharOptions& opts = {});

/// Same, sampled at the given times (monotone, all on the t1 side of t0; t0 itself allowed).
CharPath integrate_char_at(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                           const CharOptions& opts = {});

/// sup over samples of |v(t) - v(t0) - int_{t0}^{t} (U^2 - v^2/2 - P) ds| with P evaluated
/// along the path and the integral taken by composite quadrature on the path samples.
double riccati_residual(const CharPath& path, const Solution& sol);

/// e^{int v ds} at the path end.
double cov_jacobian(const CharPath& path);

enum class Side { left, right };

struct ExtremalOptions {
  std::vector<double> delta_seq;  // strictly decreasing offsets; empty = 1e-2 * 2^-k, k = 0..8
  double monotone_tol = 1e-9;
  CharOptions char_opts;
};

std::vector<double> default_delta_seq();

struct ExtremalChar {
  CharPath path;                         // extrapolated limit (zeta only), U/v from the closest member
  std::vector<std::vector<double>> family;  // zeta(t) of every delta member, indexed [delta][sample]
  std::vector<double> deltas;
  double extrapolation_error = 0.0;      // max over samples of |limit - closest member|
  double richardson_spread = 0.0;        // max over samples of the spread of the last two Richardson values
  bool monotone = true;
};

class NonMonotoneFamily : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Leftmost (side = left) or rightmost (side = right) characteristic from (t0, zeta0),
/// obtained as the delta -> 0 limit of the characteristics started at zeta0 -/+ delta.
/// Forward if every sample time is >= t0, backward otherwise.
/// Throws NonMonotoneFamily when the family violates the order of the flow beyond monotone_tol.
ExtremalChar extremal_char_at(const Solution& sol, double t0, double zeta0, std::span<const double> times,
                              Side side, const ExtremalOptions& opts = {});
ExtremalChar extremal_char(const Solution& sol, double t0, double zeta0, double t1, Side side,
                           const ExtremalOptions& opts = {});

/// Finite union of intervals and points. Each piece is [lo, hi] with open/closed ends.
struct IntervalPiece {
  double lo, hi;
  bool lo_closed = true, hi_closed = true;

  static IntervalPiece closed(double a, double b) { return {a, b, true, true}; }
  static IntervalPiece open(double a, double b) { return {a, b, false, false}; }
  static IntervalPiece point(double a) { return {a, a, true, true}; }
  bool is_point() const { return lo == hi; }
  bool is_open() const { return !lo_closed && !hi_closed; }
};

struct IntervalSet {
  std::vector<IntervalPiece> pieces;

  IntervalSet() = default;
  IntervalSet(std::initializer_list<IntervalPiece> p) : pieces(p) {}
  /// Parses "[a,b]", "(a,b)", "{a}", "[a,b)" and unions joined by 'u' or 'U'.
  static IntervalSet parse(const std::string& text);
  std::string to_string() const;
  /// Sorted, overlapping pieces merged.
  IntervalSet normalized() const;
};

struct PushforwardPiece {
  double lo, hi;
  // Outer approximation for open sources (left-rightmost / right-leftmost ends).
  std::optional<double> outer_lo, outer_hi;
};

struct Pushforward {
  double t0 = 0.0;
  double t = 0.0;
  std::vector<PushforwardPiece> pieces;
  IntervalSet source;
  bool truncated = false;
  double extrapolation_error = 0.0;
};

struct PushforwardOptions {
  ExtremalOptions extremal;
  std::vector<double> eta_seq;  // restart offsets for left-rightmost ends; empty = 1e-3 * 2^-k, k = 0..4
  bool outer_for_open = true;
};

/// Thick pushforward (t >= t0) or pushbackward (t < t0) of a finite union of intervals,
/// at each of the given times. Pushbackward goes through the time-reversed solution.
std::vector<Pushforward> thick_pushforward_at(const Solution& sol, double t0, const IntervalSet& B,
                                              std::span<const double> times,
                                              const PushforwardOptions& opts = {});
Pushforward thick_pushforward(const Solution& sol, double t0, const IntervalSet& B, double t,
                              const PushforwardOptions& opts = {});

}  // namespace chlab

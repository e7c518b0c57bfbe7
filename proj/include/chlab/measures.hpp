#pragma once

#include <string>
#include <vector>

#include "chlab/characteristics.hpp"
#include "chlab/solution.hpp"

namespace chlab {

enum class MeasureSign { plus, minus };
enum class MeasureMethod { test_function, pushforward };

std::string to_string(MeasureSign s);
std::string to_string(MeasureMethod m);

/// Estimate of mu+(t0, B) or mu-(t0, B).
struct MeasureEstimate {
  double t0 = 0.0;
  std::string B;
  double value = 0.0;
  MeasureMethod method = MeasureMethod::test_function;
  MeasureSign sign = MeasureSign::plus;
  std::vector<double> t_sequence;  // times used for the one-sided limit
  std::vector<double> values;      // integral at each time (smallest eps for test functions)
  double extrapolation_error = 0.0;
  bool reliable = true;
};

struct ConcentrationProfile {
  double t0 = 0.0;
  MeasureSign side = MeasureSign::plus;
  double x_star = 0.0;
  std::vector<double> radii;   // decreasing
  std::vector<double> masses;  // jump of the one-sided density mass within |x - x_star| < radius
  std::vector<double> errors;
};

struct MeasureOptions {
  double delta_t = 0.1;   // t_k = t0 +- delta_t 2^-k
  int t_levels = 11;      // k = 0 .. t_levels - 1
  std::vector<double> eps_seq;  // empty = 0.1 * 2^-k, k = 0..6
  double zero_abs = 1e-4;
  PushforwardOptions pushforward;
};

std::vector<double> default_eps_seq();

/// Test-function estimate: hats phi^eps, limit t -> t0+ then eps -> 0+.
MeasureEstimate mu_plus_testfn(const Solution& sol, double t0, const IntervalSet& B, const MeasureOptions& opts = {});

/// Thick-pushforward estimate: lim_{t -> t0+} int_{B(t)} (u_x^+)^2 - int_B (u_x^+)^2(t0).
MeasureEstimate mu_plus_pushforward(const Solution& sol, double t0, const IntervalSet& B,
                                    const MeasureOptions& opts = {});

MeasureEstimate mu_plus(const Solution& sol, double t0, const IntervalSet& B, MeasureMethod method,
                        const MeasureOptions& opts = {});

/// mu-(t0, B) = -mu+ of the time-reversed solution at 0.
MeasureEstimate mu_minus(const Solution& sol, double t0, const IntervalSet& B, MeasureMethod method,
                         const MeasureOptions& opts = {});

/// |value| < max(zero_abs, 10 * extrapolation_error).
bool is_vanishing(const MeasureEstimate& e, double zero_abs = 1e-4);

/// Jump of int_{|x - x*| < r} (u_x^{+/-})^2 between t0 and the one-sided limit (from above for
/// plus, from below for minus), for each radius.
ConcentrationProfile concentration_profile(const Solution& sol, double t0, MeasureSign side, double x_star,
                                           const std::vector<double>& radii, const MeasureOptions& opts = {});

struct AtomScanEntry {
  double t = 0.0;
  double mu_plus = 0.0;
  double mu_minus = 0.0;  // 0 when t0 is not inside the solution's time range
  double magnitude = 0.0;  // |mu+| + |mu-|
  double error = 0.0;
};

std::vector<AtomScanEntry> atom_time_scan(const Solution& sol, const std::vector<double>& t_grid,
                                          const IntervalSet& B, const MeasureOptions& opts = {});

/// Linear-in-gap extrapolation of f(g) to g -> 0 from samples at decreasing gaps.
struct Limit {
  double value = 0.0;
  double error = 0.0;
};
Limit extrapolate_to_zero(const std::vector<double>& gaps, const std::vector<double>& f);

}  // namespace chlab

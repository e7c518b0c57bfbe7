#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chlab/ode.hpp"

namespace chlab {

/// Raised when two peakons get closer than the configured collision gap.
class CollisionError : public std::runtime_error {
 public:
  CollisionError(std::size_t i, std::size_t j, double gap);
  std::size_t i, j;
  double gap;
};

/// Positions and momenta of N peakons at one instant, u = sum_i p_i exp(-|x - q_i|).
///
/// Positions are kept sorted (momenta are permuted along); equal positions are
/// allowed and mark a collision.
class PeakonState {
 public:
  PeakonState() = default;
  PeakonState(double t, std::vector<double> q, std::vector<double> p);

  static PeakonState zero(double t) { return PeakonState(t, {}, {}); }

  double t() const { return t_; }
  std::span<const double> q() const { return q_; }
  std::span<const double> p() const { return p_; }
  std::size_t size() const { return q_.size(); }
  bool empty() const { return q_.empty(); }

  PeakonState with_time(double t) const;
  /// Same positions, negated momenta: the state of -u.
  PeakonState negated() const;
  /// Smallest adjacent gap, +inf for N < 2.
  double min_gap() const;
  /// Index i of the adjacent pair (i, i+1) with the smallest gap.
  std::size_t closest_pair() const;

 private:
  double t_ = 0.0;
  std::vector<double> q_;
  std::vector<double> p_;
};

/// Exact antisymmetric peakon-antipeakon solution
///   u = p_1 e^{-|x-q_1|} - p_1 e^{-|x+q_1|},  p_1 = p/2, q_1 = q/2,
/// parametrized by p(0) > 0 and q(0) < 0.
struct ClosedFormPair {
  double p0 = 0.0;
  double q0 = 0.0;
  double H0 = 0.0;
  double T = 0.0;

  static ClosedFormPair from_initial(double p0, double q0);
  /// Reads the pair off an antisymmetric two-peakon state (q = [a, -a], p = [b, -b], a < 0 < b);
  /// the returned times are relative to state.t().
  static std::optional<ClosedFormPair> from_state(const PeakonState& state, double rel_tol = 1e-10);

  /// p(t) and q(t) for any t < T (negative times allowed).
  double momentum(double t) const;
  double separation(double t) const;
  /// Two-peakon state for any t < T; no domain check.
  PeakonState state_unchecked(double t) const;
  /// p(t)^2 (1 - e^{q(t)}).
  double invariant(double t) const;
};

/// Two-peakon state at 0 <= t < T. Throws std::domain_error otherwise.
PeakonState closed_form_eval(const ClosedFormPair& pair, double t);

struct BreakingEvent {
  double t_break = 0.0;
  std::pair<std::size_t, std::size_t> indices{0, 1};
  double gap_at_stop = 0.0;
  double vmin_at_stop = 0.0;
  PeakonState state_at_stop;
};

struct PeakonRhs {
  std::vector<double> dq;
  std::vector<double> dp;
};

inline constexpr double kDefaultCollisionGap = 1e-8;

/// dq_i = sum_j p_j e^{-|q_i-q_j|},  dp_i = sum_j p_i p_j sgn(q_i-q_j) e^{-|q_i-q_j|}.
PeakonRhs npeakon_rhs(const PeakonState& state, double epsilon_gap = kDefaultCollisionGap);

/// Same system on a flat [q..., p...] vector; no collision checks.
void npeakon_rhs_flat(std::span<const double> y, std::span<double> dydt);

struct IntegrateOptions {
  double tol = 1e-9;
  double epsilon_gap = kDefaultCollisionGap;
  double max_step = 0.05;
};

using IntegrateResult = std::variant<PeakonState, BreakingEvent>;

/// Dense record of an integration run between t_start and the stop time.
struct PeakonTrajectory {
  std::size_t n = 0;
  std::vector<Dopri5::Segment> segments;
  IntegrateResult end;

  double t_start() const;
  double t_stop() const;
  PeakonState at(double t) const;
};

PeakonTrajectory integrate_trajectory(const PeakonState& state, double t_end,
                                      const IntegrateOptions& opts = {});

/// Evolves the state to t_end, or reports wave breaking if a gap drops below epsilon_gap.
IntegrateResult integrate(const PeakonState& state, double t_end, const IntegrateOptions& opts = {});

/// Breaking time of the evolution started from `state`. Antisymmetric pairs use the exact
/// formula; everything else integrates up to `horizon`. nullopt = no breaking detected.
std::optional<double> breaking_time_estimate(const PeakonState& state, double horizon = 100.0,
                                             const IntegrateOptions& opts = {});

}  // namespace chlab

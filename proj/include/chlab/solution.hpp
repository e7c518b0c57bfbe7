#pragma once

#include <memory>
#include <string>
#include <vector>

#include "chlab/peakon.hpp"

namespace chlab {

/// A weak solution given as a time-indexed family of peakon states.
///
/// Implementations are immutable after construction, so a single instance can be
/// shared between threads.
class Solution {
 public:
  virtual ~Solution() = default;
  virtual PeakonState at(double t) const = 0;
  /// Times at which the solution is not Lipschitz in x (wave breaking, pair creation).
  virtual std::vector<double> singular_times() const { return {}; }
  virtual double t_min() const { return 0.0; }
  virtual double t_max() const;
  virtual std::string describe() const = 0;
};

using SolutionPtr = std::shared_ptr<const Solution>;

class ZeroSolution final : public Solution {
 public:
  PeakonState at(double t) const override { return PeakonState::zero(t); }
  double t_min() const override;
  std::string describe() const override { return "zero"; }
};

/// What the exact peakon-antipeakon solution does after its breaking time T.
enum class PairContinuation {
  none,        // undefined past T
  reflection,  // u(t, x) = -u(2T - t, x)
  zero,        // u = 0 for t > T
};

/// Antisymmetric peakon-antipeakon pair in closed form, with an optional continuation.
/// At t = T the state is empty (u = 0 is the uniform limit).
class ExactPairSolution final : public Solution {
 public:
  ExactPairSolution(ClosedFormPair pair, PairContinuation cont, double time_shift = 0.0);

  PeakonState at(double t) const override;
  std::vector<double> singular_times() const override;
  double t_min() const override;
  double t_max() const override;
  std::string describe() const override;

  const ClosedFormPair& pair() const { return pair_; }
  PairContinuation continuation() const { return cont_; }
  /// Time (in this solution's clock) of the collision.
  double breaking_time() const { return pair_.T - shift_; }

 private:
  ClosedFormPair pair_;
  PairContinuation cont_;
  double shift_;  // at(t) = closed form at t + shift_
};

/// u^{t0 b}(tau, x) = -u(t0 - tau, x).
class TimeReversed final : public Solution {
 public:
  TimeReversed(SolutionPtr base, double t0);
  PeakonState at(double tau) const override;
  std::vector<double> singular_times() const override;
  double t_min() const override;
  double t_max() const override;
  std::string describe() const override;

 private:
  SolutionPtr base_;
  double t0_;
};

/// Piecewise numeric solution: integrated peakon segments separated by events.
/// Each piece covers [t_from, t_to]; pieces with no segments hold a constant state.
class NumericSolution final : public Solution {
 public:
  struct Piece {
    double t_from, t_to;
    PeakonTrajectory trajectory;
  };
  NumericSolution(std::vector<Piece> pieces, std::vector<double> events, std::string label);

  PeakonState at(double t) const override;
  std::vector<double> singular_times() const override { return events_; }
  double t_min() const override;
  double t_max() const override;
  std::string describe() const override { return label_; }

 private:
  std::vector<Piece> pieces_;
  std::vector<double> events_;
  std::string label_;
};

}  // namespace chlab

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace chlab {

/// Adaptive Dormand-Prince 5(4) integrator with continuous (dense) output.
///
/// The solver is driven one accepted step at a time so that callers can
/// inspect each step (collision checks, truncation at singular times) and
/// keep the dense segments for later interpolation.
class Dopri5 {
 public:
  using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
  /// Returns false if a freshly computed state must be rejected (the step is then halved).
  using Validator = std::function<bool(std::span<const double> y)>;

  struct Options {
    double rtol = 1e-9;
    double atol = 1e-9;
    double max_step = 0.0;  // 0 = unlimited
    double min_step = 1e-15;
    int max_rejections = 200;
  };

  enum class Status { ok, underflow, too_many_rejections };

  /// Polynomial data of one accepted step.
  struct Segment {
    double t0 = 0.0;
    double h = 0.0;
    std::vector<double> coeff;  // 5 blocks of n values
    void eval(double t, std::span<double> out) const;
    double t1() const { return t0 + h; }
  };

  Dopri5(Rhs rhs, Options opts, Validator validator = {});

  void reset(double t, std::span<const double> y);

  /// Takes one accepted step without passing t_limit (in the direction of integration).
  Status step(double t_limit);

  double t() const { return t_; }
  std::span<const double> y() const { return y_; }
  std::span<const double> dydt() const { return k1_; }
  const Segment& last_segment() const { return segment_; }
  double suggested_step() const { return h_; }
  std::size_t steps_taken() const { return n_accepted_; }

 private:
  double initial_step(double direction) const;

  Rhs rhs_;
  Options opts_;
  Validator validator_;
  std::size_t n_ = 0;
  double t_ = 0.0;
  double h_ = 0.0;
  std::size_t n_accepted_ = 0;
  std::vector<double> y_, k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, err_;
  Segment segment_;
};

}  // namespace chlab

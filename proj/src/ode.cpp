#include "chlab/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chlab {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

void Dopri5::Segment::eval(double t, std::span<double> out) const {
  const std::size_t n = out.size();
  const double s = h == 0.0 ? 0.0 : (t - t0) / h;
  const double s1 = 1.0 - s;
  for (std::size_t i = 0; i < n; ++i) {
    const double r1 = coeff[i], r2 = coeff[n + i], r3 = coeff[2 * n + i], r4 = coeff[3 * n + i],
                 r5 = coeff[4 * n + i];
    out[i] = r1 + s * (r2 + s1 * (r3 + s * (r4 + s1 * r5)));
  }
}

Dopri5::Dopri5(Rhs rhs, Options opts, Validator validator)
    : rhs_(std::move(rhs)), opts_(opts), validator_(std::move(validator)) {}

void Dopri5::reset(double t, std::span<const double> y) {
  n_ = y.size();
  t_ = t;
  y_.assign(y.begin(), y.end());
  for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_, &err_}) v->assign(n_, 0.0);
  rhs_(t_, y_, k1_);
  h_ = 0.0;
  n_accepted_ = 0;
  segment_ = Segment{t_, 0.0, std::vector<double>(5 * n_, 0.0)};
  std::copy(y_.begin(), y_.end(), segment_.coeff.begin());
}

double Dopri5::initial_step(double direction) const {
  double d0 = 0.0, d1n = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc = opts_.atol + opts_.rtol * std::abs(y_[i]);
    d0 += (y_[i] / sc) * (y_[i] / sc);
    d1n += (k1_[i] / sc) * (k1_[i] / sc);
  }
  d0 = std::sqrt(d0 / std::max<std::size_t>(n_, 1));
  d1n = std::sqrt(d1n / std::max<std::size_t>(n_, 1));
  double h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  if (opts_.max_step > 0.0) h = std::min(h, opts_.max_step);
  return direction * h;
}

Dopri5::Status Dopri5::step(double t_limit) {
  const double direction = t_limit >= t_ ? 1.0 : -1.0;
  if (h_ == 0.0) h_ = initial_step(direction);
  const std::size_t n = n_;
  int rejections = 0;
  while (true) {
    double h = h_;
    if (opts_.max_step > 0.0 && std::abs(h) > opts_.max_step) h = direction * opts_.max_step;
    bool clamped = false;
    if (direction * (t_ + h - t_limit) >= 0.0) {
      h = t_limit - t_;
      clamped = true;
    }
    if (std::abs(h) < opts_.min_step * std::max(1.0, std::abs(t_))) {
      if (clamped && h != 0.0) {
        // Remaining interval is below resolution: snap to the limit.
      } else {
        return Status::underflow;
      }
    }

    auto stage = [&](std::vector<double>& out, double tc, auto&& combine) {
      for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y_[i] + h * combine(i);
      rhs_(tc, ytmp_, out);
    };
    stage(k2_, t_ + c2 * h, [&](std::size_t i) { return a21 * k1_[i]; });
    stage(k3_, t_ + c3 * h, [&](std::size_t i) { return a31 * k1_[i] + a32 * k2_[i]; });
    stage(k4_, t_ + c4 * h,
          [&](std::size_t i) { return a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]; });
    stage(k5_, t_ + c5 * h, [&](std::size_t i) {
      return a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i];
    });
    stage(k6_, t_ + h, [&](std::size_t i) {
      return a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i];
    });
    for (std::size_t i = 0; i < n; ++i)
      ynew_[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                              a76 * k6_[i]);
    const double t_new = clamped ? t_limit : t_ + h;
    rhs_(t_new, ynew_, k7_);

    double err = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
      const double sc = opts_.atol + opts_.rtol * std::max(std::abs(y_[i]), std::abs(ynew_[i]));
      err += (e / sc) * (e / sc);
      finite = finite && std::isfinite(ynew_[i]) && std::isfinite(e);
    }
    err = std::sqrt(err / std::max<std::size_t>(n, 1));
    if (!finite) err = 1e10;

    const bool valid = finite && (!validator_ || validator_(ynew_));
    if (err <= 1.0 && valid) {
      segment_.t0 = t_;
      segment_.h = h;
      segment_.coeff.resize(5 * n);
      for (std::size_t i = 0; i < n; ++i) {
        const double ydiff = ynew_[i] - y_[i];
        const double bspl = h * k1_[i] - ydiff;
        segment_.coeff[i] = y_[i];
        segment_.coeff[n + i] = ydiff;
        segment_.coeff[2 * n + i] = bspl;
        segment_.coeff[3 * n + i] = ydiff - h * k7_[i] - bspl;
        segment_.coeff[4 * n + i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                                         d6 * k6_[i] + d7 * k7_[i]);
      }
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!clamped) h_ = h * fac;
      else h_ = direction * std::max(std::abs(h_), std::abs(h * fac));
      t_ = t_new;
      std::swap(y_, ynew_);
      std::swap(k1_, k7_);
      ++n_accepted_;
      return Status::ok;
    }
    if (++rejections > opts_.max_rejections) return Status::too_many_rejections;
    const double fac = valid ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0) : 0.5;
    h_ = h * fac;
    if (std::abs(h_) < opts_.min_step * std::max(1.0, std::abs(t_))) return Status::underflow;
  }
}

}  // namespace chlab

#include "chlab/solution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace chlab {

double Solution::t_max() const { return std::numeric_limits<double>::infinity(); }

double ZeroSolution::t_min() const { return -std::numeric_limits<double>::infinity(); }

ExactPairSolution::ExactPairSolution(ClosedFormPair pair, PairContinuation cont, double time_shift)
    : pair_(pair), cont_(cont), shift_(time_shift) {}

PeakonState ExactPairSolution::at(double t) const {
  const double s = t + shift_;
  if (s < pair_.T) return pair_.state_unchecked(s).with_time(t);
  if (s == pair_.T) return PeakonState::zero(t);
  switch (cont_) {
    case PairContinuation::reflection: return pair_.state_unchecked(2.0 * pair_.T - s).negated().with_time(t);
    case PairContinuation::zero: return PeakonState::zero(t);
    case PairContinuation::none: break;
  }
  throw std::domain_error("ExactPairSolution: time past breaking without a continuation");
}

std::vector<double> ExactPairSolution::singular_times() const { return {breaking_time()}; }

double ExactPairSolution::t_min() const { return -std::numeric_limits<double>::infinity(); }

double ExactPairSolution::t_max() const {
  return cont_ == PairContinuation::none ? breaking_time() : std::numeric_limits<double>::infinity();
}

std::string ExactPairSolution::describe() const {
  std::ostringstream os;
  os << "exact_pair(p0=" << pair_.p0 << ", q0=" << pair_.q0;
  switch (cont_) {
    case PairContinuation::none: os << ", continuation=none"; break;
    case PairContinuation::reflection: os << ", continuation=reflection"; break;
    case PairContinuation::zero: os << ", continuation=zero"; break;
  }
  if (shift_ != 0.0) os << ", shift=" << shift_;
  os << ")";
  return os.str();
}

TimeReversed::TimeReversed(SolutionPtr base, double t0) : base_(std::move(base)), t0_(t0) {}

PeakonState TimeReversed::at(double tau) const { return base_->at(t0_ - tau).negated().with_time(tau); }

std::vector<double> TimeReversed::singular_times() const {
  auto s = base_->singular_times();
  for (auto& v : s) v = t0_ - v;
  std::sort(s.begin(), s.end());
  return s;
}

double TimeReversed::t_min() const { return t0_ - base_->t_max(); }
double TimeReversed::t_max() const { return t0_ - base_->t_min(); }

std::string TimeReversed::describe() const {
  std::ostringstream os;
  os << "time_reversed(" << base_->describe() << ", t0=" << t0_ << ")";
  return os.str();
}

NumericSolution::NumericSolution(std::vector<Piece> pieces, std::vector<double> events, std::string label)
    : pieces_(std::move(pieces)), events_(std::move(events)), label_(std::move(label)) {
  if (pieces_.empty()) throw std::invalid_argument("NumericSolution: no pieces");
}

PeakonState NumericSolution::at(double t) const {
  if (t < t_min() || t > t_max()) throw std::domain_error("NumericSolution: time outside the computed range");
  // the later piece wins at a shared event time (right-continuous in time)
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    if (t >= it->t_from) {
      const double tt = std::min(t, it->trajectory.t_stop());
      return it->trajectory.at(tt).with_time(t);
    }
  }
  return pieces_.front().trajectory.at(pieces_.front().t_from).with_time(t);
}

double NumericSolution::t_min() const { return pieces_.front().t_from; }
double NumericSolution::t_max() const { return pieces_.back().t_to; }

}  // namespace chlab

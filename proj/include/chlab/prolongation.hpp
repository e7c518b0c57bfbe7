#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chlab/measures.hpp"
#include "chlab/peakon.hpp"
#include "chlab/solution.hpp"

namespace chlab {

enum class PolicyKind { conservative_reflection, dissipative_zero, dissipative_merge };

std::string to_string(PolicyKind k);
PolicyKind parse_policy(const std::string& name);

struct ProlongationPolicy {
  PolicyKind kind = PolicyKind::dissipative_merge;
  // merge: the merged peakon is dropped when |p_i + p_j| <= cancel_tol * (|p_i| + |p_j|)
  double cancel_tol = 1e-6;
};

class UnsupportedPolicy : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LedgerJump {
  double t = 0.0;
  double dE = 0.0;
  std::string event;
};

/// E(t) = (1/2) int (u^2 + u_x^2) on a time grid plus the jumps at policy events.
struct EnergyLedger {
  std::vector<double> t;
  std::vector<double> E;
  std::vector<LedgerJump> jumps;
  std::optional<double> analytic_T;
  std::vector<double> detected_T;
};

struct ProlongOptions {
  IntegrateOptions integrate;
  std::size_t ledger_samples = 201;
  std::size_t oleinik_grid = 200;
};

struct Prolonged {
  SolutionPtr solution;
  EnergyLedger ledger;
  std::vector<BreakingEvent> events;
  /// max over a (t, x) grid of u_x(t, x) * min(t, 1); dissipative policies only.
  std::optional<double> oleinik_constant;
  std::string notes;
};

/// Evolves `initial` to t_end, continuing past breaking with the given policy.
/// Antisymmetric pairs under conservative_reflection / dissipative_zero use the exact solution,
/// switched at the analytic T; the integrator's detected breaking time is recorded alongside.
Prolonged prolong(const PeakonState& initial, const ProlongationPolicy& policy, double t_end,
                  const ProlongOptions& opts = {});

/// Energy ledger of an arbitrary solution on a uniform grid of [t_from, t_to].
EnergyLedger energy_ledger(const Solution& sol, double t_from, double t_to, std::size_t samples);

/// max over an n x n grid of (t, x) in (t_from, t_to] x [x_lo, x_hi] of u_x * min(t, 1).
double oleinik_constant(const Solution& sol, double t_from, double t_to, double x_lo, double x_hi, std::size_t n);

/// w(t) = u_conservative(t + T): a peakon-antipeakon pair emerging from u = 0 at t = 0.
struct PairCreation {
  ClosedFormPair pair;
  SolutionPtr solution;
  double C_tilde = 0.0;  // |w_x(t, x)| <= C_tilde / t
};
PairCreation pair_creation_scenario(const ClosedFormPair& pair);

struct DissipationComparison {
  double t0 = 0.0;
  std::string B;
  double mu_plus = 0.0;
  double mu_plus_error = 0.0;
  double E_accreting = 0.0;    // lim inf_{t -> t0+} E(u)
  double E_alternative = 0.0;  // lim sup_{t -> t0+} E(u_bar)
  double E_error = 0.0;
  double margin = 0.0;           // E_accreting - E_alternative
  double required_margin = 0.0;  // mu_plus / 4
  bool applicable = true;
  bool strict = false;
  bool inconclusive = false;
  std::string note;
};

/// Compares the energy just after t0 of an accreting solution with a dissipative alternative.
DissipationComparison max_dissipation_compare(const Solution& accreting, const Solution& alternative, double t0,
                                              const IntervalSet& B, const MeasureOptions& opts = {});

}  // namespace chlab

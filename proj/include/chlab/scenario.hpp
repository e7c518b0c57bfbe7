#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "chlab/characteristics.hpp"
#include "chlab/measures.hpp"
#include "chlab/prolongation.hpp"

namespace chlab {

class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& field, const std::string& what);
  std::string field;
};

struct InitialData {
  enum class Kind { peakons, closed_form, pair_creation };
  Kind kind = Kind::peakons;
  std::vector<double> p, q;          // peakons
  std::optional<ClosedFormPair> pair;  // closed_form and pair_creation
};

struct CharRequest {
  double zeta0 = 0.0;
  double t0 = 0.0;
  double t1 = 0.0;
  std::string side = "generic";  // generic | left | right
};

struct Scenario {
  std::string name;
  InitialData initial;
  ProlongationPolicy policy;
  double t_end = 0.0;
  double ode_tol = 1e-9;
  std::vector<double> t0_list;
  std::vector<std::string> B_list;
  std::string output_dir;
  std::vector<CharRequest> characteristics;
  std::size_t samples = 201;
  std::vector<double> delta_seq;   // empty = characteristics default
  std::optional<double> analytic_T;  // attached for closed-form data

  PeakonState initial_state() const;
};

/// Parses a JSON scenario document (comments allowed). Times may be written as numbers or,
/// when the data has an analytic breaking time, as "T", "2T", "1.5*T", "T/2".
Scenario parse_scenario(const std::string& document);
/// A number or T-expression given as text (command-line options).
double parse_time(const std::string& text, const std::optional<double>& T, const std::string& field);
Scenario load_scenario(const std::string& path);

struct BuiltScenario {
  SolutionPtr solution;
  EnergyLedger ledger;
  std::vector<BreakingEvent> events;
  std::optional<double> oleinik_constant;
  std::size_t n_peakons = 0;
  std::string notes;
};

BuiltScenario build_solution(const Scenario& s);

struct Check {
  std::string id;
  std::string claim;
  std::string expected;
  double observed = 0.0;
  std::string tolerance;
  bool pass = false;
};

struct RunReport {
  std::string name;
  std::vector<Check> checks;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  std::vector<std::string> notes;
  std::vector<std::pair<std::string, double>> timings;  // seconds; console only

  bool ok() const;
  void add(Check c);
  /// Deterministic serialization (timings excluded).
  nlohmann::ordered_json to_json() const;
  std::string table() const;
};

/// Runs a scenario and writes trajectory.csv, ledger.csv, char_<k>.csv, measures.json and
/// report.json into out_dir (scenario output_dir when empty).
RunReport run(const Scenario& s, const std::string& out_dir = "");

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  double tol = 1e-9;  // integrator tolerance
};

/// Suites: oracle, characteristics, measures, prolongation, determinism, all.
RunReport verify(const std::string& suite, const VerifyOptions& opts = {});
std::vector<std::string> verify_suites();

// --- output helpers ---

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double x);
std::string trajectory_csv(const Solution& sol, double t_from, double t_to, std::size_t samples, std::size_t n);
std::string ledger_csv(const EnergyLedger& ledger);
std::string char_csv(const CharPath& path);
nlohmann::ordered_json to_json(const MeasureEstimate& m);
nlohmann::ordered_json to_json(const ConcentrationProfile& c);
nlohmann::ordered_json to_json(const DissipationComparison& c);
std::string measure_csv(const std::vector<MeasureEstimate>& ms);
void write_text(const std::string& path, const std::string& text);

}  // namespace chlab

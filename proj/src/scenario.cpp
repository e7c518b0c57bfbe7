#include "chlab/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "chlab/field.hpp"

namespace chlab {

using json = nlohmann::json;

ScenarioError::ScenarioError(const std::string& f, const std::string& what)
    : std::invalid_argument("scenario field '" + f + "': " + what), field(f) {}

PeakonState Scenario::initial_state() const {
  switch (initial.kind) {
    case InitialData::Kind::peakons: return PeakonState(0.0, initial.q, initial.p);
    case InitialData::Kind::closed_form: return initial.pair->state_unchecked(0.0);
    case InitialData::Kind::pair_creation: return PeakonState::zero(0.0);
  }
  return PeakonState::zero(0.0);
}

namespace {

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ScenarioError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ScenarioError(field, "must be finite");
  return v;
}

double to_double(const std::string& s, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ScenarioError(field, "cannot read a number from '" + s + "'");
  }
  if (used != s.size()) throw ScenarioError(field, "cannot read a number from '" + s + "'");
  return v;
}

// number, or an expression in the analytic breaking time: "T", "2T", "1.5*T", "T/2"
double time_value(const json& j, const std::optional<double>& T, const std::string& field) {
  if (j.is_number()) return number(j, field);
  if (!j.is_string()) throw ScenarioError(field, "expected a number or a T-expression");
  std::string s = j.get<std::string>();
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  const auto pos = s.find('T');
  if (pos == std::string::npos) return to_double(s, field);
  if (!T) throw ScenarioError(field, "'" + s + "' needs closed-form data with a breaking time");
  if (s == "T") return *T;
  if (pos == 0 && s.size() > 2 && s[1] == '/') return *T / to_double(s.substr(2), field);
  if (pos + 1 == s.size()) {
    std::string c = s.substr(0, pos);
    if (!c.empty() && c.back() == '*') c.pop_back();
    return to_double(c, field) * *T;
  }
  throw ScenarioError(field, "unsupported T-expression '" + s + "'");
}

}  // namespace

double parse_time(const std::string& text, const std::optional<double>& T, const std::string& field) {
  return time_value(json(text), T, field);
}

namespace {

ClosedFormPair read_pair(const json& j, const std::string& field) {
  if (!j.is_object()) throw ScenarioError(field, "expected an object with p0 and q0 (or exp_q0)");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "p0" && it.key() != "q0" && it.key() != "exp_q0")
      throw ScenarioError(field + "." + it.key(), "unknown field");
  if (!j.contains("p0")) throw ScenarioError(field + ".p0", "missing");
  const double p0 = number(j["p0"], field + ".p0");
  double q0 = 0.0;
  if (j.contains("q0") == j.contains("exp_q0")) throw ScenarioError(field + ".q0", "give exactly one of q0 and exp_q0");
  if (j.contains("q0")) {
    q0 = number(j["q0"], field + ".q0");
  } else {
    const double e = number(j["exp_q0"], field + ".exp_q0");
    if (!(e > 0.0)) throw ScenarioError(field + ".exp_q0", "must be positive");
    q0 = std::log(e);
  }
  try {
    return ClosedFormPair::from_initial(p0, q0);
  } catch (const std::exception& e) {
    throw ScenarioError(field, e.what());
  }
}

}  // namespace

Scenario parse_scenario(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ScenarioError("<document>", e.what());
  }
  if (!doc.is_object()) throw ScenarioError("<document>", "expected a JSON object");
  static const std::set<std::string> known = {"name",   "initial",         "policy",  "t_end",      "ode_tol",
                                              "t0_list", "B_list",         "output_dir", "characteristics",
                                              "samples", "delta_seq"};
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!known.count(it.key())) throw ScenarioError(it.key(), "unknown field");

  Scenario s;
  if (!doc.contains("name") || !doc["name"].is_string() || doc["name"].get<std::string>().empty())
    throw ScenarioError("name", "missing or not a non-empty string");
  s.name = doc["name"].get<std::string>();

  if (!doc.contains("initial")) throw ScenarioError("initial", "missing");
  const json& ini = doc["initial"];
  if (ini.is_array()) {
    s.initial.kind = InitialData::Kind::peakons;
    for (std::size_t k = 0; k < ini.size(); ++k) {
      const std::string f = "initial[" + std::to_string(k) + "]";
      if (!ini[k].is_array() || ini[k].size() != 2) throw ScenarioError(f, "expected a [p, q] pair");
      s.initial.p.push_back(number(ini[k][0], f + ".p"));
      s.initial.q.push_back(number(ini[k][1], f + ".q"));
      if (k > 0 && !(s.initial.q[k] > s.initial.q[k - 1]))
        throw ScenarioError(f + ".q", "positions must be strictly increasing");
    }
    if (auto pair = ClosedFormPair::from_state(s.initial_state())) {
      s.initial.pair = pair;
      s.analytic_T = pair->T;
    }
  } else if (ini.is_object() && ini.size() == 1 && ini.contains("closed_form")) {
    s.initial.kind = InitialData::Kind::closed_form;
    s.initial.pair = read_pair(ini["closed_form"], "initial.closed_form");
    s.analytic_T = s.initial.pair->T;
  } else if (ini.is_object() && ini.size() == 1 && ini.contains("pair_creation")) {
    s.initial.kind = InitialData::Kind::pair_creation;
    s.initial.pair = read_pair(ini["pair_creation"], "initial.pair_creation");
    s.analytic_T = s.initial.pair->T;
  } else {
    throw ScenarioError("initial", "expected [[p, q], ...], {\"closed_form\": {...}} or {\"pair_creation\": {...}}");
  }

  if (doc.contains("policy")) {
    if (!doc["policy"].is_string()) throw ScenarioError("policy", "expected a policy name");
    try {
      s.policy.kind = parse_policy(doc["policy"].get<std::string>());
    } catch (const std::exception& e) {
      throw ScenarioError("policy", e.what());
    }
  }

  if (!doc.contains("t_end")) throw ScenarioError("t_end", "missing");
  s.t_end = time_value(doc["t_end"], s.analytic_T, "t_end");
  if (!(s.t_end > 0.0)) throw ScenarioError("t_end", "must be positive");

  if (doc.contains("ode_tol")) {
    s.ode_tol = number(doc["ode_tol"], "ode_tol");
    if (!(s.ode_tol > 0.0) || s.ode_tol > 1e-2) throw ScenarioError("ode_tol", "must lie in (0, 1e-2]");
  }
  if (doc.contains("t0_list")) {
    if (!doc["t0_list"].is_array()) throw ScenarioError("t0_list", "expected a list");
    for (std::size_t k = 0; k < doc["t0_list"].size(); ++k)
      s.t0_list.push_back(time_value(doc["t0_list"][k], s.analytic_T, "t0_list[" + std::to_string(k) + "]"));
  }
  if (doc.contains("B_list")) {
    if (!doc["B_list"].is_array()) throw ScenarioError("B_list", "expected a list of interval strings");
    for (std::size_t k = 0; k < doc["B_list"].size(); ++k) {
      const std::string f = "B_list[" + std::to_string(k) + "]";
      if (!doc["B_list"][k].is_string()) throw ScenarioError(f, "expected a string such as \"[-1,1]\"");
      const std::string b = doc["B_list"][k].get<std::string>();
      try {
        (void)IntervalSet::parse(b);
      } catch (const std::exception& e) {
        throw ScenarioError(f, e.what());
      }
      s.B_list.push_back(b);
    }
  }
  s.output_dir = "out/" + s.name;
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ScenarioError("output_dir", "expected a path");
    s.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("samples")) {
    if (!doc["samples"].is_number_integer() || doc["samples"].get<long long>() < 2)
      throw ScenarioError("samples", "expected an integer >= 2");
    s.samples = doc["samples"].get<std::size_t>();
  }
  if (doc.contains("delta_seq")) {
    if (!doc["delta_seq"].is_array()) throw ScenarioError("delta_seq", "expected a list");
    for (std::size_t k = 0; k < doc["delta_seq"].size(); ++k)
      s.delta_seq.push_back(number(doc["delta_seq"][k], "delta_seq[" + std::to_string(k) + "]"));
  }
  if (doc.contains("characteristics")) {
    if (!doc["characteristics"].is_array()) throw ScenarioError("characteristics", "expected a list");
    for (std::size_t k = 0; k < doc["characteristics"].size(); ++k) {
      const std::string f = "characteristics[" + std::to_string(k) + "]";
      const json& c = doc["characteristics"][k];
      if (!c.is_object()) throw ScenarioError(f, "expected an object with zeta0, t0, t1");
      for (auto it = c.begin(); it != c.end(); ++it)
        if (it.key() != "zeta0" && it.key() != "t0" && it.key() != "t1" && it.key() != "side")
          throw ScenarioError(f + "." + it.key(), "unknown field");
      CharRequest r;
      if (!c.contains("zeta0") || !c.contains("t1")) throw ScenarioError(f, "zeta0 and t1 are required");
      r.zeta0 = number(c["zeta0"], f + ".zeta0");
      r.t0 = c.contains("t0") ? time_value(c["t0"], s.analytic_T, f + ".t0") : 0.0;
      r.t1 = time_value(c["t1"], s.analytic_T, f + ".t1");
      if (c.contains("side")) {
        if (!c["side"].is_string()) throw ScenarioError(f + ".side", "expected generic, left or right");
        r.side = c["side"].get<std::string>();
        if (r.side != "generic" && r.side != "left" && r.side != "right")
          throw ScenarioError(f + ".side", "expected generic, left or right");
      }
      s.characteristics.push_back(r);
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

BuiltScenario build_solution(const Scenario& s) {
  BuiltScenario b;
  if (s.initial.kind == InitialData::Kind::pair_creation) {
    const PairCreation pc = pair_creation_scenario(*s.initial.pair);
    b.solution = pc.solution;
    b.ledger = energy_ledger(*pc.solution, 0.0, s.t_end, s.samples);
    b.ledger.jumps.push_back({0.0, 0.5 * pc.pair.H0 * pc.pair.H0, "pair_creation"});
    b.n_peakons = 2;
    b.notes = "peakon-antipeakon pair emerging from u = 0 at t = 0";
    return b;
  }
  ProlongOptions po;
  po.integrate.tol = s.ode_tol;
  po.ledger_samples = s.samples;
  Prolonged p = prolong(s.initial_state(), s.policy, s.t_end, po);
  b.solution = p.solution;
  b.ledger = std::move(p.ledger);
  b.events = std::move(p.events);
  b.oleinik_constant = p.oleinik_constant;
  b.n_peakons = s.initial_state().size();
  b.notes = p.notes;
  return b;
}

// --- RunReport ---

bool RunReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void RunReport::add(Check c) {
  for (const auto& e : checks)
    if (e.id == c.id) throw std::logic_error("RunReport: duplicate check " + c.id);
  checks.push_back(std::move(c));
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["pass"] = ok();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json e;
    e["id"] = c.id;
    e["claim"] = c.claim;
    e["expected"] = c.expected;
    e["observed"] = std::isfinite(c.observed) ? nlohmann::ordered_json(c.observed) : nlohmann::ordered_json(format_double(c.observed));
    e["tolerance"] = c.tolerance;
    e["verdict"] = c.pass ? "pass" : "fail";
    arr.push_back(e);
  }
  j["checks"] = arr;
  j["values"] = values;
  j["notes"] = notes;
  return j;
}

std::string RunReport::table() const {
  std::size_t w[4] = {5, 8, 8, 9};
  std::vector<std::array<std::string, 4>> rows;
  for (const auto& c : checks) {
    rows.push_back({c.id, c.expected, format_double(c.observed), c.tolerance});
    for (int k = 0; k < 4; ++k) w[k] = std::max(w[k], rows.back()[k].size());
  }
  std::ostringstream os;
  os << "== " << name << " ==\n" << std::left;
  auto line = [&](const std::array<std::string, 4>& r, const std::string& verdict) {
    for (int k = 0; k < 4; ++k) os << std::setw(static_cast<int>(w[k] + 2)) << r[k];
    os << verdict << "\n";
  };
  line({"check", "expected", "observed", "tolerance"}, "verdict");
  for (std::size_t k = 0; k < rows.size(); ++k) line(rows[k], checks[k].pass ? "PASS" : "FAIL");
  for (const auto& [k, v] : timings) os << "  time " << k << ": " << std::fixed << std::setprecision(3) << v << " s\n";
  return os.str();
}

// --- run ---

RunReport run(const Scenario& s, const std::string& out_dir_arg) {
  const std::string out = out_dir_arg.empty() ? s.output_dir : out_dir_arg;
  RunReport rep;
  rep.name = s.name;
  const BuiltScenario b = build_solution(s);
  const Solution& sol = *b.solution;

  write_text(out + "/trajectory.csv", trajectory_csv(sol, 0.0, s.t_end, s.samples, b.n_peakons));
  write_text(out + "/ledger.csv", ledger_csv(b.ledger));

  rep.values["solution"] = sol.describe();
  rep.values["policy"] = s.initial.kind == InitialData::Kind::pair_creation ? "pair_creation" : to_string(s.policy.kind);
  if (s.analytic_T) rep.values["analytic_T"] = *s.analytic_T;
  rep.values["detected_T"] = b.ledger.detected_T;
  if (b.oleinik_constant) rep.values["oleinik_constant"] = *b.oleinik_constant;
  rep.values["E0"] = b.ledger.E.front();
  rep.notes.push_back(b.notes);

  // ledger consistency and energy condition
  double worst = 0.0;
  for (std::size_t k = 0; k < b.ledger.t.size(); ++k) {
    const double direct = 0.5 * energy(sol.at(b.ledger.t[k])).total;
    worst = std::max(worst, std::abs(direct - b.ledger.E[k]) / std::max(1.0, std::abs(direct)));
  }
  rep.add({"ledger_consistency", "ledger E matches direct field energy", "0", worst, "1e-9", worst <= 1e-9});
  const bool dissipative = s.initial.kind != InitialData::Kind::pair_creation &&
                           s.policy.kind != PolicyKind::conservative_reflection;
  if (dissipative) {
    double excess = -1e300;
    for (double E : b.ledger.E) excess = std::max(excess, E - b.ledger.E.front());
    rep.add({"weak_energy_condition", "E(t) <= E(0)", "<= 0", excess, "1e-6", excess <= 1e-6});
    double rise = 0.0;
    for (const auto& j : b.ledger.jumps) rise = std::max(rise, j.dE);
    rep.add({"dissipative_jumps", "energy never increases at events", "<= 0", rise, "1e-12", rise <= 1e-12});
  } else if (s.initial.kind != InitialData::Kind::pair_creation) {
    double jump = 0.0;
    for (const auto& j : b.ledger.jumps) jump = std::max(jump, std::abs(j.dE));
    const double drift = std::abs(b.ledger.E.back() - b.ledger.E.front());
    rep.add({"conservative_energy", "E(t_end) = E(0), no jump at T", "0", std::max(jump, drift), "1e-6",
             std::max(jump, drift) <= 1e-6});
  }

  // characteristics
  for (std::size_t k = 0; k < s.characteristics.size(); ++k) {
    const auto& r = s.characteristics[k];
    CharPath path;
    try {
      if (r.side == "generic") {
        path = integrate_char(sol, r.t0, r.zeta0, r.t1);
      } else {
        ExtremalOptions eo;
        eo.delta_seq = s.delta_seq;
        path = extremal_char(sol, r.t0, r.zeta0, r.t1, r.side == "left" ? Side::left : Side::right, eo).path;
      }
      write_text(out + "/char_" + std::to_string(k) + ".csv", char_csv(path));
      if (path.truncated) rep.notes.push_back("characteristic " + std::to_string(k) + " truncated at breaking");
    } catch (const std::exception& e) {
      rep.notes.push_back("characteristic " + std::to_string(k) + " failed: " + e.what());
    }
  }

  // measures
  auto records = nlohmann::ordered_json::array();
  std::vector<MeasureEstimate> all;
  for (double t0 : s.t0_list) {
    for (const auto& bs : s.B_list) {
      const IntervalSet B = IntervalSet::parse(bs);
      for (MeasureSign sign : {MeasureSign::plus, MeasureSign::minus}) {
        if (sign == MeasureSign::plus && !(t0 < sol.t_max())) continue;
        if (sign == MeasureSign::minus && !(t0 > sol.t_min())) continue;
        std::optional<MeasureEstimate> est[2];
        for (MeasureMethod m : {MeasureMethod::test_function, MeasureMethod::pushforward}) {
          try {
            MeasureEstimate e = sign == MeasureSign::plus ? mu_plus(sol, t0, B, m) : mu_minus(sol, t0, B, m);
            records.push_back(to_json(e));
            all.push_back(e);
            est[m == MeasureMethod::pushforward] = e;
          } catch (const std::exception& ex) {
            nlohmann::ordered_json j;
            j["t0"] = t0;
            j["B"] = bs;
            j["sign"] = to_string(sign);
            j["method"] = to_string(m);
            j["error"] = ex.what();
            records.push_back(j);
          }
        }
        const std::string tag = "[t0=" + format_double(t0) + ",B=" + bs + "," + to_string(sign) + "]";
        if (est[0] && est[1]) {
          const double d = std::abs(est[0]->value - est[1]->value);
          const double tol = std::max(0.02 * std::max(std::abs(est[0]->value), std::abs(est[1]->value)), 1e-4);
          rep.add({"method_agreement" + tag, "test-function and pushforward estimates agree", "0", d,
                   format_double(tol), d <= tol});
        }
        if (est[0]) {
          const double v = est[0]->value;
          const bool ok = sign == MeasureSign::plus ? v >= -1e-6 : v <= 1e-6;
          rep.add({"sign" + tag, sign == MeasureSign::plus ? "mu+ >= 0" : "mu- <= 0", "sign", v, "1e-6", ok});
        }
      }
    }
  }
  write_text(out + "/measures.json", records.dump(2) + "\n");
  write_text(out + "/measures.csv", measure_csv(all));
  write_text(out + "/report.json", rep.to_json().dump(2) + "\n");
  return rep;
}

}  // namespace chlab

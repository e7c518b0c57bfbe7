#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "chlab/field.hpp"
#include "chlab/scenario.hpp"

namespace chlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

std::string trajectory_csv(const Solution& sol, double t_from, double t_to, std::size_t samples, std::size_t n) {
  std::ostringstream os;
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",q_" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",p_" << i;
  os << "\n";
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t k = 0; k < samples; ++k) {
    const double t = k + 1 == samples ? t_to : t_from + (t_to - t_from) * static_cast<double>(k) / static_cast<double>(samples - 1);
    const PeakonState s = sol.at(t);
    os << format_double(t);
    // peakons that vanished in a collision are reported as nan
    for (std::size_t i = 0; i < n; ++i) os << "," << format_double(i < s.size() ? s.q()[i] : NAN);
    for (std::size_t i = 0; i < n; ++i) os << "," << format_double(i < s.size() ? s.p()[i] : NAN);
    os << "\n";
  }
  return os.str();
}

std::string ledger_csv(const EnergyLedger& led) {
  std::ostringstream os;
  os << "t,E,event,dE\n";
  std::size_t j = 0;
  for (std::size_t k = 0; k < led.t.size(); ++k) {
    while (j < led.jumps.size() && led.jumps[j].t < led.t[k]) {
      os << format_double(led.jumps[j].t) << ",," << led.jumps[j].event << "," << format_double(led.jumps[j].dE) << "\n";
      ++j;
    }
    os << format_double(led.t[k]) << "," << format_double(led.E[k]) << ",,0\n";
  }
  for (; j < led.jumps.size(); ++j)
    os << format_double(led.jumps[j].t) << ",," << led.jumps[j].event << "," << format_double(led.jumps[j].dE) << "\n";
  return os.str();
}

std::string char_csv(const CharPath& path) {
  std::ostringstream os;
  os << "t,zeta,u,v\n";
  for (std::size_t k = 0; k < path.size(); ++k)
    os << format_double(path.t[k]) << "," << format_double(path.zeta[k]) << "," << format_double(path.U[k]) << ","
       << format_double(path.v[k]) << "\n";
  return os.str();
}

nlohmann::ordered_json to_json(const MeasureEstimate& m) {
  nlohmann::ordered_json j;
  j["t0"] = m.t0;
  j["B"] = m.B;
  j["value"] = m.value;
  j["method"] = to_string(m.method);
  j["sign"] = to_string(m.sign);
  j["t_sequence"] = m.t_sequence;
  j["values"] = m.values;
  j["extrapolation_error"] = m.extrapolation_error;
  j["reliable"] = m.reliable;
  return j;
}

nlohmann::ordered_json to_json(const ConcentrationProfile& c) {
  nlohmann::ordered_json j;
  j["t0"] = c.t0;
  j["side"] = to_string(c.side);
  j["x_star"] = c.x_star;
  j["radii"] = c.radii;
  j["masses"] = c.masses;
  j["errors"] = c.errors;
  return j;
}

nlohmann::ordered_json to_json(const DissipationComparison& c) {
  nlohmann::ordered_json j;
  j["t0"] = c.t0;
  j["B"] = c.B;
  j["mu_plus"] = c.mu_plus;
  j["mu_plus_error"] = c.mu_plus_error;
  j["E_accreting"] = c.E_accreting;
  j["E_alternative"] = c.E_alternative;
  j["E_error"] = c.E_error;
  j["margin"] = c.margin;
  j["required_margin"] = c.required_margin;
  j["applicable"] = c.applicable;
  j["strict"] = c.strict;
  j["inconclusive"] = c.inconclusive;
  j["note"] = c.note;
  return j;
}

std::string measure_csv(const std::vector<MeasureEstimate>& ms) {
  std::ostringstream os;
  os << "t0,B,sign,method,value,extrapolation_error,reliable\n";
  for (const auto& m : ms)
    os << format_double(m.t0) << ",\"" << m.B << "\"," << to_string(m.sign) << "," << to_string(m.method) << ","
       << format_double(m.value) << "," << format_double(m.extrapolation_error) << "," << (m.reliable ? 1 : 0) << "\n";
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace chlab

// chlab command line: simulate, char, measure, verify, sweep.
#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <regex>
#include <thread>

#include "chlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace chlab;

namespace {

std::vector<std::string> expand_glob(const std::string& pattern) {
  const fs::path p(pattern);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::string rx;
  for (char c : p.filename().string()) {
    switch (c) {
      case '*': rx += ".*"; break;
      case '?': rx += "."; break;
      case '.': case '(': case ')': case '[': case ']': case '{': case '}': case '+': case '^': case '$': case '|': case '\\':
        rx += '\\';
        rx += c;
        break;
      default: rx += c;
    }
  }
  const std::regex re(rx);
  std::vector<std::string> out;
  if (fs::is_directory(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && std::regex_match(e.path().filename().string(), re)) out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

Scenario load_with_tol(const std::string& path, double tol) {
  Scenario s = load_scenario(path);
  if (tol > 0.0) s.ode_tol = tol;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Camassa-Holm peakon laboratory"};
  app.require_subcommand(1);
  std::uint64_t seed = VerifyOptions{}.seed;
  std::string out;
  double tol = 0.0;
  app.add_option("--seed", seed, "seed for randomized checks");
  app.add_option("--out", out, "output directory");
  app.add_option("--tol", tol, "ODE tolerance override");

  std::string config;
  auto* sim = app.add_subcommand("simulate", "run a scenario and write its artifacts");
  sim->add_option("config", config, "scenario JSON")->required();

  double zeta0 = 0.0;
  std::string t0_text, t1_text;  // numbers or T-expressions
  std::string side = "generic";
  auto* ch = app.add_subcommand("char", "integrate one characteristic and print CSV");
  ch->add_option("config", config, "scenario JSON")->required();
  ch->add_option("--zeta0", zeta0)->required();
  ch->add_option("--t0", t0_text, "start time (number or T-expression)")->required();
  ch->add_option("--t1", t1_text, "end time (number or T-expression)")->required();
  ch->add_option("--side", side, "generic | left | right")->check(CLI::IsMember({"generic", "left", "right"}));

  std::string interval, sign = "plus";
  auto* me = app.add_subcommand("measure", "estimate mu+ or mu- by both methods");
  me->add_option("config", config, "scenario JSON")->required();
  me->add_option("--t0", t0_text, "time (number or T-expression)")->required();
  me->add_option("--interval", interval, "a,b | [a,b] | (a,b) | {a} | unions")->required();
  me->add_option("--sign", sign)->check(CLI::IsMember({"plus", "minus"}));

  std::string suite = "all";
  auto* ve = app.add_subcommand("verify", "run the acceptance suite");
  ve->add_option("suite", suite, "oracle | characteristics | measures | prolongation | determinism | all");

  std::string pattern;
  auto* sw = app.add_subcommand("sweep", "run every scenario matching a glob");
  sw->add_option("pattern", pattern, "config glob, e.g. scenarios/*.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const Scenario s = load_with_tol(config, tol);
      const RunReport rep = run(s, out);
      std::cout << rep.table();
      return rep.ok() ? 0 : 1;
    }
    if (*ch) {
      const Scenario s = load_with_tol(config, tol);
      const BuiltScenario b = build_solution(s);
      const double t0 = parse_time(t0_text, s.analytic_T, "--t0"), t1 = parse_time(t1_text, s.analytic_T, "--t1");
      CharPath path;
      if (side == "generic") {
        path = integrate_char(*b.solution, t0, zeta0, t1);
      } else {
        ExtremalOptions eo;
        eo.delta_seq = s.delta_seq;
        path = extremal_char(*b.solution, t0, zeta0, t1, side == "left" ? Side::left : Side::right, eo).path;
      }
      const std::string csv = char_csv(path);
      if (out.empty()) std::cout << csv;
      else write_text(out + "/char.csv", csv);
      if (path.truncated) std::cerr << "path truncated at t=" << format_double(path.t_truncated) << "\n";
      return 0;
    }
    if (*me) {
      const Scenario s = load_with_tol(config, tol);
      const BuiltScenario b = build_solution(s);
      const double t0 = parse_time(t0_text, s.analytic_T, "--t0");
      const std::string text = interval.find_first_of("[({") == std::string::npos ? "[" + interval + "]" : interval;
      const IntervalSet B = IntervalSet::parse(text);
      auto arr = nlohmann::ordered_json::array();
      for (MeasureMethod m : {MeasureMethod::test_function, MeasureMethod::pushforward}) {
        const MeasureEstimate e =
            sign == "plus" ? mu_plus(*b.solution, t0, B, m) : mu_minus(*b.solution, t0, B, m);
        arr.push_back(to_json(e));
      }
      const std::string text_out = arr.dump(2) + "\n";
      if (out.empty()) std::cout << text_out;
      else write_text(out + "/measure.json", text_out);
      return 0;
    }
    if (*ve) {
      VerifyOptions vo;
      vo.seed = seed;
      if (tol > 0.0) vo.tol = tol;
      const RunReport rep = verify(suite, vo);
      std::cout << rep.table();
      if (!out.empty()) write_text(out + "/verify_" + suite + ".json", rep.to_json().dump(2) + "\n");
      return rep.ok() ? 0 : 1;
    }
    if (*sw) {
      const auto files = expand_glob(pattern);
      if (files.empty()) {
        std::cerr << "no scenario matches " << pattern << "\n";
        return 2;
      }
      std::vector<std::string> tables(files.size());
      std::vector<int> status(files.size(), 0);
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t k; (k = next++) < files.size();) {
          try {
            const Scenario s = load_with_tol(files[k], tol);
            const RunReport rep = run(s, out.empty() ? "" : out + "/" + s.name);
            tables[k] = rep.table();
            status[k] = rep.ok() ? 0 : 1;
          } catch (const std::exception& e) {
            tables[k] = files[k] + ": " + e.what() + "\n";
            status[k] = 2;
          }
        }
      };
      const unsigned n = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), files.size()));
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
      int rc = 0;
      for (std::size_t k = 0; k < files.size(); ++k) {
        std::cout << tables[k];
        rc = std::max(rc, status[k]);
      }
      return rc;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

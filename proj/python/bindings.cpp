#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chlab/characteristics.hpp"
#include "chlab/field.hpp"
#include "chlab/measures.hpp"
#include "chlab/peakon.hpp"
#include "chlab/prolongation.hpp"
#include "chlab/scenario.hpp"
#include "chlab/solution.hpp"

namespace py = pybind11;
using namespace chlab;

namespace {

// pybind holders cannot be shared_ptr<const T>
struct SolutionHandle {
  SolutionPtr ptr;
};

std::vector<double> vec(std::span<const double> s) { return {s.begin(), s.end()}; }

py::dict char_dict(const CharPath& c) {
  py::dict d;
  d["t"] = c.t;
  d["zeta"] = c.zeta;
  d["U"] = c.U;
  d["v"] = c.v;
  d["log_jacobian"] = c.log_jacobian;
  d["flavor"] = to_string(c.flavor);
  d["truncated"] = c.truncated;
  return d;
}

py::dict measure_dict(const MeasureEstimate& m) {
  py::dict d;
  d["t0"] = m.t0;
  d["B"] = m.B;
  d["value"] = m.value;
  d["method"] = to_string(m.method);
  d["sign"] = to_string(m.sign);
  d["t_sequence"] = m.t_sequence;
  d["values"] = m.values;
  d["extrapolation_error"] = m.extrapolation_error;
  d["reliable"] = m.reliable;
  d["vanishing"] = is_vanishing(m);
  return d;
}

py::dict ledger_dict(const EnergyLedger& l) {
  py::dict d;
  d["t"] = l.t;
  d["E"] = l.E;
  py::list jumps;
  for (const auto& j : l.jumps) jumps.append(py::dict(py::arg("t") = j.t, py::arg("dE") = j.dE, py::arg("event") = j.event));
  d["jumps"] = jumps;
  d["analytic_T"] = l.analytic_T ? py::cast(*l.analytic_T) : py::none();
  d["detected_T"] = l.detected_T;
  return d;
}

PairContinuation parse_continuation(const std::string& s) {
  if (s == "none") return PairContinuation::none;
  if (s == "reflection") return PairContinuation::reflection;
  if (s == "zero") return PairContinuation::zero;
  throw std::invalid_argument("continuation must be none, reflection or zero");
}

MeasureMethod parse_method(const std::string& s) {
  if (s == "test_function" || s == "testfn") return MeasureMethod::test_function;
  if (s == "pushforward") return MeasureMethod::pushforward;
  throw std::invalid_argument("method must be test_function or pushforward");
}

Side parse_side(const std::string& s) {
  if (s == "left") return Side::left;
  if (s == "right") return Side::right;
  throw std::invalid_argument("side must be left or right");
}

}  // namespace

PYBIND11_MODULE(_chlab, m) {
  m.doc() = "Peakon solutions of the Camassa-Holm equation: integration, characteristics, defect measures";

  py::register_exception<CollisionError>(m, "CollisionError", PyExc_RuntimeError);
  py::register_exception<UnsupportedPolicy>(m, "UnsupportedPolicy", PyExc_ValueError);
  py::register_exception<NonMonotoneFamily>(m, "NonMonotoneFamily", PyExc_RuntimeError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<PeakonState>(m, "PeakonState")
      .def(py::init<double, std::vector<double>, std::vector<double>>(), py::arg("t"), py::arg("q"), py::arg("p"))
      .def_property_readonly("t", &PeakonState::t)
      .def_property_readonly("q", [](const PeakonState& s) { return vec(s.q()); })
      .def_property_readonly("p", [](const PeakonState& s) { return vec(s.p()); })
      .def("__len__", &PeakonState::size)
      .def("__repr__", [](const PeakonState& s) {
        return "PeakonState(t=" + format_double(s.t()) + ", n=" + std::to_string(s.size()) + ")";
      });

  py::class_<ClosedFormPair>(m, "ClosedFormPair")
      .def_static("from_initial", &ClosedFormPair::from_initial, py::arg("p0"), py::arg("q0"))
      .def_readonly("p0", &ClosedFormPair::p0)
      .def_readonly("q0", &ClosedFormPair::q0)
      .def_readonly("H0", &ClosedFormPair::H0)
      .def_readonly("T", &ClosedFormPair::T)
      .def("momentum", &ClosedFormPair::momentum)
      .def("separation", &ClosedFormPair::separation)
      .def("invariant", &ClosedFormPair::invariant)
      .def("state", [](const ClosedFormPair& p, double t) { return closed_form_eval(p, t); });

  py::class_<SolutionHandle>(m, "Solution")
      .def("at", [](const SolutionHandle& h, double t) { return h.ptr->at(t); })
      .def("singular_times", [](const SolutionHandle& h) { return h.ptr->singular_times(); })
      .def_property_readonly("t_min", [](const SolutionHandle& h) { return h.ptr->t_min(); })
      .def_property_readonly("t_max", [](const SolutionHandle& h) { return h.ptr->t_max(); })
      .def("__repr__", [](const SolutionHandle& h) { return "Solution(" + h.ptr->describe() + ")"; });

  m.def("exact_pair", [](const ClosedFormPair& p, const std::string& cont, double shift) {
    return SolutionHandle{std::make_shared<ExactPairSolution>(p, parse_continuation(cont), shift)};
  }, py::arg("pair"), py::arg("continuation") = "reflection", py::arg("time_shift") = 0.0);
  m.def("zero_solution", [] { return SolutionHandle{std::make_shared<ZeroSolution>()}; });

  m.def("integrate", [](const PeakonState& s, double t_end, double tol, std::size_t samples) {
    IntegrateOptions io;
    io.tol = tol;
    const auto traj = integrate_trajectory(s, t_end, io);
    py::dict d;
    d["t_stop"] = traj.t_stop();
    d["final"] = traj.at(traj.t_stop());
    py::list states;
    for (std::size_t k = 0; k < samples; ++k)
      states.append(traj.at(traj.t_start() + (traj.t_stop() - traj.t_start()) * k / std::max<std::size_t>(1, samples - 1)));
    d["states"] = states;
    const auto r = integrate(s, t_end, io);
    if (const auto* ev = std::get_if<BreakingEvent>(&r))
      d["breaking"] = py::dict(py::arg("t_break") = ev->t_break, py::arg("gap") = ev->gap_at_stop,
                               py::arg("vmin") = ev->vmin_at_stop);
    else
      d["breaking"] = py::none();
    return d;
  }, py::arg("state"), py::arg("t_end"), py::arg("tol") = 1e-9, py::arg("samples") = 0);
  m.def("breaking_time_estimate", [](const PeakonState& s, double horizon) { return breaking_time_estimate(s, horizon); },
        py::arg("state"), py::arg("horizon") = 100.0);

  m.def("u", [](const PeakonState& s, std::vector<double> xs) {
    for (double& x : xs) x = eval_u(s, x);
    return xs;
  });
  m.def("ux", [](const PeakonState& s, std::vector<double> xs) {
    for (double& x : xs) x = eval_ux(s, x);
    return xs;
  });
  m.def("P_Px", [](const PeakonState& s, double x) { return eval_P_Px(s, x); });
  m.def("energy", [](const PeakonState& s, double a, double b) {
    const auto e = energy(s, a, b);
    py::dict d;
    d["total"] = e.total;
    d["on_interval"] = e.on_interval;
    d["neg_part"] = e.neg_part;
    d["pos_part"] = e.pos_part;
    return d;
  }, py::arg("state"), py::arg("a") = -kInf, py::arg("b") = kInf);
  m.def("max_abs_slope", &max_abs_slope);

  m.def("integrate_char", [](const SolutionHandle& h, double t0, double zeta0, double t1) {
    return char_dict(integrate_char(*h.ptr, t0, zeta0, t1));
  }, py::arg("solution"), py::arg("t0"), py::arg("zeta0"), py::arg("t1"));
  m.def("riccati_residual", [](const SolutionHandle& h, double t0, double zeta0, double t1) {
    return riccati_residual(integrate_char(*h.ptr, t0, zeta0, t1), *h.ptr);
  });
  m.def("extremal_char", [](const SolutionHandle& h, double t0, double zeta0, double t1, const std::string& side) {
    const auto e = extremal_char(*h.ptr, t0, zeta0, t1, parse_side(side));
    py::dict d = char_dict(e.path);
    d["deltas"] = e.deltas;
    d["extrapolation_error"] = e.extrapolation_error;
    d["monotone"] = e.monotone;
    return d;
  }, py::arg("solution"), py::arg("t0"), py::arg("zeta0"), py::arg("t1"), py::arg("side"));
  m.def("thick_pushforward", [](const SolutionHandle& h, double t0, const std::string& B, double t) {
    const auto pf = thick_pushforward(*h.ptr, t0, IntervalSet::parse(B), t);
    std::vector<std::pair<double, double>> out;
    for (const auto& p : pf.pieces) out.emplace_back(p.lo, p.hi);
    return out;
  });

  m.def("mu_plus", [](const SolutionHandle& h, double t0, const std::string& B, const std::string& method) {
    return measure_dict(mu_plus(*h.ptr, t0, IntervalSet::parse(B), parse_method(method)));
  }, py::arg("solution"), py::arg("t0"), py::arg("B"), py::arg("method") = "test_function");
  m.def("mu_minus", [](const SolutionHandle& h, double t0, const std::string& B, const std::string& method) {
    return measure_dict(mu_minus(*h.ptr, t0, IntervalSet::parse(B), parse_method(method)));
  }, py::arg("solution"), py::arg("t0"), py::arg("B"), py::arg("method") = "test_function");
  m.def("concentration_profile", [](const SolutionHandle& h, double t0, const std::string& side, double x_star,
                                    const std::vector<double>& radii) {
    const auto c = concentration_profile(*h.ptr, t0, side == "minus" ? MeasureSign::minus : MeasureSign::plus, x_star, radii);
    return py::dict(py::arg("radii") = c.radii, py::arg("masses") = c.masses, py::arg("errors") = c.errors);
  });
  m.def("atom_time_scan", [](const SolutionHandle& h, const std::vector<double>& ts, const std::string& B) {
    py::list out;
    for (const auto& e : atom_time_scan(*h.ptr, ts, IntervalSet::parse(B)))
      out.append(py::dict(py::arg("t") = e.t, py::arg("mu_plus") = e.mu_plus, py::arg("mu_minus") = e.mu_minus));
    return out;
  });

  m.def("prolong", [](const PeakonState& s, const std::string& policy, double t_end) {
    const auto r = prolong(s, {parse_policy(policy)}, t_end);
    py::dict d;
    d["solution"] = SolutionHandle{r.solution};
    d["ledger"] = ledger_dict(r.ledger);
    d["oleinik_constant"] = r.oleinik_constant ? py::cast(*r.oleinik_constant) : py::none();
    d["notes"] = r.notes;
    return d;
  }, py::arg("state"), py::arg("policy"), py::arg("t_end"));
  m.def("energy_ledger", [](const SolutionHandle& h, double a, double b, std::size_t n) {
    return ledger_dict(energy_ledger(*h.ptr, a, b, n));
  });
  m.def("pair_creation", [](const ClosedFormPair& p) {
    const auto pc = pair_creation_scenario(p);
    return py::make_tuple(SolutionHandle{pc.solution}, pc.C_tilde);
  });
  m.def("max_dissipation_compare", [](const SolutionHandle& acc, const SolutionHandle& alt, double t0, const std::string& B) {
    return to_json(max_dissipation_compare(*acc.ptr, *alt.ptr, t0, IntervalSet::parse(B))).dump();
  });

  m.def("run_scenario", [](const std::string& document, const std::string& out_dir) {
    return run(parse_scenario(document), out_dir).to_json().dump();
  }, py::arg("document"), py::arg("out_dir") = "");
  m.def("verify", [](const std::string& suite, std::uint64_t seed) {
    VerifyOptions vo;
    vo.seed = seed;
    return verify(suite, vo).to_json().dump();
  }, py::arg("suite") = "all", py::arg("seed") = VerifyOptions{}.seed);
}

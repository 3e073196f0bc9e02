// Python bindings for the core operations: expression parsing and calculus,
// Lie brackets, point classification, witness synthesis, and the sampled-data
// closed loop.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "liestab/config.hpp"
#include "liestab/verify.hpp"

namespace py = pybind11;
using namespace liestab;

namespace {

py::dict classification_dict(const Classification& cls) {
  py::dict d;
  d["tag"] = tag_name(cls.tag);
  d["N"] = cls.witness_order;
  py::dict diag;
  for (const auto& [k, v] : cls.diagnostics) diag[py::str(k)] = v;
  d["diagnostics"] = diag;
  return d;
}

py::dict witness_dict(const SynthOutcome& out) {
  py::dict d;
  d["found"] = out.ok();
  d["trials"] = out.trace.size();
  if (out.ok()) {
    const DecreaseWitness& w = *out.witness;
    py::list segs;
    for (const auto& s : w.schedule.segments) segs.append(py::make_tuple(s.duration, s.value));
    d["schedule"] = segs;
    d["v_start"] = w.v_start;
    d["v_end"] = w.v_end;
    d["v_max_along"] = w.v_max_along;
    d["u1"] = w.u1;
    d["rho"] = w.rho;
    d["phase_time"] = w.phase_time;
    d["classification"] = classification_dict(w.classification);
  } else {
    d["failure"] = out.failure;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_liestab, m) {
  m.doc() = "Lie-bracket stabilizability toolkit: symbolic brackets, state classification, "
            "Lyapunov-decrease synthesis and sampled-data simulation";

  py::register_exception<ParseError>(m, "ExpressionParseError");
  py::register_exception<PreconditionError>(m, "PreconditionError");

  py::class_<ScalarField>(m, "ScalarField")
      .def_property_readonly("dim", [](const ScalarField& f) { return f.dim; })
      .def("__str__", [](const ScalarField& f) { return to_string(f); })
      .def("__call__",
           [](const ScalarField& f, const std::vector<double>& x) { return evaluate(f, x); })
      .def("partial", [](const ScalarField& f, int i) { return partial(f, i); });

  m.def("parse", &liestab::parse, py::arg("source"), py::arg("dimension"),
        "Parse a scalar expression over x1..xn");

  py::class_<VectorField>(m, "VectorField")
      .def_property_readonly("dim", [](const VectorField& f) { return f.dim; })
      .def("__call__",
           [](const VectorField& f, const std::vector<double>& x) { return eval_field(f, x); })
      .def("__str__", [](const VectorField& f) {
        std::string s = "(";
        for (std::size_t i = 0; i < f.comp.size(); ++i) {
          if (i) s += ", ";
          s += to_string(f.comp[i]);
        }
        return s + ")";
      });

  m.def("vector_field", &make_vector_field, py::arg("dim"), py::arg("components"));
  m.def(
      "lie_bracket",
      [](const VectorField& X, const VectorField& Y) { return lie_bracket(X, Y); },
      "[X,Y] under the (DY)X - (DX)Y convention");
  m.def(
      "iterated_bracket",
      [](const VectorField& base, const VectorField& arm, int k) {
        return iterated_bracket(base, arm, k);
      },
      py::arg("base"), py::arg("arm"), py::arg("k"));
  m.def(
      "directional_derivative",
      [](const VectorField& X, const ScalarField& V) { return directional_derivative(X, V); });
  m.def("hall_basis_words", [](int max_order) {
    std::vector<std::pair<std::string, int>> out;
    for (const auto& w : hall_basis(max_order)) out.emplace_back(w.str(), w.order());
    return out;
  });

  py::class_<System>(m, "System")
      .def_property_readonly("dim", &System::dim)
      .def("V", [](const System& s, const std::vector<double>& x) { return s.v_at(x); });
  m.def("chain_power_system",
        [](int L, const std::string& a, const std::string& b) {
          return chain_power_system(L, a, b);
        },
        py::arg("L"), py::arg("a") = "1", py::arg("b") = "1",
        "dx1 = a x3^L, dx2 = b x3, dx3 = u with the canonical V");
  m.def("custom_system",
        [](int n, const std::vector<std::string>& f, const std::vector<std::string>& g,
           const std::string& V) {
          return System::make(make_vector_field(n, f), make_vector_field(n, g), parse(V, n));
        },
        py::arg("n"), py::arg("f"), py::arg("g"), py::arg("V"));

  py::class_<Classifier>(m, "Classifier")
      .def(py::init([](const System& sys) { return std::make_unique<Classifier>(sys); }))
      .def("classify",
           [](const Classifier& c, const std::vector<double>& x) {
             return classification_dict(c.classify_point(x));
           })
      .def("check_vanishing",
           [](const Classifier& c, const std::vector<double>& x, int N) {
             return c.check_vanishing(x, N).holds;
           })
      .def("scan",
           [](const Classifier& c, const std::vector<double>& lo, const std::vector<double>& hi,
              double step, double exclude_radius) {
             ScanReport rep = c.scan_region(GridSpec{lo, hi, step, exclude_radius});
             py::dict d;
             py::dict counts;
             for (const auto& [k, v] : rep.counts) counts[py::str(k)] = v;
             d["counts"] = counts;
             d["n_points"] = rep.points.size();
             d["n_unclassified"] = rep.unclassified.size();
             return d;
           },
           py::arg("lo"), py::arg("hi"), py::arg("step"), py::arg("exclude_radius") = 1e-6)
      .def("span_test", [](const Classifier& c, const std::vector<double>& x) {
        SpanTestResult r = c.span_test(x);
        py::dict d;
        d["holds"] = r.holds;
        d["span_full"] = r.span_full;
        d["det"] = r.det;
        d["gradient_nonzero"] = r.gradient_nonzero;
        d["lyapunov_implication"] = r.lyapunov_implication;
        return d;
      });

  m.def(
      "synthesize",
      [](const Classifier& c, const std::vector<double>& x0, double duration_cap) {
        return witness_dict(synthesize(c, x0, duration_cap, SynthParams{}));
      },
      py::arg("classifier"), py::arg("x0"), py::arg("duration_cap") = 0.25,
      "Search a control schedule certified to decrease V from x0");

  m.def(
      "m_value",
      [](const System& sys, const std::vector<double>& x0, double u1, double rho, double t) {
        return m_value(sys, x0, u1, rho, t);
      },
      py::arg("system"), py::arg("x0"), py::arg("u1"), py::arg("rho"), py::arg("t"),
      "V of the two-phase composed flow (negative t flows backward)");

  m.def(
      "run_closed_loop",
      [](const Classifier& c, const std::vector<double>& x0, double dt, double horizon) {
        Partition p;
        p.dt = dt;
        ClosedLoopOptions opts;
        opts.horizon = horizon;
        SampledTrajectory traj = run_closed_loop(c, x0, p, SynthParams{}, opts);
        py::dict d;
        d["reason"] = termination_name(traj.reason);
        d["final_time"] = traj.final_time;
        py::list samples;
        for (const auto& s : traj.samples) {
          py::dict e;
          e["t"] = s.t;
          e["x"] = s.x;
          e["V"] = s.v;
          e["tag"] = s.tag;
          e["N"] = s.witness_order;
          samples.append(e);
        }
        d["samples"] = samples;
        return d;
      },
      py::arg("classifier"), py::arg("x0"), py::arg("dt") = 0.25, py::arg("horizon") = 10.0);

  m.def(
      "bracket_regression",
      [](int L, const std::string& a, const std::string& b, int n_points, std::uint64_t seed) {
        RegressionReport rep = bracket_regression(L, a, b, n_points, seed);
        py::list checks;
        for (const auto& c : rep.checks)
          checks.append(py::make_tuple(c.name, c.max_diff, c.pass));
        return py::make_tuple(rep.all_pass(), checks);
      },
      py::arg("L"), py::arg("a") = "1", py::arg("b") = "1", py::arg("n_points") = 50,
      py::arg("seed") = 1);
}

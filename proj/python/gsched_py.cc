// Copyright 2026 The gsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Python bindings for the scheduling library.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "gsched/baselines.h"
#include "gsched/graph.h"
#include "gsched/legalize.h"
#include "gsched/optimizer.h"
#include "gsched/oracle.h"
#include "gsched/relax.h"
#include "gsched/schedule.h"
#include "gsched/workloads.h"

namespace py = pybind11;

namespace gsched {
namespace {

ProblemSpec MakeSpec(const std::string& form, int depth, int ii,
                     std::optional<int> cap, double alpha,
                     const std::string& dep_margin,
                     const std::string& rec_margin) {
  ProblemSpec spec;
  spec.formulation = ParseFormulation(form);
  spec.depth = depth;
  spec.ii = ii;
  spec.resource_cap = cap;
  spec.alpha = alpha;
  if (dep_margin == "latency") {
    spec.dep_margin = DepMargin::kLatency;
  } else if (dep_margin == "chaining") {
    spec.dep_margin = DepMargin::kChaining;
  } else {
    throw Error("unknown dep margin '" + dep_margin + "'");
  }
  if (rec_margin == "strict") {
    spec.rec_margin = RecMargin::kStrict;
  } else if (rec_margin == "start") {
    spec.rec_margin = RecMargin::kStart;
  } else {
    throw Error("unknown rec margin '" + rec_margin + "'");
  }
  return spec;
}

py::dict ReportDict(const FeasibilityReport& r) {
  py::dict d;
  d["feasible"] = r.feasible;
  d["dep_violations"] = r.dep_violations;
  d["lat_violations"] = r.lat_violations;
  d["rec_violations"] = r.rec_violations;
  d["res_violations"] = r.res_violations;
  return d;
}

py::dict TraceDict(const std::vector<TracePoint>& trace) {
  std::vector<int> iter;
  std::vector<double> wall_ms, total_loss, rounded_obj;
  std::vector<bool> feasible;
  std::vector<std::optional<double>> best;
  for (const TracePoint& tp : trace) {
    iter.push_back(tp.iter);
    wall_ms.push_back(tp.wall_ms);
    total_loss.push_back(tp.total_loss);
    rounded_obj.push_back(tp.rounded_obj);
    feasible.push_back(tp.feasible);
    best.push_back(tp.best_obj);
  }
  py::dict d;
  d["iter"] = iter;
  d["wall_ms"] = wall_ms;
  d["total_loss"] = total_loss;
  d["rounded_obj"] = rounded_obj;
  d["feasible"] = feasible;
  d["best_obj"] = best;
  return d;
}

}  // namespace
}  // namespace gsched

PYBIND11_MODULE(_core, m) {
  using namespace gsched;
  m.doc() = "Operator scheduling with a Gaussian relaxation";

  // Translators run newest first, so the base class is registered first.
  auto& base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<InfeasibleDepthError>(m, "InfeasibleDepthError",
                                               base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<Graph>(m, "Graph")
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def_property_readonly(
          "edges",
          [](const Graph& g) {
            std::vector<std::pair<int, int>> out;
            for (const Edge& e : g.edges()) out.emplace_back(e.producer, e.consumer);
            return out;
          })
      .def_property_readonly(
          "back_edges",
          [](const Graph& g) {
            std::vector<std::tuple<int, int, int>> out;
            for (const BackEdge& be : g.back_edges()) {
              out.emplace_back(be.consumer, be.producer, be.distance);
            }
            return out;
          })
      .def_property_readonly("has_sink", &Graph::has_explicit_sink)
      .def("to_json", [](const Graph& g) { return SerializeGraph(g); })
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph nodes=" + std::to_string(g.num_nodes()) +
               " edges=" + std::to_string(g.num_edges()) +
               " back_edges=" + std::to_string(g.back_edges().size()) + ">";
      });

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init(&MakeSpec), py::arg("form"), py::arg("depth"),
           py::arg("ii") = 0, py::arg("cap") = std::nullopt,
           py::arg("alpha") = 0.0, py::arg("dep_margin") = "latency",
           py::arg("rec_margin") = "strict")
      .def_property_readonly("form",
                             [](const ProblemSpec& s) {
                               return std::string(FormulationName(s.formulation));
                             })
      .def_readonly("depth", &ProblemSpec::depth)
      .def_readonly("ii", &ProblemSpec::ii)
      .def_readonly("cap", &ProblemSpec::resource_cap)
      .def_readonly("alpha", &ProblemSpec::alpha);

  m.def("parse_graph", &ParseGraph, py::arg("text"));
  m.def("read_graph", &ReadGraphFile, py::arg("path"));
  m.def("add_sink", &AddSink, py::arg("graph"));
  m.def("topo_order", &TopoOrder, py::arg("graph"));
  m.def("min_feasible_depth", &MinFeasibleDepth, py::arg("graph"));
  m.def(
      "compute_bounds",
      [](const Graph& g, int depth) {
        const DepthBounds b = ComputeBounds(g, depth);
        return py::make_tuple(b.asap, b.alap);
      },
      py::arg("graph"), py::arg("depth"));

  m.def(
      "check_feasible",
      [](const Graph& g, const std::vector<int>& steps, const ProblemSpec& s) {
        return ReportDict(CheckFeasible(g, Schedule{steps}, s));
      },
      py::arg("graph"), py::arg("steps"), py::arg("spec"));
  m.def(
      "eval_objective",
      [](const Graph& g, const std::vector<int>& steps, const ProblemSpec& s) {
        return EvalObjective(g, Schedule{steps}, s);
      },
      py::arg("graph"), py::arg("steps"), py::arg("spec"));
  m.def(
      "eval_resource",
      [](const Graph& g, const std::vector<int>& steps, int depth) {
        return EvalResource(g, Schedule{steps}, depth).values;
      },
      py::arg("graph"), py::arg("steps"), py::arg("depth"));
  m.def(
      "eval_memory",
      [](const Graph& g, const std::vector<int>& steps, int depth) {
        return EvalMemory(g, Schedule{steps}, depth).values;
      },
      py::arg("graph"), py::arg("steps"), py::arg("depth"));

  m.def(
      "step_prob",
      [](double mu, double sigma, int d, int depth) {
        return StepProb(GaussianParams({mu}, {sigma}), 0, d, depth);
      },
      py::arg("mu"), py::arg("sigma"), py::arg("d"), py::arg("depth"));

  m.def(
      "optimize",
      [](const Graph& g, const ProblemSpec& spec, int max_iters,
         double time_limit, int legalize_every, uint64_t seed, double lr,
         double rho, const std::string& init) {
        OptimizerConfig cfg;
        cfg.max_iters = max_iters;
        if (time_limit > 0) cfg.time_limit = time_limit;
        cfg.legalize_every = legalize_every;
        cfg.seed = seed;
        cfg.lr = lr;
        cfg.rho = rho;
        if (init == "list") {
          cfg.init = InitMode::kListSchedule;
        } else if (init != "midpoint") {
          throw Error("unknown init '" + init + "'");
        }
        OptimizeResult r;
        {
          py::gil_scoped_release release;
          r = Optimize(g, spec, cfg);
        }
        py::dict d;
        d["feasible"] = r.feasible();
        d["steps"] = r.best_schedule ? py::cast(r.best_schedule->steps)
                                     : py::none();
        d["objective"] = r.feasible() ? py::cast(r.best_objective) : py::none();
        d["iterations"] = r.iterations;
        d["wall_time"] = r.wall_time;
        d["num_trainable"] = r.num_trainable;
        d["last_report"] = ReportDict(r.last_report);
        d["trace"] = TraceDict(r.trace);
        return d;
      },
      py::arg("graph"), py::arg("spec"), py::arg("max_iters") = 5000,
      py::arg("time_limit") = 0.0, py::arg("legalize_every") = 50,
      py::arg("seed") = 0, py::arg("lr") = 1e-2, py::arg("rho") = 1e-4,
      py::arg("init") = "midpoint");

  m.def(
      "baseline",
      [](const std::string& method, const Graph& g, const ProblemSpec& spec) {
        const BaselineRun run = RunBaseline(ParseBaselineMethod(method), g, spec);
        py::dict d;
        const bool ok = run.outcome.ok() && run.report.feasible;
        d["feasible"] = ok;
        d["steps"] = run.outcome.ok() ? py::cast(run.outcome.schedule->steps)
                                      : py::none();
        d["objective"] = ok ? py::cast(run.objective) : py::none();
        d["failure"] = run.outcome.failure;
        return d;
      },
      py::arg("method"), py::arg("graph"), py::arg("spec"));

  m.def(
      "oracle",
      [](const Graph& g, const ProblemSpec& spec) {
        const OracleResult r = EnumerateOptimal(g, spec);
        py::dict d;
        d["feasible"] = r.feasible();
        d["steps"] = r.feasible() ? py::cast(r.schedule->steps) : py::none();
        d["objective"] = r.feasible() ? py::cast(r.objective) : py::none();
        return d;
      },
      py::arg("graph"), py::arg("spec"));

  m.def(
      "legalize_regular",
      [](const Graph& g, const std::vector<int>& steps, int depth) {
        return LegalizeRegular(g, Schedule{steps}, depth).steps;
      },
      py::arg("graph"), py::arg("steps"), py::arg("depth"));
  m.def(
      "legalize_modulo",
      [](const Graph& g, const std::vector<int>& steps, int depth, int ii)
          -> std::optional<std::vector<int>> {
        const ModuloLegalization r = LegalizeModulo(g, Schedule{steps}, depth, ii);
        if (!r.ok()) return std::nullopt;
        return r.schedule.steps;
      },
      py::arg("graph"), py::arg("steps"), py::arg("depth"), py::arg("ii"));

  m.def("generate_random_dag", &GenerateRandomDag, py::arg("nodes"),
        py::arg("depth"), py::arg("density"), py::arg("seed"));
  m.def("augment_back_edges", &AugmentBackEdges, py::arg("graph"),
        py::arg("ratio"), py::arg("max_distance") = kDefaultMaxDistance,
        py::arg("seed") = 0);
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cmath>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "deanon/analysis.hpp"
#include "deanon/ddm.hpp"
#include "deanon/errors.hpp"
#include "deanon/experiment.hpp"
#include "deanon/generators.hpp"
#include "deanon/graph_io.hpp"
#include "deanon/pgm.hpp"
#include "deanon/power_law.hpp"
#include "deanon/sampling.hpp"

namespace py = pybind11;
using namespace deanon;

namespace {

using PairList = std::vector<std::pair<VertexId, VertexId>>;

std::vector<VertexPair> to_pairs(const PairList& list) {
  std::vector<VertexPair> out;
  out.reserve(list.size());
  for (auto [a, b] : list) out.push_back({a, b});
  return out;
}

PairList from_pairs(const std::vector<VertexPair>& pairs) {
  PairList out;
  out.reserve(pairs.size());
  for (VertexPair p : pairs) out.emplace_back(p.a, p.b);
  return out;
}

// Matched pairs of a run together with their classification.
struct MatchResult {
  PairList pairs;
  std::vector<bool> is_seed;
  std::size_t good = 0;
  std::size_t bad = 0;
  std::size_t unmatched = 0;
  std::uint64_t steps = 0;
  std::uint64_t mark_increments = 0;
};

MatchResult summarize(const MatchState& state, const ObservedPair& pair) {
  MatchResult r;
  for (const auto& rec : state.matched()) {
    r.pairs.emplace_back(rec.pair.a, rec.pair.b);
    r.is_seed.push_back(rec.is_seed);
  }
  const MatchCounts c = classify_matches(state, pair.truth);
  r.good = c.good;
  r.bad = c.bad;
  r.unmatched = c.unmatched;
  r.steps = state.processed_count();
  r.mark_increments = state.mark_increments();
  return r;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Seed-based percolation matching of sampled social graphs";

  auto base = py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
  py::register_exception<UnreachableSeedsError>(m, "UnreachableSeedsError", base.ptr());
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<EstimationError>(m, "EstimationError", PyExc_ArithmeticError);

  py::class_<Graph>(m, "Graph")
      .def_static(
          "from_edges",
          [](std::size_t n, const std::vector<std::pair<VertexId, VertexId>>& edges) {
            std::vector<Edge> list;
            list.reserve(edges.size());
            for (auto [u, v] : edges) list.push_back({u, v});
            return Graph::from_edges(n, list);
          },
          py::arg("n"), py::arg("edges"))
      .def_property_readonly("num_vertices", &Graph::num_vertices)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("degree", &Graph::degree, py::arg("v"))
      .def("degrees", &Graph::degrees)
      .def("mean_degree", &Graph::mean_degree)
      .def("has_edge", &Graph::has_edge, py::arg("u"), py::arg("v"))
      .def("neighbors",
           [](const Graph& g, VertexId v) {
             const auto nb = g.neighbors(v);
             return std::vector<VertexId>(nb.begin(), nb.end());
           },
           py::arg("v"))
      .def("edges",
           [](const Graph& g) {
             std::vector<std::pair<VertexId, VertexId>> out;
             for (const Edge& e : g.edges()) out.emplace_back(e.u, e.v);
             return out;
           })
      .def("weights",
           [](const Graph& g) -> std::optional<std::vector<double>> {
             if (!g.has_weights()) return std::nullopt;
             const auto w = g.weights();
             return std::vector<double>(w.begin(), w.end());
           })
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; })
      .def("__repr__", [](const Graph& g) {
        return "<Graph n=" + std::to_string(g.num_vertices()) + " m=" + std::to_string(g.num_edges()) + ">";
      });

  m.def(
      "generate_chung_lu",
      [](std::size_t n, double beta, std::optional<double> w_bar, std::optional<double> mean_degree,
         std::optional<double> i0, std::uint64_t seed) {
        if (w_bar.has_value() == mean_degree.has_value()) {
          throw ParameterError("give exactly one of w_bar and mean_degree");
        }
        WeightedGraphSpec spec;
        spec.n = n;
        spec.beta = beta;
        spec.w_bar = w_bar ? *w_bar : calibrate_w_bar(n, beta, *mean_degree);
        spec.i0 = i0;
        spec.rng_seed = seed;
        return generate_chung_lu(spec);
      },
      py::arg("n"), py::arg("beta"), py::arg("w_bar") = py::none(), py::arg("mean_degree") = py::none(),
      py::arg("i0") = py::none(), py::arg("seed") = 1);
  m.def(
      "generate_gnp",
      [](std::size_t n, std::optional<double> p, std::optional<double> mean_degree, std::uint64_t seed) {
        if (p.has_value() == mean_degree.has_value()) throw ParameterError("give exactly one of p and mean_degree");
        return generate_gnp(n, p ? *p : gnp_probability_for_mean_degree(n, *mean_degree), seed);
      },
      py::arg("n"), py::arg("p") = py::none(), py::arg("mean_degree") = py::none(), py::arg("seed") = 1);
  m.def("calibrate_w_bar", &calibrate_w_bar, py::arg("n"), py::arg("beta"), py::arg("mean_degree"));

  py::class_<ObservedPair>(m, "ObservedPair")
      .def_readonly("g1", &ObservedPair::g1)
      .def_readonly("g2", &ObservedPair::g2)
      .def_readonly("truth", &ObservedPair::truth)
      .def_readonly("s", &ObservedPair::s)
      .def_property_readonly("num_vertices", &ObservedPair::num_vertices);
  m.def("sample_observed_pair", &sample_observed_pair, py::arg("ground"), py::arg("s"), py::arg("seed") = 1);

  m.def("load_graph", [](const std::filesystem::path& path) { return load_graph(path).graph; }, py::arg("path"));
  m.def("save_graph", [](const Graph& g, const std::filesystem::path& path) { save_graph(g, path); },
        py::arg("graph"), py::arg("path"));

  m.def(
      "select_seeds",
      [](const ObservedPair& pair, std::size_t count, const std::string& mode, std::optional<std::size_t> lo,
         std::optional<std::size_t> hi, std::uint64_t seed) {
        SeedPolicy policy;
        policy.count = count;
        policy.rng_seed = seed;
        if (mode == "window") {
          const double root = std::sqrt(static_cast<double>(pair.num_vertices()));
          policy.mode = SeedMode::degree_window;
          policy.degree_lo = lo.value_or(static_cast<std::size_t>(std::ceil(root / 2.0)));
          policy.degree_hi = hi.value_or(static_cast<std::size_t>(std::floor(root)));
        } else if (mode != "uniform") {
          throw ParameterError("mode must be 'uniform' or 'window'");
        }
        return from_pairs(select_seeds(pair, policy));
      },
      py::arg("pair"), py::arg("count"), py::arg("mode") = "uniform", py::arg("lo") = py::none(),
      py::arg("hi") = py::none(), py::arg("seed") = 1);

  py::class_<MatchResult>(m, "MatchResult")
      .def_readonly("pairs", &MatchResult::pairs)
      .def_readonly("is_seed", &MatchResult::is_seed)
      .def_readonly("good", &MatchResult::good)
      .def_readonly("bad", &MatchResult::bad)
      .def_readonly("unmatched", &MatchResult::unmatched)
      .def_readonly("steps", &MatchResult::steps)
      .def_readonly("mark_increments", &MatchResult::mark_increments)
      .def_property_readonly("matched", [](const MatchResult& r) { return r.good + r.bad; })
      .def("__repr__", [](const MatchResult& r) {
        return "<MatchResult good=" + std::to_string(r.good) + " bad=" + std::to_string(r.bad) + ">";
      });

  m.def(
      "run_pgm",
      [](const ObservedPair& pair, const PairList& seeds, std::uint32_t r, std::uint64_t seed, bool fifo) {
        const auto list = to_pairs(seeds);
        const PgmOptions options{r, fifo ? FrontierOrder::fifo : FrontierOrder::uniform_random, seed};
        MatchState state;
        {
          py::gil_scoped_release release;
          state = run_pgm(pair, list, options);
        }
        return summarize(state, pair);
      },
      py::arg("pair"), py::arg("seeds"), py::arg("r") = 4, py::arg("seed") = 0, py::arg("fifo") = false);

  m.def(
      "run_ddm",
      [](const ObservedPair& pair, const PairList& seeds, double beta, std::optional<double> w_bar, double gamma,
         const std::string& weights, const std::string& policy, std::uint64_t seed) {
        SlicePlanOptions o;
        o.n = pair.num_vertices();
        o.beta = beta;
        o.w_bar = w_bar ? *w_bar : pair.g1.mean_degree() / std::max(pair.s, 1e-12);
        o.s = pair.s;
        o.gamma = gamma;
        if (weights == "true") {
          o.mode = WeightMode::true_weight;
        } else if (weights != "estimated") {
          throw ParameterError("weights must be 'estimated' or 'true'");
        }
        ThresholdPolicy tp = ThresholdPolicy::exploratory;
        if (policy == "theory") {
          tp = ThresholdPolicy::theory;
          o.theory_mode = true;
        } else if (policy == "simplified") {
          tp = ThresholdPolicy::simplified;
        } else if (policy != "exploratory") {
          throw ParameterError("policy must be 'theory', 'exploratory' or 'simplified'");
        }
        const SlicePlan plan = build_slice_plan(o);
        const StagePlan stages = build_stage_plan(plan, tp);
        const auto list = to_pairs(seeds);
        DdmOptions options;
        options.rng_seed = seed;
        MatchState state;
        {
          py::gil_scoped_release release;
          state = run_ddm(pair, list, plan, stages, options).state;
        }
        return summarize(state, pair);
      },
      py::arg("pair"), py::arg("seeds"), py::arg("beta"), py::arg("w_bar") = py::none(), py::arg("gamma") = 0.45,
      py::arg("weights") = "estimated", py::arg("policy") = "exploratory", py::arg("seed") = 0);

  m.def(
      "critical_seed_count",
      [](std::size_t n, double p, double s, std::uint32_t r) {
        return critical_seed_count({.n = n, .p = p, .s = s, .r = r});
      },
      py::arg("n"), py::arg("p"), py::arg("s"), py::arg("r") = 4);
  m.def(
      "p1_seed_exponent",
      [](double gamma, double beta, std::uint32_t r) {
        const SeedExponent e = p1_seed_exponent(gamma, beta, r);
        return std::make_tuple(e.exponent, e.min_r);
      },
      py::arg("gamma"), py::arg("beta"), py::arg("r"));
  m.def(
      "boundary_edges",
      [](const ObservedPair& pair, const PairList& seeds) { return boundary_edges(pair, to_pairs(seeds)); },
      py::arg("pair"), py::arg("seeds"));
  m.def(
      "detect_transition",
      [](const std::vector<std::pair<double, double>>& curve) {
        std::vector<CurvePoint> pts;
        for (auto [a, v] : curve) pts.push_back({a, v});
        return detect_transition(pts);
      },
      py::arg("curve"));

  m.def(
      "estimate_power_law_exponent",
      [](const std::vector<std::size_t>& degrees, std::optional<double> d_min) {
        const PowerLawFit f = estimate_power_law_exponent(std::span<const std::size_t>(degrees), d_min);
        return std::make_tuple(f.exponent, f.d_min, f.tail_size);
      },
      py::arg("degrees"), py::arg("d_min") = py::none());
  m.def(
      "fit_power_law_tail",
      [](const std::vector<std::size_t>& degrees, std::size_t min_tail) {
        const PowerLawFit f = fit_power_law_tail(degrees, min_tail);
        return std::make_tuple(f.exponent, f.d_min, f.tail_size);
      },
      py::arg("degrees"), py::arg("min_tail") = 100);

  m.def(
      "run_sweep_config",
      [](const std::filesystem::path& config) {
        SweepResult r;
        const ExperimentConfig c = load_config(config);
        {
          py::gil_scoped_release release;
          r = run_sweep(c);
        }
        return py::dict(py::arg("rows_written") = r.rows_written, py::arg("rows_skipped") = r.rows_skipped,
                        py::arg("transition") = r.report.transition,
                        py::arg("median_transition") = r.report.median_transition);
      },
      py::arg("config"));
}

// Command-line front end: generation, sampling, single runs and sweeps.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
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

namespace {

using namespace deanon;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::vector<VertexPair> read_seed_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<VertexPair> seeds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line.rfind("g1_id", 0) == 0) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("no comma");
      std::size_t used = 0;
      const unsigned long a = std::stoul(line.substr(0, comma), &used);
      const unsigned long b = std::stoul(line.substr(comma + 1));
      seeds.push_back({static_cast<VertexId>(a), static_cast<VertexId>(b)});
    } catch (const std::exception&) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected 'g1_id,g2_id'");
    }
  }
  return seeds;
}

void write_seed_csv(const std::vector<VertexPair>& seeds, std::ostream& out) {
  out << "g1_id,g2_id\n";
  for (const auto& p : seeds) out << p.a << ',' << p.b << '\n';
}

void print_counts(const ObservedPair& pair, const MatchState& state, std::size_t seeds) {
  const RunMetrics m = compute_metrics(pair, state, seeds);
  std::cout << "good=" << m.good << " bad=" << m.bad << " unmatched=" << m.unmatched
            << " seeds=" << m.seeds_used << " steps=" << m.steps
            << " precision=" << m.precision() << " recall=" << m.recall() << '\n';
}

struct GenerateArgs {
  std::string model = "chung-lu";
  std::size_t n = 0;
  double beta = 2.5;
  std::optional<double> w_bar;
  std::optional<double> mean_degree;
  std::optional<double> i0;
  std::string from;
  std::string twin_kind = "gnp";
  std::uint64_t seed = 1;
  std::string out;
};

void cmd_generate(const GenerateArgs& a) {
  Graph g;
  if (a.model == "chung-lu") {
    WeightedGraphSpec spec;
    spec.n = a.n;
    spec.beta = a.beta;
    spec.i0 = a.i0;
    spec.rng_seed = a.seed;
    if (a.mean_degree) {
      spec.w_bar = calibrate_w_bar(a.n, a.beta, *a.mean_degree);
    } else if (a.w_bar) {
      spec.w_bar = *a.w_bar;
    }
    g = generate_chung_lu(spec);
  } else if (a.model == "gnp") {
    if (!a.mean_degree) throw ParameterError("gnp needs --mean-degree");
    g = generate_gnp(a.n, gnp_probability_for_mean_degree(a.n, *a.mean_degree), a.seed);
  } else if (a.model == "twin") {
    if (a.from.empty()) throw ParameterError("twin needs --from");
    const Graph src = load_graph(a.from).graph;
    const double mean = src.mean_degree();
    if (a.twin_kind == "gnp") {
      g = generate_gnp(src.num_vertices(), gnp_probability_for_mean_degree(src.num_vertices(), mean),
                       a.seed);
    } else {
      const auto degrees = src.degrees();
      const double beta = fit_power_law_tail(degrees).exponent;
      WeightedGraphSpec spec;
      spec.n = src.num_vertices();
      spec.beta = beta;
      spec.w_bar = calibrate_w_bar(spec.n, beta, mean);
      spec.rng_seed = a.seed;
      g = generate_chung_lu(spec);
      std::cerr << "twin: beta=" << beta << " mean_degree=" << mean << '\n';
    }
  } else {
    throw ParameterError("unknown model '" + a.model + "'");
  }
  save_graph(g, a.out);
  std::cout << "n=" << g.num_vertices() << " edges=" << g.num_edges()
            << " mean_degree=" << g.mean_degree() << '\n';
}

struct DdmArgs {
  std::string prefix;
  std::string seeds;
  double gamma = 0.5;
  double epsilon = 0.1;
  double density_constant = 1.0;
  std::optional<double> alpha_star;
  std::optional<double> beta;
  std::optional<double> w_bar;
  std::string weights = "estimated";
  bool theory = false;
  bool simplified = false;
  std::uint64_t seed = 0;
  std::string out;
  std::string trace;
};

void cmd_ddm(const DdmArgs& a) {
  const ObservedPair pair = load_observed_pair(a.prefix);
  const auto seeds = read_seed_csv(a.seeds);
  SlicePlanOptions o;
  o.n = pair.num_vertices();
  const auto degrees = pair.g1.degrees();
  o.beta = a.beta ? *a.beta
                  : fit_power_law_tail(degrees).exponent;
  o.w_bar = a.w_bar ? *a.w_bar : pair.g1.mean_degree() / std::max(pair.s, 1e-12);
  o.s = pair.s;
  o.gamma = a.gamma;
  o.epsilon = a.epsilon;
  o.density_constant = a.density_constant;
  o.alpha_star = a.alpha_star;
  o.mode = a.weights == "true" ? WeightMode::true_weight : WeightMode::estimated_weight;
  o.theory_mode = a.theory;
  const SlicePlan plan = build_slice_plan(o);
  for (const auto& w : plan.warnings) std::cerr << "warning: " << w << '\n';
  const auto policy = a.simplified ? ThresholdPolicy::simplified
                                   : (a.theory ? ThresholdPolicy::theory : ThresholdPolicy::exploratory);
  const StagePlan stages = build_stage_plan(plan, policy);
  DdmOptions options;
  options.rng_seed = a.seed;
  DdmOutcome outcome = run_ddm(pair, seeds, plan, stages, options);
  annotate_stage_counts(outcome, pair.truth);
  print_counts(pair, outcome.state, seeds.size());
  if (!a.out.empty()) {
    std::ofstream f(a.out);
    if (!f) throw DataError("cannot write " + a.out);
    write_matches_csv(outcome.state, f);
  }
  if (!a.trace.empty()) {
    std::ofstream f(a.trace);
    if (!f) throw DataError("cannot write " + a.trace);
    write_stage_trace_json(outcome, plan, f);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seed-based percolation matching of sampled social graphs"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a groundtruth graph");
  generate->add_option("--model", gen.model, "chung-lu | gnp | twin")
      ->check(CLI::IsMember({"chung-lu", "gnp", "twin"}));
  generate->add_option("--n", gen.n, "Vertex count");
  generate->add_option("--beta", gen.beta, "Power-law exponent");
  generate->add_option("--w-bar", gen.w_bar, "Nominal mean weight");
  generate->add_option("--mean-degree", gen.mean_degree, "Target mean degree");
  generate->add_option("--i0", gen.i0, "Index offset");
  generate->add_option("--from", gen.from, "Source graph for twin");
  generate->add_option("--twin-kind", gen.twin_kind, "gnp | chung-lu")
      ->check(CLI::IsMember({"gnp", "chung-lu"}));
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen.out, "Output (.bin cache or edge list)")->required();

  std::string sample_graph, sample_prefix;
  double sample_s = 0.8;
  std::uint64_t sample_seed = 1;
  auto* sample = app.add_subcommand("sample", "Sample two observed graphs");
  sample->add_option("--graph", sample_graph, "Groundtruth graph")->required();
  sample->add_option("--s", sample_s, "Edge retention probability")->required();
  sample->add_option("--seed", sample_seed, "RNG seed");
  sample->add_option("--prefix", sample_prefix, "Output prefix")->required();

  std::string seeds_prefix, seeds_mode = "uniform", seeds_out;
  std::size_t seeds_count = 0;
  std::optional<std::size_t> seeds_lo, seeds_hi;
  std::uint64_t seeds_seed = 1;
  auto* seeds_cmd = app.add_subcommand("seeds", "Draw a seed set");
  seeds_cmd->add_option("--prefix", seeds_prefix, "Observed pair prefix")->required();
  seeds_cmd->add_option("--mode", seeds_mode, "uniform | window")
      ->check(CLI::IsMember({"uniform", "window"}));
  seeds_cmd->add_option("--count", seeds_count, "Number of seeds")->required();
  seeds_cmd->add_option("--lo", seeds_lo, "Window lower degree (default sqrt(n)/2)");
  seeds_cmd->add_option("--hi", seeds_hi, "Window upper degree (default sqrt(n))");
  seeds_cmd->add_option("--seed", seeds_seed, "RNG seed");
  seeds_cmd->add_option("--out", seeds_out, "Seed CSV")->required();

  std::string pgm_prefix, pgm_seeds, pgm_out;
  std::uint32_t pgm_r = 4;
  std::uint64_t pgm_seed = 0;
  bool pgm_fifo = false;
  auto* pgm = app.add_subcommand("pgm", "Run percolation graph matching");
  pgm->add_option("--prefix", pgm_prefix, "Observed pair prefix")->required();
  pgm->add_option("--seeds", pgm_seeds, "Seed CSV")->required();
  pgm->add_option("--r", pgm_r, "Mark threshold");
  pgm->add_option("--seed", pgm_seed, "RNG seed");
  pgm->add_flag("--fifo", pgm_fifo, "Process pairs in admission order");
  pgm->add_option("--out", pgm_out, "Matches CSV");

  DdmArgs dargs;
  auto* ddm = app.add_subcommand("ddm", "Run degree-driven matching");
  ddm->add_option("--prefix", dargs.prefix, "Observed pair prefix")->required();
  ddm->add_option("--seeds", dargs.seeds, "Seed CSV")->required();
  ddm->add_option("--gamma", dargs.gamma, "First boundary exponent");
  ddm->add_option("--epsilon", dargs.epsilon, "Inner-region margin");
  ddm->add_option("--C", dargs.density_constant, "Density constant of the cascade cutoff");
  ddm->add_option("--alpha-star", dargs.alpha_star, "Cascade cutoff override");
  ddm->add_option("--beta", dargs.beta, "Exponent (default: estimated from g1)");
  ddm->add_option("--w-bar", dargs.w_bar, "Mean weight (default: mean g1 degree / s)");
  ddm->add_option("--weights", dargs.weights, "estimated | true")
      ->check(CLI::IsMember({"estimated", "true"}));
  ddm->add_flag("--theory", dargs.theory, "Enforce the proven parameter ranges");
  ddm->add_flag("--simplified", dargs.simplified, "Threshold 4 at every stage");
  ddm->add_option("--seed", dargs.seed, "RNG seed");
  ddm->add_option("--out", dargs.out, "Matches CSV");
  ddm->add_option("--trace", dargs.trace, "Stage trace JSON");

  std::string sweep_config, sweep_output;
  std::size_t sweep_workers = 0;
  auto* sweep = app.add_subcommand("sweep", "Seed-count sweep from a config file");
  sweep->add_option("--config", sweep_config, "key = value config")->required();
  sweep->add_option("--output", sweep_output, "Override results CSV");
  sweep->add_option("--workers", sweep_workers, "Worker threads (default DEANON_WORKERS or 1)");

  std::string analyze_results, analyze_json, analyze_curve;
  auto* analyze = app.add_subcommand("analyze", "Aggregate a results CSV");
  analyze->add_option("--results", analyze_results, "Results CSV")->required();
  analyze->add_option("--json", analyze_json, "Report JSON (default stdout)");
  analyze->add_option("--curve", analyze_curve, "Plot-ready curve CSV");

  std::string exponent_graph;
  std::optional<double> exponent_dmin;
  auto* exponent = app.add_subcommand("exponent", "Estimate the degree exponent of a graph");
  exponent->add_option("--graph", exponent_graph, "Graph file")->required();
  exponent->add_option("--d-min", exponent_dmin, "Tail start (default: Kolmogorov-Smirnov choice)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) {
      cmd_generate(gen);
    } else if (*sample) {
      const Graph g = load_graph(sample_graph).graph;
      const ObservedPair pair = sample_observed_pair(g, sample_s, sample_seed);
      save_observed_pair(pair, sample_prefix);
      std::cout << "g1_edges=" << pair.g1.num_edges() << " g2_edges=" << pair.g2.num_edges() << '\n';
    } else if (*seeds_cmd) {
      const ObservedPair pair = load_observed_pair(seeds_prefix);
      SeedPolicy policy;
      policy.count = seeds_count;
      policy.rng_seed = seeds_seed;
      if (seeds_mode == "window") {
        const double root = std::sqrt(static_cast<double>(pair.num_vertices()));
        policy.mode = SeedMode::degree_window;
        policy.degree_lo = seeds_lo.value_or(static_cast<std::size_t>(std::ceil(root / 2.0)));
        policy.degree_hi = seeds_hi.value_or(static_cast<std::size_t>(std::floor(root)));
      }
      const auto seeds = select_seeds(pair, policy);
      std::ofstream out(seeds_out);
      if (!out) throw DataError("cannot write " + seeds_out);
      write_seed_csv(seeds, out);
    } else if (*pgm) {
      const ObservedPair pair = load_observed_pair(pgm_prefix);
      const auto seeds = read_seed_csv(pgm_seeds);
      PgmOptions options{pgm_r, pgm_fifo ? FrontierOrder::fifo : FrontierOrder::uniform_random,
                         pgm_seed};
      const MatchState state = run_pgm(pair, seeds, options);
      print_counts(pair, state, seeds.size());
      if (!pgm_out.empty()) {
        std::ofstream out(pgm_out);
        if (!out) throw DataError("cannot write " + pgm_out);
        write_matches_csv(state, out);
      }
    } else if (*ddm) {
      cmd_ddm(dargs);
    } else if (*sweep) {
      ExperimentConfig config = load_config(sweep_config);
      if (!sweep_output.empty()) {
        config.output = sweep_output;
        config.summary = std::filesystem::path(sweep_output).replace_extension(".json");
      }
      if (sweep_workers > 0) config.workers = sweep_workers;
      const SweepResult r = run_sweep(config);
      std::cout << "rows_written=" << r.rows_written << " rows_resumed=" << r.rows_skipped;
      if (r.report.transition) std::cout << " transition=" << *r.report.transition;
      std::cout << '\n';
    } else if (*analyze) {
      std::ifstream in(analyze_results);
      if (!in) throw DataError("cannot open " + analyze_results);
      const auto report = analyze_rows(read_rows(in));
      if (analyze_json.empty()) {
        write_report_json(report, std::cout);
      } else {
        std::ofstream out(analyze_json);
        if (!out) throw DataError("cannot write " + analyze_json);
        write_report_json(report, out);
      }
      if (!analyze_curve.empty()) {
        std::ofstream out(analyze_curve);
        if (!out) throw DataError("cannot write " + analyze_curve);
        write_curve_csv(report, out);
      }
    } else if (*exponent) {
      const Graph g = load_graph(exponent_graph).graph;
      const auto degrees = g.degrees();
      const PowerLawFit fit =
          exponent_dmin
              ? estimate_power_law_exponent(std::span<const std::size_t>(degrees), exponent_dmin)
              : fit_power_law_tail(degrees);
      std::cout << "beta=" << fit.exponent << " d_min=" << fit.d_min << " tail=" << fit.tail_size
                << '\n';
    }
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const EstimationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}

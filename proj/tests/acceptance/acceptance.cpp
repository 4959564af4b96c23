// Acceptance suite: one PASS / FAIL / SKIP line per criterion.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "deanon/analysis.hpp"
#include "deanon/ddm.hpp"
#include "deanon/errors.hpp"
#include "deanon/experiment.hpp"
#include "deanon/generators.hpp"
#include "deanon/graph_io.hpp"
#include "deanon/oracle.hpp"
#include "deanon/power_law.hpp"
#include "deanon/random.hpp"
#include "deanon/sampling.hpp"
#include "test_support.hpp"

using namespace deanon;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Verdict {
  Status status = Status::fail;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict verdict(bool ok, std::string detail) {
  return {ok ? Status::pass : Status::fail, std::move(detail)};
}

void note(const std::string& line) {
  std::printf("    %s\n", line.c_str());
  std::fflush(stdout);
}

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::current_path() / "acceptance_work";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string show(const std::optional<double>& x) { return x ? fmt("%g", *x) : "none"; }

// Powers of sqrt(2), rounded, from 1 to `hi`.
std::vector<std::size_t> sqrt2_grid(std::size_t hi) {
  std::vector<std::size_t> g;
  for (int k = 0;; ++k) {
    const auto v = static_cast<std::size_t>(std::llround(std::pow(2.0, k / 2.0)));
    if (v > hi) break;
    if (g.empty() || v != g.back()) g.push_back(v);
  }
  return g;
}

SeriesReport sweep(ExperimentConfig c, const std::string& file) {
  c.output = work_dir() / (file + ".csv");
  c.summary = work_dir() / (file + ".json");
  fs::remove(c.output);
  return run_sweep(c).report;
}

// 1. Engine and exhaustive reference agree on small random instances.
Verdict oracle_equivalence() {
  Rng rng(77);
  const double s_values[] = {0.5, 0.7, 0.9, 1.0};
  int instances = 0;
  int mismatches = 0;
  int nontrivial = 0;
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = 2 + pick_index(rng, 29);
    const double p = 0.1 + 0.6 * uniform01(rng);
    const double s = s_values[pick_index(rng, 4)];
    const auto r = static_cast<std::uint32_t>(2 + pick_index(rng, 3));
    const std::size_t a0 = pick_index(rng, n + 1);
    const std::uint64_t seed = rng();
    const ObservedPair pair = testing::random_pair(n, p, s, seed);
    SeedPolicy policy;
    policy.count = a0;
    policy.rng_seed = derive_seed(seed, 7);
    const auto seeds = select_seeds(pair, policy);
    const auto order = i % 4 == 3 ? FrontierOrder::fifo : FrontierOrder::uniform_random;
    const MatchState engine = run_pgm(pair, seeds, {r, order, derive_seed(seed, 8)});
    const auto reference =
        oracle::run_pgm_reference(oracle::build_pairs_graph(pair), seeds, r, derive_seed(seed, 8), order);
    ++instances;
    mismatches += testing::matched_pairs(engine) != reference;
    nontrivial += reference.size() > seeds.size();
  }
  return verdict(instances >= 200 && mismatches == 0,
                 fmt("%d instances, %d mismatches, %d with matches beyond the seeds", instances,
                     mismatches, nontrivial));
}

// 2. Chung-Lu per-vertex mean degree against its binomial spread.
Verdict generator_fidelity() {
  const WeightedGraphSpec spec{.n = 10000, .beta = 2.5, .w_bar = 5.0, .i0 = std::nullopt, .rng_seed = 0};
  const auto w = weight_sequence(spec);
  const std::size_t n = w.size();
  double total = 0.0;
  for (double x : w) total += x;
  std::vector<double> var(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double p = std::min(1.0, w[i] * w[j] / total);
      var[i] += p * (1.0 - p);
    }
  }
  constexpr int graphs = 100;
  std::vector<double> sum(n, 0.0);
  bool weights_attached = true;
  for (int g = 0; g < graphs; ++g) {
    WeightedGraphSpec sg = spec;
    sg.rng_seed = derive_seed(2, g);
    const Graph graph = generate_chung_lu(sg);
    weights_attached = weights_attached && graph.has_weights() &&
                       std::equal(w.begin(), w.end(), graph.weights().begin());
    for (VertexId v = 0; v < n; ++v) sum[v] += static_cast<double>(graph.degree(v));
  }
  std::size_t within = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sigma = std::sqrt(var[i] / graphs);
    within += std::abs(sum[i] / graphs - w[i]) <= 3.0 * sigma;
  }
  const double frac = static_cast<double>(within) / static_cast<double>(n);
  const double w_max = *std::max_element(w.begin(), w.end());
  const double root = std::sqrt(static_cast<double>(n));
  return verdict(frac >= 0.99 && w_max <= root && weights_attached,
                 fmt("%.2f%% of vertices within 3 sigma; max weight %.3f <= sqrt(n) = %.1f", 100.0 * frac,
                     w_max, root));
}

// 3. Maximum-likelihood exponent on synthetic Pareto samples.
Verdict exponent_estimator() {
  double worst = 0.0;
  int reps = 0;
  for (double beta : {2.2, 2.5, 2.9}) {
    for (int rep = 0; rep < 20; ++rep) {
      Rng rng(derive_seed(static_cast<std::uint64_t>(beta * 1000), rep));
      std::vector<double> x(100000);
      for (auto& v : x) v = 50.0 * std::pow(uniform_open0(rng), -1.0 / (beta - 1.0));
      std::vector<double> sorted = x;
      std::nth_element(sorted.begin(), sorted.begin() + 1000, sorted.end());
      const auto fit = estimate_power_law_exponent(x, sorted[1000]);
      worst = std::max(worst, std::abs(fit.exponent - beta));
      ++reps;
    }
  }
  return verdict(worst <= 0.05, fmt("%d fits, largest |error| %.4f", reps, worst));
}

// 4. Detected G(n, p) transition against the critical seed count.
Verdict critical_count_check() {
  const std::size_t n = 10000;
  const double s = 0.8;
  const double p = 20.0 / (static_cast<double>(n) * s * s);
  const TheoryParams t{.n = n, .p = p, .s = s, .r = 4};
  const double a_c = critical_seed_count(t);
  const auto regime = check_critical_regime(t);
  note(fmt("p = %.6g, n p s^2 = 20, a_c = %.1f, above connectivity %d, below upper bound %d", p, a_c,
           regime.above_connectivity, regime.below_upper_bound));

  ExperimentConfig c;
  c.name = "gnp-theory";
  c.source = GraphSource::gnp;
  c.n = n;
  c.mean_degree = p * static_cast<double>(n - 1);
  c.s = s;
  c.grid = {32, 64, 96, 128, 160, 192, 224, 256, 320, 384, 448, 512, 640, 768, 1024};
  c.trials = 50;
  c.master_seed = 4;
  c.workers = resolve_workers(0);
  const auto rep = sweep(c, "criterion4");
  if (!rep.transition) return verdict(false, "no transition detected");
  const double ratio = *rep.transition / a_c;
  return verdict(ratio >= 0.5 && ratio <= 2.0,
                 fmt("transition %g (median over trials %s), a_c %.1f, ratio %.3f", *rep.transition,
                     show(rep.median_transition).c_str(), a_c, ratio));
}

struct SeparationRuns {
  SeriesReport gnp, uniform, selected;
};

const SeparationRuns& separation_runs() {
  static const SeparationRuns runs = [] {
    ExperimentConfig base;
    base.n = 100000;
    base.beta = 2.9;
    base.mean_degree = 25.0;
    base.s = 0.7;
    base.trials = 20;
    base.master_seed = 5;
    base.workers = resolve_workers(0);
    const auto grid = sqrt2_grid(16384);

    SeparationRuns out;
    ExperimentConfig g = base;
    g.name = "gnp-twin";
    g.source = GraphSource::gnp;
    g.algorithm = Algorithm::pgm;
    g.grid = grid;
    out.gnp = sweep(g, "criterion5_pgm_gnp");

    ExperimentConfig u = base;
    u.name = "chung-lu";
    u.algorithm = Algorithm::ddm;
    u.grid = grid;
    out.uniform = sweep(u, "criterion5_ddm_uniform");

    // Selected seeds: every grid point that each trial's sampled pair can supply.
    ExperimentConfig w = u;
    w.seed_mode = SeedMode::degree_window;
    const PreparedExperiment prepared = prepare_experiment(w);
    const double root = std::sqrt(static_cast<double>(w.n));
    const auto lo = static_cast<std::size_t>(std::ceil(root / 2.0));
    const auto hi = static_cast<std::size_t>(std::floor(root));
    w.grid.clear();
    for (std::size_t a0 : grid) {
      bool ok = true;
      for (std::size_t t = 0; t < w.trials && ok; ++t) {
        const auto pair = sample_observed_pair(prepared.ground, w.s,
                                               derive_seed(trial_seed(w.master_seed, a0, t), 1));
        std::size_t eligible = 0;
        for (VertexId a = 0; a < pair.num_vertices(); ++a) {
          const std::size_t d = pair.g1.degree(a);
          eligible += d >= lo && d <= hi;
        }
        ok = eligible >= a0;
      }
      if (!ok) break;
      w.grid.push_back(a0);
    }
    out.selected = sweep(w, "criterion5_ddm_selected");
    return out;
  }();
  return runs;
}

void describe(const SeriesReport& r) {
  std::ostringstream line;
  line << r.algorithm << '/' << r.graph << '/' << r.seed_policy << ": transition "
       << show(r.transition) << ", median " << show(r.median_transition) << ", curve";
  for (const auto& p : r.points) line << ' ' << p.a0 << ':' << std::llround(p.mean_matched);
  note(line.str());
}

// 5. Ten-fold seed reductions between the three matchers.
Verdict separation() {
  const auto& runs = separation_runs();
  describe(runs.gnp);
  describe(runs.uniform);
  describe(runs.selected);
  const auto& a = runs.gnp.median_transition;
  const auto& b = runs.uniform.median_transition;
  const auto& c = runs.selected.median_transition;
  if (!a || !b || !c) return verdict(false, "a median transition is missing");
  const double r1 = *a / *b;
  const double r2 = *b / *c;
  return verdict(r1 >= 10.0 && r2 >= 10.0,
                 fmt("pgm-gnp / ddm-uniform = %g / %g = %.2f; ddm-uniform / ddm-selected = %g / %g = %.2f",
                     *a, *b, r1, *b, *c, r2));
}

// 6. Bad-pair fraction at the transition.
Verdict error_suppression() {
  const auto& runs = separation_runs();
  const auto& u = runs.uniform.bad_fraction_at_transition;
  const auto& s = runs.selected.bad_fraction_at_transition;
  if (!u || !s) return verdict(false, "a transition is missing: uniform " + show(u) + ", selected " + show(s));
  return verdict(*u <= 0.01 && *s <= 0.01, fmt("uniform %.2e at %g, selected %.2e at %g", *u,
                                               *runs.uniform.transition, *s, *runs.selected.transition));
}

// 7. A handful of selected seeds on a heavy-tailed sparse graph.
Verdict few_seed_percolation() {
  ExperimentConfig c;
  c.name = "chung-lu-223";
  c.n = 100000;
  c.beta = 2.23;
  c.mean_degree = 6.0;
  c.s = 0.9;
  c.algorithm = Algorithm::ddm;
  c.seed_mode = SeedMode::degree_window;
  c.master_seed = 7;
  const PreparedExperiment prepared = prepare_experiment(c);
  const double need = 0.3 * static_cast<double>(c.n);
  bool ok = false;
  std::string detail;
  for (std::size_t a0 : {1, 2, 4, 8, 10}) {
    int hits = 0;
    double best = 0.0;
    for (std::size_t t = 0; t < 20; ++t) {
      const ResultRow row = run_trial(prepared, a0, t);
      hits += static_cast<double>(row.matched()) >= need;
      best = std::max(best, static_cast<double>(row.matched()));
    }
    note(fmt("a0 = %zu: %d / 20 trials reach 30%%, largest matched %.0f", a0, hits, best));
    if (hits >= 16) ok = true;
    detail = fmt("a0 = 10: %d / 20 trials reach %.0f matched", hits, need);
  }
  return verdict(ok, detail);
}

// 8. Structural invariants.
Verdict invariants() {
  bool all = true;
  auto sub = [&](const std::string& name, bool ok, const std::string& detail) {
    note(name + ": " + (ok ? "ok" : "VIOLATED") + " (" + detail + ")");
    all = all && ok;
  };

  {
    std::size_t runs = 0;
    std::size_t conflicts = 0;
    std::size_t unsound = 0;
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const Graph ground = generate_chung_lu({.n = 20000, .beta = 2.5, .w_bar = 12.0, .i0 = std::nullopt, .rng_seed = seed});
      const ObservedPair pair = sample_observed_pair(ground, 0.8, derive_seed(seed, 1));
      SlicePlanOptions o;
      o.n = pair.num_vertices();
      o.beta = 2.5;
      o.w_bar = 12.0;
      o.s = 0.8;
      o.gamma = 0.45;
      const SlicePlan plan = build_slice_plan(o);
      SeedPolicy policy;
      policy.count = 200 + 100 * seed;
      policy.rng_seed = seed;
      const auto seeds = select_seeds(pair, policy);
      for (auto tp : {ThresholdPolicy::theory, ThresholdPolicy::simplified}) {
        const DdmOutcome out = run_ddm(pair, seeds, plan, build_stage_plan(plan, tp), {.rng_seed = seed});
        ++runs;
        conflicts += !testing::conflict_free(out.state);
        unsound += testing::stage_soundness_violations(pair, out);
      }
      const MatchState pgm = run_pgm(pair, seeds, {.threshold = 4, .order = FrontierOrder::uniform_random, .rng_seed = seed});
      ++runs;
      conflicts += !testing::conflict_free(pgm);
      const testing::PairSet matched(testing::matched_pairs(pgm));
      for (const auto& rec : pgm.matched()) {
        unsound += !rec.is_seed && matched.neighbors_in(pair.g1, pair.g2, rec.pair) < 4;
      }
    }
    sub("conflict freedom", conflicts == 0, fmt("%zu runs, %zu with conflicts", runs, conflicts));
    sub("stage soundness replay", unsound == 0, fmt("%zu unsupported admissions", unsound));
  }

  {
    const std::size_t n = 100000;
    const double s = 0.8;
    const Graph ground = generate_chung_lu(
        {.n = n, .beta = 2.5, .w_bar = calibrate_w_bar(n, 2.5, 10.0), .i0 = std::nullopt, .rng_seed = 8});
    double w_bar = 0.0;
    for (double x : ground.weights()) w_bar += x;
    w_bar /= static_cast<double>(n);
    SlicePlanOptions o;
    o.n = n;
    o.beta = 2.5;
    o.w_bar = w_bar;
    o.s = s;
    const SlicePlan estimated = build_slice_plan(o);
    o.mode = WeightMode::true_weight;
    const SlicePlan truth = build_slice_plan(o);
    const StagePlan stages_e = build_stage_plan(estimated, ThresholdPolicy::simplified);
    const StagePlan stages_t = build_stage_plan(truth, ThresholdPolicy::simplified);
    std::size_t good_e = 0;
    std::size_t good_t = 0;
    for (std::uint64_t t = 0; t < 20; ++t) {
      const ObservedPair pair = sample_observed_pair(ground, s, derive_seed(80, t));
      const auto seeds = select_seeds(pair, {.mode = SeedMode::degree_window, .count = 128, .degree_lo = 158, .degree_hi = 316, .pairs = {}, .rng_seed = t});
      good_e += classify_matches(run_ddm(pair, seeds, estimated, stages_e, {.rng_seed = t}).state, pair.truth).good;
      good_t += classify_matches(run_ddm(pair, seeds, truth, stages_t, {.rng_seed = t}).state, pair.truth).good;
    }
    const double diff = std::abs(static_cast<double>(good_e) - static_cast<double>(good_t)) /
                        std::max<double>(1.0, static_cast<double>(good_t));
    sub("estimated vs true slicing", diff < 0.05 && good_t > 0,
        fmt("good matches over 20 trials: estimated %zu, true %zu, relative difference %.4f", good_e, good_t, diff));
  }

  {
    std::size_t checks = 0;
    std::size_t wrong = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const std::size_t n = 4 + seed % 12;
      const ObservedPair pair = testing::random_pair(n, 0.45, 0.8, seed);
      const auto pg = oracle::build_pairs_graph(pair);
      for (std::size_t a0 = 0; a0 <= n; ++a0) {
        SeedPolicy policy;
        policy.count = a0;
        policy.rng_seed = seed + a0;
        const auto seeds = select_seeds(pair, policy);
        ++checks;
        wrong += boundary_edges(pair, seeds) != oracle::boundary_edges_reference(pg, seeds);
      }
    }
    sub("boundary edges oracle", wrong == 0, fmt("%zu seed sets with n <= 15, %zu disagreements", checks, wrong));
  }

  {
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    };
    bool same = true;
    bool resumed = true;
    for (auto algorithm : {Algorithm::pgm, Algorithm::ddm}) {
      ExperimentConfig c;
      c.name = "determinism";
      c.n = 3000;
      c.beta = 2.5;
      c.mean_degree = 12.0;
      c.s = 0.8;
      c.algorithm = algorithm;
      c.gamma = 0.45;
      c.grid = {4, 16, 64, 256};
      c.trials = 3;
      c.master_seed = 21;
      c.workers = 1;
      const std::string tag = to_string(algorithm);
      c.output = work_dir() / ("det_" + tag + "_a.csv");
      c.summary = work_dir() / ("det_" + tag + "_a.json");
      fs::remove(c.output);
      run_sweep(c);
      const std::string first = slurp(c.output);
      auto d = c;
      d.output = work_dir() / ("det_" + tag + "_b.csv");
      d.summary = work_dir() / ("det_" + tag + "_b.json");
      d.workers = 2;
      fs::remove(d.output);
      run_sweep(d);
      same = same && slurp(d.output) == first && slurp(c.summary) == slurp(d.summary);
      {
        std::istringstream in(first);
        std::ofstream out(d.output, std::ios::trunc);
        std::string line;
        for (int i = 0; i < 7 && std::getline(in, line); ++i) out << line << '\n';
      }
      run_sweep(d);
      resumed = resumed && slurp(d.output) == first;
    }
    sub("sweep determinism", same, "two sweeps, one and two workers, byte-identical CSV and JSON");
    sub("resume identity", resumed, "truncated CSV resumed to the uninterrupted bytes");
  }
  return verdict(all, all ? "all suites hold" : "a suite is violated");
}

// 9. Real snapshots, when supplied.
Verdict real_snapshots() {
  const char* fb = std::getenv("DEANON_FACEBOOK_EDGES");
  const char* yt = std::getenv("DEANON_YOUTUBE_EDGES");
  if (!fb && !yt) return {Status::skip, "set DEANON_FACEBOOK_EDGES and/or DEANON_YOUTUBE_EDGES to edge-list paths"};
  bool ok = true;
  std::string detail;
  if (fb) {
    const Graph g = load_graph(fb).graph;
    const auto degrees = g.degrees();
    const double beta = fit_power_law_tail(degrees).exponent;
    ExperimentConfig c;
    c.name = "facebook";
    c.source = GraphSource::file;
    c.path = fb;
    c.s = 0.7;
    c.algorithm = Algorithm::ddm;
    c.seed_mode = SeedMode::degree_window;
    c.grid = {16, 32, 64, 128};
    c.trials = 5;
    c.workers = resolve_workers(0);
    const auto rep = sweep(c, "criterion9_facebook");
    const double plateau = rep.points.back().mean_matched;
    ok = ok && std::abs(beta - 2.9412) <= 0.01 && std::abs(plateau - 33000.0) <= 3300.0;
    detail += fmt("facebook: exponent %.4f, plateau %.0f matched; ", beta, plateau);
  }
  if (yt) {
    const Graph g = load_graph(yt).graph;
    const auto degrees = g.degrees();
    const double beta = fit_power_law_tail(degrees).exponent;
    ok = ok && std::abs(beta - 2.23) <= 0.01;
    detail += fmt("youtube: exponent %.4f", beta);
  }
  return verdict(ok, detail);
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {2, "generator fidelity", generator_fidelity},
      {3, "exponent estimator", exponent_estimator},
      {4, "critical seed count", critical_count_check},
      {5, "order-of-magnitude separation", separation},
      {6, "error suppression", error_suppression},
      {7, "few-seed percolation", few_seed_percolation},
      {8, "structural invariants", invariants},
      {9, "real snapshots", real_snapshots},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {Status::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const char* label = v.status == Status::pass ? "PASS" : v.status == Status::fail ? "FAIL" : "SKIP";
    std::printf("criterion %d %s: %s [%.1fs] %s\n", c.id, c.name, label, secs, v.detail.c_str());
    std::fflush(stdout);
    failed += v.status == Status::fail;
  }
  return failed == 0 ? 0 : 1;
}

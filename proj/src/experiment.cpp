#include "deanon/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "deanon/analysis.hpp"
#include "deanon/errors.hpp"
#include "deanon/generators.hpp"
#include "deanon/graph_io.hpp"
#include "deanon/power_law.hpp"
#include "deanon/random.hpp"
#include "deanon/sampling.hpp"

namespace deanon {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& text, const std::string& where) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) throw DataError(where + ": bad number '" + text + "'");
  return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw DataError(where + ": expected true/false, got '" + text + "'");
}

// "1,2,4,8" or "log2:lo:hi" (powers of two from lo to hi).
std::vector<std::size_t> parse_grid(const std::string& text, const std::string& where) {
  std::vector<std::size_t> grid;
  if (text.rfind("log2:", 0) == 0) {
    const auto rest = text.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw DataError(where + ": grid must be log2:lo:hi");
    const auto lo = parse_number<std::size_t>(trim(rest.substr(0, colon)), where);
    const auto hi = parse_number<std::size_t>(trim(rest.substr(colon + 1)), where);
    if (lo == 0 || lo > hi) throw DataError(where + ": log2 grid needs 0 < lo <= hi");
    for (std::size_t v = lo; v <= hi; v *= 2) grid.push_back(v);
    return grid;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) grid.push_back(parse_number<std::size_t>(trim(item), where));
  return grid;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv(const std::string& line, const std::string& where) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  if (quoted) throw DataError(where + ": unterminated quoted field");
  fields.push_back(std::move(cur));
  return fields;
}

std::optional<double> median(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::optional<double> transition_of(const std::vector<CurvePoint>& curve) {
  if (curve.size() < 4) return std::nullopt;
  return detect_transition(curve);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (source != GraphSource::file && n < 2) throw ParameterError("config: n must be >= 2");
  if (source == GraphSource::file && path.empty()) throw ParameterError("config: path is required");
  if (source == GraphSource::gnp && !mean_degree) {
    throw ParameterError("config: gnp needs mean_degree");
  }
  if (!(s >= 0.0 && s <= 1.0)) throw ParameterError("config: s must lie in [0, 1]");
  if (trials < 1) throw ParameterError("config: trials must be >= 1");
  if (grid.empty()) throw ParameterError("config: grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i] <= grid[i - 1]) throw ParameterError("config: grid must be strictly increasing");
  }
  if (threshold < 1) throw ParameterError("config: threshold must be >= 1");
  if (window_lo && window_hi && *window_lo > *window_hi) {
    throw ParameterError("config: window_lo exceeds window_hi");
  }
}

std::string ExperimentConfig::seed_policy_label() const {
  if (seed_mode == SeedMode::uniform) return "uniform";
  std::string label = "window";
  if (window_lo || window_hi) {
    label += ':' + (window_lo ? std::to_string(*window_lo) : std::string("auto")) + '-' +
             (window_hi ? std::to_string(*window_hi) : std::string("auto"));
  }
  return label;
}

const char* to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::pgm: return "pgm";
    case Algorithm::ddm: return "ddm";
    case Algorithm::ddm_simplified: return "ddm_simplified";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& text) {
  if (text == "pgm") return Algorithm::pgm;
  if (text == "ddm") return Algorithm::ddm;
  if (text == "ddm_simplified" || text == "ddm-simplified") return Algorithm::ddm_simplified;
  throw ParameterError("unknown algorithm '" + text + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  bool have_summary = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw DataError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    try {
      if (key == "name") {
        c.name = value;
      } else if (key == "graph") {
        if (value == "chung-lu" || value == "chung_lu") {
          c.source = GraphSource::chung_lu;
        } else if (value == "gnp") {
          c.source = GraphSource::gnp;
        } else if (value == "file") {
          c.source = GraphSource::file;
        } else {
          throw DataError(where + ": graph must be chung-lu, gnp or file");
        }
      } else if (key == "n") {
        c.n = parse_number<std::size_t>(value, where);
      } else if (key == "beta") {
        c.beta = parse_number<double>(value, where);
      } else if (key == "w_bar") {
        c.w_bar = parse_number<double>(value, where);
      } else if (key == "mean_degree") {
        c.mean_degree = parse_number<double>(value, where);
      } else if (key == "path") {
        c.path = value;
      } else if (key == "graph_seed") {
        c.graph_seed = parse_number<std::uint64_t>(value, where);
      } else if (key == "s") {
        c.s = parse_number<double>(value, where);
      } else if (key == "algorithm") {
        c.algorithm = parse_algorithm(value);
      } else if (key == "seeds") {
        if (value == "uniform") {
          c.seed_mode = SeedMode::uniform;
        } else if (value == "window" || value == "selected") {
          c.seed_mode = SeedMode::degree_window;
        } else {
          throw DataError(where + ": seeds must be uniform or window");
        }
      } else if (key == "window_lo") {
        c.window_lo = parse_number<std::size_t>(value, where);
      } else if (key == "window_hi") {
        c.window_hi = parse_number<std::size_t>(value, where);
      } else if (key == "grid") {
        c.grid = parse_grid(value, where);
      } else if (key == "trials") {
        c.trials = parse_number<std::size_t>(value, where);
      } else if (key == "seed") {
        c.master_seed = parse_number<std::uint64_t>(value, where);
      } else if (key == "threshold" || key == "r") {
        c.threshold = parse_number<std::uint32_t>(value, where);
      } else if (key == "gamma") {
        c.gamma = parse_number<double>(value, where);
      } else if (key == "epsilon") {
        c.epsilon = parse_number<double>(value, where);
      } else if (key == "density_constant" || key == "C") {
        c.density_constant = parse_number<double>(value, where);
      } else if (key == "alpha_star") {
        c.alpha_star = parse_number<double>(value, where);
      } else if (key == "weights") {
        if (value == "estimated") {
          c.weight_mode = WeightMode::estimated_weight;
        } else if (value == "true") {
          c.weight_mode = WeightMode::true_weight;
        } else {
          throw DataError(where + ": weights must be estimated or true");
        }
      } else if (key == "theory") {
        c.theory_mode = parse_bool(value, where);
      } else if (key == "output") {
        c.output = value;
      } else if (key == "summary") {
        c.summary = value;
        have_summary = true;
      } else if (key == "workers") {
        c.workers = parse_number<std::size_t>(value, where);
      } else {
        throw DataError(where + ": unknown key '" + key + "'");
      }
    } catch (const ParameterError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  if (!have_summary) c.summary = std::filesystem::path(c.output).replace_extension(".json");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  return parse_config(in);
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t a0, std::size_t trial) noexcept {
  return derive_seed(derive_seed(master, a0), trial);
}

void write_row(const ResultRow& r, std::ostream& out) {
  out << csv_field(r.algorithm) << ',' << csv_field(r.graph) << ',' << format_double(r.s) << ','
      << csv_field(r.seed_policy) << ',' << r.a0 << ',' << r.trial << ',' << r.good << ','
      << r.bad << ',' << r.unmatched << ',' << r.steps << ',' << r.seeds_used << '\n';
}

std::vector<ResultRow> read_rows(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = "results line " + std::to_string(line_no);
    if (!header) {
      if (line != kResultHeader) throw DataError(where + ": unexpected header '" + line + "'");
      header = true;
      continue;
    }
    const auto f = split_csv(line, where);
    if (f.size() != 11) {
      throw DataError(where + ": expected 11 fields, got " + std::to_string(f.size()));
    }
    ResultRow r;
    r.algorithm = f[0];
    r.graph = f[1];
    r.s = parse_number<double>(f[2], where);
    r.seed_policy = f[3];
    r.a0 = parse_number<std::size_t>(f[4], where);
    r.trial = parse_number<std::size_t>(f[5], where);
    r.good = parse_number<std::size_t>(f[6], where);
    r.bad = parse_number<std::size_t>(f[7], where);
    r.unmatched = parse_number<std::size_t>(f[8], where);
    r.steps = parse_number<std::uint64_t>(f[9], where);
    r.seeds_used = parse_number<std::size_t>(f[10], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

void sort_rows(std::vector<ResultRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
    return std::tie(x.algorithm, x.graph, x.s, x.seed_policy, x.a0, x.trial) <
           std::tie(y.algorithm, y.graph, y.s, y.seed_policy, y.a0, y.trial);
  });
}

Graph build_groundtruth(const ExperimentConfig& c) {
  switch (c.source) {
    case GraphSource::chung_lu: {
      WeightedGraphSpec spec;
      spec.n = c.n;
      spec.beta = c.beta;
      spec.rng_seed = c.graph_seed;
      if (c.mean_degree) {
        spec.w_bar = calibrate_w_bar(c.n, c.beta, *c.mean_degree);
      } else if (c.w_bar) {
        spec.w_bar = *c.w_bar;
      }
      return generate_chung_lu(spec);
    }
    case GraphSource::gnp:
      return generate_gnp(c.n, gnp_probability_for_mean_degree(c.n, *c.mean_degree), c.graph_seed);
    case GraphSource::file:
      return load_graph(c.path).graph;
  }
  throw ParameterError("unknown graph source");
}

PreparedExperiment prepare_experiment(const ExperimentConfig& config) {
  config.validate();
  PreparedExperiment p;
  p.config = config;
  p.ground = build_groundtruth(config);
  if (config.algorithm == Algorithm::pgm) return p;

  SlicePlanOptions o;
  o.n = p.ground.num_vertices();
  if (config.source == GraphSource::chung_lu) {
    o.beta = config.beta;
  } else {
    const auto degrees = p.ground.degrees();
    o.beta = fit_power_law_tail(degrees).exponent;
  }
  if (p.ground.has_weights()) {
    const auto w = p.ground.weights();
    double sum = 0.0;
    for (double x : w) sum += x;
    o.w_bar = sum / static_cast<double>(w.size());
  } else {
    o.w_bar = std::max(p.ground.mean_degree(), 1e-9);
  }
  o.s = config.s;
  o.gamma = config.gamma;
  o.epsilon = config.epsilon;
  o.density_constant = config.density_constant;
  o.alpha_star = config.alpha_star;
  o.mode = config.weight_mode;
  o.theory_mode = config.theory_mode;
  p.plan = build_slice_plan(o);
  const ThresholdPolicy policy = config.algorithm == Algorithm::ddm_simplified
                                     ? ThresholdPolicy::simplified
                                     : (config.theory_mode ? ThresholdPolicy::theory
                                                           : ThresholdPolicy::exploratory);
  p.stages = build_stage_plan(*p.plan, policy);
  return p;
}

ResultRow run_trial(const PreparedExperiment& prepared, std::size_t a0, std::size_t trial) {
  const auto& c = prepared.config;
  const std::uint64_t ts = trial_seed(c.master_seed, a0, trial);
  const ObservedPair pair = sample_observed_pair(prepared.ground, c.s, derive_seed(ts, 1));

  SeedPolicy policy;
  policy.mode = c.seed_mode;
  policy.count = a0;
  policy.rng_seed = derive_seed(ts, 2);
  if (c.seed_mode == SeedMode::degree_window) {
    const double root = std::sqrt(static_cast<double>(pair.num_vertices()));
    policy.degree_lo = c.window_lo.value_or(static_cast<std::size_t>(std::ceil(root / 2.0)));
    policy.degree_hi = c.window_hi.value_or(static_cast<std::size_t>(std::floor(root)));
  }
  const auto seeds = select_seeds(pair, policy);

  MatchState state;
  if (c.algorithm == Algorithm::pgm) {
    state = run_pgm(pair, seeds, {c.threshold, FrontierOrder::uniform_random, derive_seed(ts, 3)});
  } else {
    try {
      DdmOptions options;
      options.rng_seed = derive_seed(ts, 3);
      state = run_ddm(pair, seeds, *prepared.plan, *prepared.stages, options).state;
    } catch (const UnreachableSeedsError&) {
      // The staged matcher cannot start; only the seeds are matched.
      state = MatchState(pair.num_vertices(), pair.num_vertices());
      for (VertexPair p : seeds) state.try_admit({p, true, 0, 0});
    }
  }
  const MatchCounts counts = classify_matches(state, pair.truth);
  ResultRow row;
  row.algorithm = to_string(c.algorithm);
  row.graph = c.name;
  row.s = c.s;
  row.seed_policy = c.seed_policy_label();
  row.a0 = a0;
  row.trial = trial;
  row.good = counts.good;
  row.bad = counts.bad;
  row.unmatched = counts.unmatched;
  row.steps = state.processed_count();
  row.seeds_used = seeds.size();
  return row;
}

std::vector<SeriesReport> analyze_rows(const std::vector<ResultRow>& rows) {
  std::map<std::tuple<std::string, std::string, double, std::string>,
           std::map<std::size_t, std::vector<const ResultRow*>>>
      series;
  for (const auto& r : rows) {
    series[{r.algorithm, r.graph, r.s, r.seed_policy}][r.a0].push_back(&r);
  }
  std::vector<SeriesReport> out;
  for (const auto& [key, by_a0] : series) {
    SeriesReport rep;
    std::tie(rep.algorithm, rep.graph, rep.s, rep.seed_policy) = key;
    std::vector<CurvePoint> curve;
    std::size_t max_trial = 0;
    for (const auto& [a0, rs] : by_a0) {
      CurveStats st;
      st.a0 = a0;
      st.trials = rs.size();
      double good = 0.0;
      double bad = 0.0;
      for (const ResultRow* r : rs) {
        good += static_cast<double>(r->good);
        bad += static_cast<double>(r->bad);
        max_trial = std::max(max_trial, r->trial + 1);
      }
      st.mean_good = good / static_cast<double>(rs.size());
      st.mean_bad = bad / static_cast<double>(rs.size());
      st.mean_matched = st.mean_good + st.mean_bad;
      st.bad_fraction = good + bad > 0.0 ? bad / (good + bad) : 0.0;
      rep.points.push_back(st);
      curve.push_back({static_cast<double>(a0), st.mean_matched});
    }
    rep.transition = transition_of(curve);
    if (rep.transition) {
      for (const auto& st : rep.points) {
        if (static_cast<double>(st.a0) == *rep.transition) rep.bad_fraction_at_transition = st.bad_fraction;
      }
    }
    std::vector<double> detected;
    for (std::size_t t = 0; t < max_trial; ++t) {
      std::vector<CurvePoint> tc;
      for (const auto& [a0, rs] : by_a0) {
        for (const ResultRow* r : rs) {
          if (r->trial == t) tc.push_back({static_cast<double>(a0), static_cast<double>(r->matched())});
        }
      }
      auto tr = tc.size() == by_a0.size() ? transition_of(tc) : std::nullopt;
      rep.trial_transitions.push_back(tr);
      if (tr) detected.push_back(*tr);
    }
    rep.median_transition = median(detected);
    out.push_back(std::move(rep));
  }
  return out;
}

void write_report_json(const std::vector<SeriesReport>& report, std::ostream& out) {
  using nlohmann::json;
  auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
  json doc = json::array();
  for (const auto& rep : report) {
    json points = json::array();
    for (const auto& p : rep.points) {
      points.push_back({{"a0", p.a0},
                        {"trials", p.trials},
                        {"mean_good", p.mean_good},
                        {"mean_bad", p.mean_bad},
                        {"mean_matched", p.mean_matched},
                        {"bad_fraction", p.bad_fraction}});
    }
    json trials = json::array();
    for (const auto& t : rep.trial_transitions) trials.push_back(opt(t));
    doc.push_back({{"algorithm", rep.algorithm},
                   {"graph", rep.graph},
                   {"s", rep.s},
                   {"seed_policy", rep.seed_policy},
                   {"points", points},
                   {"transition", opt(rep.transition)},
                   {"bad_fraction_at_transition", opt(rep.bad_fraction_at_transition)},
                   {"trial_transitions", trials},
                   {"median_transition", opt(rep.median_transition)}});
  }
  out << doc.dump(2) << '\n';
}

void write_curve_csv(const std::vector<SeriesReport>& report, std::ostream& out) {
  out << "algorithm,graph,s,seed_policy,a0,trials,mean_good,mean_bad,mean_matched,bad_fraction\n";
  for (const auto& rep : report) {
    for (const auto& p : rep.points) {
      out << csv_field(rep.algorithm) << ',' << csv_field(rep.graph) << ',' << format_double(rep.s)
          << ',' << csv_field(rep.seed_policy) << ',' << p.a0 << ',' << p.trials << ','
          << format_double(p.mean_good) << ',' << format_double(p.mean_bad) << ','
          << format_double(p.mean_matched) << ',' << format_double(p.bad_fraction) << '\n';
    }
  }
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DEANON_WORKERS")) {
    std::size_t v = 0;
    const std::string s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc{} && ptr == s.data() + s.size() && v > 0) return v;
  }
  return 1;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  const PreparedExperiment prepared = prepare_experiment(config);
  const std::string algorithm = to_string(config.algorithm);
  const std::string policy = config.seed_policy_label();

  std::vector<ResultRow> existing;
  if (std::filesystem::exists(config.output)) {
    std::ifstream in(config.output);
    existing = read_rows(in);
  }
  std::set<std::pair<std::size_t, std::size_t>> done;
  for (const auto& r : existing) {
    if (r.algorithm != algorithm || r.graph != config.name || r.s != config.s ||
        r.seed_policy != policy) {
      throw DataError("resume conflict: " + config.output.string() +
                      " holds rows of a different series (" + r.algorithm + ", " + r.graph + ")");
    }
    if (!done.insert({r.a0, r.trial}).second) {
      throw DataError("resume conflict: duplicate row for a0=" + std::to_string(r.a0) +
                      " trial=" + std::to_string(r.trial));
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t a0 : config.grid) {
    for (std::size_t t = 0; t < config.trials; ++t) {
      if (!done.count({a0, t})) tasks.emplace_back(a0, t);
    }
  }

  SweepResult result;
  result.rows_skipped = existing.size();
  {
    const bool fresh = existing.empty();
    std::ofstream sink(config.output, fresh ? std::ios::trunc : std::ios::app);
    if (!sink) throw DataError("cannot write " + config.output.string());
    if (fresh) sink << kResultHeader << '\n' << std::flush;

    std::mutex sink_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    auto worker = [&] {
      while (!failed) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          const ResultRow row = run_trial(prepared, tasks[i].first, tasks[i].second);
          std::lock_guard lock(sink_mutex);
          write_row(row, sink);
          sink.flush();
          existing.push_back(row);
          ++result.rows_written;
        } catch (...) {
          std::lock_guard lock(sink_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    };
    const std::size_t workers = std::min(resolve_workers(config.workers), std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (error) std::rethrow_exception(error);
  }

  sort_rows(existing);
  const auto tmp = std::filesystem::path(config.output.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << kResultHeader << '\n';
    for (const auto& r : existing) write_row(r, out);
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, config.output);

  auto report = analyze_rows(existing);
  if (!report.empty()) result.report = report.front();
  if (!config.summary.empty()) {
    std::ofstream out(config.summary, std::ios::trunc);
    if (!out) throw DataError("cannot write " + config.summary.string());
    write_report_json(report, out);
  }
  return result;
}

}  // namespace deanon

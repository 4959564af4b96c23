#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "deanon/ddm.hpp"
#include "deanon/graph.hpp"
#include "deanon/pgm.hpp"

namespace deanon {

enum class GraphSource { chung_lu, gnp, file };
enum class Algorithm { pgm, ddm, ddm_simplified };

// One sweep: a fixed groundtruth graph, then for every (a0, trial) a fresh
// sampled pair, a fresh seed set and one matcher run.
struct ExperimentConfig {
  std::string name = "graph";
  GraphSource source = GraphSource::chung_lu;
  std::size_t n = 0;
  double beta = 2.5;
  std::optional<double> w_bar;        // chung_lu: nominal w_bar
  std::optional<double> mean_degree;  // chung_lu: calibrate w_bar; gnp: expected degree
  std::filesystem::path path;         // file source
  std::uint64_t graph_seed = 1;

  double s = 0.8;
  Algorithm algorithm = Algorithm::pgm;
  SeedMode seed_mode = SeedMode::uniform;
  std::optional<std::size_t> window_lo;  // default sqrt(n)/2
  std::optional<std::size_t> window_hi;  // default sqrt(n)
  std::vector<std::size_t> grid{1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  std::size_t trials = 1;
  std::uint64_t master_seed = 1;

  std::uint32_t threshold = 4;  // pgm
  double gamma = 0.5;
  double epsilon = 0.1;
  double density_constant = 1.0;
  std::optional<double> alpha_star;
  WeightMode weight_mode = WeightMode::estimated_weight;
  bool theory_mode = false;

  std::filesystem::path output = "sweep.csv";
  std::filesystem::path summary;  // default: output with ".json"
  std::size_t workers = 0;        // 0: DEANON_WORKERS or 1

  void validate() const;
  std::string seed_policy_label() const;
};

// key = value lines; '#' starts a comment. Unknown keys and malformed values
// throw DataError naming the line.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

const char* to_string(Algorithm a) noexcept;
Algorithm parse_algorithm(const std::string& text);

// Trial seed = derive_seed(derive_seed(master, a0), trial); the sampling, seed
// and run streams are derive_seed(trial seed, 1 / 2 / 3).
std::uint64_t trial_seed(std::uint64_t master, std::size_t a0, std::size_t trial) noexcept;

struct ResultRow {
  std::string algorithm;
  std::string graph;
  double s = 0.0;
  std::string seed_policy;
  std::size_t a0 = 0;
  std::size_t trial = 0;
  std::size_t good = 0;
  std::size_t bad = 0;
  std::size_t unmatched = 0;
  std::uint64_t steps = 0;
  std::size_t seeds_used = 0;

  std::size_t matched() const noexcept { return good + bad; }
};

inline constexpr const char* kResultHeader =
    "algorithm,graph,s,seed_policy,a0,trial,good,bad,unmatched,steps,seeds_used";
void write_row(const ResultRow& row, std::ostream& out);
// Rows of a results CSV (header required). Throws DataError with the line
// number of the first malformed row.
std::vector<ResultRow> read_rows(std::istream& in);
// By (algorithm, graph, s, seed_policy, a0, trial).
void sort_rows(std::vector<ResultRow>& rows);

// Groundtruth graph and slice plans shared by every trial of a sweep.
struct PreparedExperiment {
  ExperimentConfig config;
  Graph ground;
  std::optional<SlicePlan> plan;
  std::optional<StagePlan> stages;
};
PreparedExperiment prepare_experiment(const ExperimentConfig& config);
Graph build_groundtruth(const ExperimentConfig& config);

ResultRow run_trial(const PreparedExperiment& prepared, std::size_t a0, std::size_t trial);

struct CurveStats {
  std::size_t a0 = 0;
  std::size_t trials = 0;
  double mean_good = 0.0;
  double mean_bad = 0.0;
  double mean_matched = 0.0;
  double bad_fraction = 0.0;  // total bad / total matched over trials
};

// Aggregate of the rows of one (algorithm, graph, s, seed_policy) series.
struct SeriesReport {
  std::string algorithm;
  std::string graph;
  double s = 0.0;
  std::string seed_policy;
  std::vector<CurveStats> points;
  std::optional<double> transition;  // on the mean curve
  std::optional<double> bad_fraction_at_transition;
  std::vector<std::optional<double>> trial_transitions;  // by trial index
  std::optional<double> median_transition;               // over detected trials
};

std::vector<SeriesReport> analyze_rows(const std::vector<ResultRow>& rows);
void write_report_json(const std::vector<SeriesReport>& report, std::ostream& out);
// Plot-ready: one line per (series, a0).
void write_curve_csv(const std::vector<SeriesReport>& report, std::ostream& out);

struct SweepResult {
  std::size_t rows_written = 0;
  std::size_t rows_skipped = 0;  // already present (resume)
  SeriesReport report;
};

// Runs every missing (a0, trial) of the grid, appending rows to
// config.output as they complete, then rewrites it in canonical order and
// writes the summary JSON. Rows already in the file are kept; rows whose
// series labels differ from the config are a DataError.
SweepResult run_sweep(const ExperimentConfig& config);

// Worker count: explicit value, else DEANON_WORKERS, else 1.
std::size_t resolve_workers(std::size_t requested);

}  // namespace deanon

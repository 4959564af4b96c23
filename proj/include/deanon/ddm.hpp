#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deanon/pgm.hpp"
#include "deanon/sampling.hpp"

namespace deanon {

enum class WeightMode {
  true_weight,       // bin by the hidden generation weights (testing only)
  estimated_weight,  // bin by observed degree / s
};

enum class SliceKind {
  top,      // slice 0: [alpha_1, inf), matched last
  first,    // slice 1: where percolation starts
  cascade,  // upper bound above alpha*: one-shot matching with rho thresholds
  growth,   // alpha* >= upper bound >= log n: threshold 4
  bounded,  // upper bound < log n: threshold 4
};

struct SlicePlanOptions {
  std::size_t n = 0;
  double beta = 2.5;
  double w_bar = 5.0;
  double s = 1.0;
  double gamma = 0.5;
  double epsilon = 0.1;  // inner-region margin, in (0, 1/4]
  double density_constant = 1.0;
  std::optional<double> alpha_star;  // overrides the computed cutoff
  double alpha_floor = 1.0;
  WeightMode mode = WeightMode::estimated_weight;
  bool theory_mode = false;  // require 1/4 < gamma < 1/2 instead of warning
};

struct Slice {
  int index = 0;
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive; +inf for slice 0
  SliceKind kind = SliceKind::top;
};

// Weight slices: slice 0 = [alpha_1, inf), slice k = [alpha_{k+1}, alpha_k)
// with alpha_1 = n^gamma and alpha_{k+1} = alpha_k / 2, down to the first
// boundary <= alpha_floor. Weights below the last boundary are excluded.
struct SlicePlan {
  SlicePlanOptions options;
  double alpha0 = 0.0;              // sqrt(n)
  std::vector<double> boundaries;   // alpha_1 > alpha_2 > ... > alpha_K
  std::vector<Slice> slices;        // slices[k] for k = 0..K-1
  double alpha_star = 0.0;
  double log_n = 0.0;
  std::vector<std::string> warnings;

  std::size_t num_slices() const noexcept { return slices.size(); }
  double alpha(std::size_t k) const { return k == 0 ? alpha0 : boundaries.at(k - 1); }
  // Slice holding `weight`, or -1 when below the last boundary.
  int slice_of(double weight) const noexcept;
  // Slice-0 admission cut for the top candidate set: (alpha_1 + alpha_2) / 2.
  double top_cut() const noexcept;
};

// Throws ParameterError on invalid parameters, and on gamma outside
// (1/4, 1/2) in theory mode (a warning otherwise).
SlicePlan build_slice_plan(const SlicePlanOptions& options);

// max(4, alpha^(4-beta) / sqrt(n))
double stage_rho(double alpha, double beta, std::size_t n);
// Smallest integer strictly greater than x.
std::uint32_t strict_threshold(double x);

enum class ThresholdPolicy {
  theory,      // first slice uses the minimal r of the seed-exponent bound
  exploratory, // as theory when gamma is in (1/4, 1/2), otherwise 4
  simplified,  // 4 at every stage
};

struct StagePlan {
  std::uint32_t first_threshold = 4;
  std::vector<std::uint32_t> slice_thresholds;  // by slice; [0] is the top stage
  std::vector<double> rho;                      // rho(alpha_k) by slice, [0] = n^(gamma/2)
  std::uint32_t low_threshold = 4;
  std::uint32_t top_threshold = 4;
  ThresholdPolicy policy = ThresholdPolicy::exploratory;
};

// Cascade slice k uses strict_threshold(rho(alpha_{k-1})); growth and bounded
// slices use 4; the top stage uses strict_threshold(n^(gamma/2)).
StagePlan build_stage_plan(const SlicePlan& plan, ThresholdPolicy policy,
                           std::optional<std::uint32_t> first_threshold = std::nullopt);

enum class Region : std::uint8_t { inner, outer, excluded };

// Per-vertex slice and region for both graphs.
struct SliceAssignment {
  std::vector<double> weight1, weight2;  // weight used for binning
  std::vector<int> slice1, slice2;       // -1 when excluded
  std::vector<Region> region1, region2;

  // Slice k if both endpoints are in slice k and one of them is inner,
  // otherwise -1.
  int eligible_slice(VertexPair p) const noexcept {
    const int k = slice1[p.a];
    if (k < 0 || k != slice2[p.b]) return -1;
    if (region1[p.a] != Region::inner && region2[p.b] != Region::inner) return -1;
    return k;
  }
};

// Estimated mode bins w = degree / s; true-weight mode needs weights on both
// graphs and marks every binned vertex inner. Throws ParameterError for
// s = 0 in estimated mode or missing weights in true-weight mode.
SliceAssignment assign_slices(const ObservedPair& pair, const SlicePlan& plan);

// Seeds in slices 2.. are packed into groups of ceil(alpha_1 / alpha_{k+1}) + 1
// in sorted order; each group is one atomic frontier element. Every other
// seed, and the remainder of each slice, forms a group of one.
std::vector<std::vector<VertexPair>> group_uniform_seeds(std::span<const VertexPair> seeds,
                                                         const SlicePlan& plan,
                                                         const SliceAssignment& assignment);

enum class StageKind { first, cascade, low, top };

struct StageTrace {
  StageKind kind = StageKind::first;
  int slice = 1;
  double lo = 0.0;
  double hi = 0.0;
  std::uint32_t threshold = 0;
  std::size_t reference_size = 0;
  std::size_t admitted = 0;
  std::size_t core_size = 0;
  std::uint64_t rounds = 0;
  // Filled by annotate_stage_counts.
  std::size_t admitted_good = 0;
  std::size_t admitted_bad = 0;
  std::size_t cumulative_good = 0;
  std::size_t cumulative_bad = 0;
};

struct DdmOptions {
  FrontierOrder order = FrontierOrder::uniform_random;
  std::uint64_t rng_seed = 0;
  bool group_seeds = true;
};

struct DdmOutcome {
  MatchState state;
  std::vector<StageTrace> stages;
  // stage index of every record in state.matched(); -1 for seeds.
  std::vector<int> match_stage;
  // Pairs each stage counted marks from. A non-seed match of stage i has at
  // least stages[i].threshold pairs-graph neighbors in references[i].
  std::vector<std::vector<VertexPair>> references;
};

// Staged matcher:
//  1. percolation restricted to slice-1 eligible pairs, seeded with all seeds;
//  2. for each cascade slice k, one-shot matching of free pairs with both
//     weights below alpha_{k-1} that have enough neighbors in the previous
//     stage's core (its slice-eligible matches);
//  3. rounds at threshold 4 from a growing reference set (last core plus all
//     seeds, then every pair matched here) until no pair is admitted;
//  4. one-shot matching of top candidates (a weight above top_cut, not slice-1
//     eligible) against the core of the largest slice with
//     log n < alpha_k < log^2 n.
// Stages 2 and 3 never admit top candidates or slice-1 eligible pairs. One-shot
// admissions go by descending mark count, then (a, b). Throws
// UnreachableSeedsError when seeds are given but none lies in a slice.
DdmOutcome run_ddm(const ObservedPair& pair, std::span<const VertexPair> seeds,
                   const SlicePlan& plan, const StagePlan& stages, const DdmOptions& options);

void annotate_stage_counts(DdmOutcome& outcome, std::span<const VertexId> truth);

// JSON object holding the slice plan and one entry per stage.
void write_stage_trace_json(const DdmOutcome& outcome, const SlicePlan& plan, std::ostream& out);

const char* to_string(StageKind kind) noexcept;
const char* to_string(SliceKind kind) noexcept;

}  // namespace deanon

#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "deanon/graph.hpp"
#include "deanon/sampling.hpp"

namespace deanon {

// Candidate correspondence between vertex `a` of g1 and vertex `b` of g2.
// Ordering is lexicographic on (a, b).
struct VertexPair {
  VertexId a = 0;
  VertexId b = 0;
  friend auto operator<=>(const VertexPair&, const VertexPair&) = default;
};

struct MatchRecord {
  VertexPair pair;
  bool is_seed = false;
  std::uint32_t marks_at_match = 0;
  std::uint64_t step_index = 0;  // processed count when admitted; 0 for seeds
};

// Matched pairs plus the conflict index over both vertex sets.
//
// No two matched pairs share a g1 vertex or a g2 vertex. Records are kept in
// admission order.
class MatchState {
 public:
  MatchState() = default;
  MatchState(std::size_t n1, std::size_t n2) : used1_(n1, 0), used2_(n2, 0) {}

  std::span<const MatchRecord> matched() const noexcept { return matched_; }
  std::size_t size() const noexcept { return matched_.size(); }
  bool used_g1(VertexId a) const noexcept { return used1_[a] != 0; }
  bool used_g2(VertexId b) const noexcept { return used2_[b] != 0; }
  bool can_admit(VertexPair p) const noexcept { return !used1_[p.a] && !used2_[p.b]; }

  // Admits the record unless it conflicts with (or repeats) a matched pair.
  bool try_admit(const MatchRecord& record);

  std::uint64_t processed_count() const noexcept { return processed_; }
  std::uint64_t mark_increments() const noexcept { return mark_increments_; }
  std::size_t peak_counters() const noexcept { return peak_counters_; }

  std::size_t num_vertices_g1() const noexcept { return used1_.size(); }
  std::size_t num_vertices_g2() const noexcept { return used2_.size(); }

  // Engine bookkeeping.
  void count_step() noexcept { ++processed_; }
  void add_mark_increments(std::uint64_t k) noexcept { mark_increments_ += k; }
  void note_counters(std::size_t live) noexcept {
    if (live > peak_counters_) peak_counters_ = live;
  }

 private:
  std::vector<MatchRecord> matched_;
  std::vector<char> used1_;
  std::vector<char> used2_;
  std::uint64_t processed_ = 0;
  std::uint64_t mark_increments_ = 0;
  std::size_t peak_counters_ = 0;
};

enum class FrontierOrder {
  uniform_random,  // pick the next pair to process uniformly (default)
  fifo,            // process in admission order; for debugging
};

struct PgmOptions {
  std::uint32_t threshold = 4;
  FrontierOrder order = FrontierOrder::uniform_random;
  std::uint64_t rng_seed = 0;
};

// Sorts, deduplicates and validates a seed list. Throws ParameterError if
// two seeds conflict or an id is out of range.
std::vector<VertexPair> normalize_seeds(std::span<const VertexPair> seeds, std::size_t n1,
                                        std::size_t n2);

// Percolation graph matching over the implicit pairs graph of (g1, g2).
//
// Seeds are matched up front. Each iteration takes one matched but
// unprocessed pair [u1,u2] and adds a mark to every (v1,v2) in
// adj1(u1) x adj2(u2) whose endpoints are both unmatched. Pairs whose counter
// hits the threshold in that iteration are admitted in ascending (a,b) order,
// skipping any that conflicts with a pair matched so far; skipped pairs are
// never retried. Stops when every matched pair has been processed.
//
// Counters are only kept for pairs with two free endpoints, so memory is
// O(total marks) and never O(n^2). One iteration costs deg1(u1)*deg2(u2).
MatchState run_pgm(const Graph& g1, const Graph& g2, std::span<const VertexPair> seeds,
                   const PgmOptions& options);
inline MatchState run_pgm(const ObservedPair& pair, std::span<const VertexPair> seeds,
                          const PgmOptions& options) {
  return run_pgm(pair.g1, pair.g2, seeds, options);
}

enum class SeedMode { uniform, degree_window, explicit_list };

struct SeedPolicy {
  SeedMode mode = SeedMode::uniform;
  std::size_t count = 0;
  std::size_t degree_lo = 0;  // degree_window: observed g1 degree bounds, inclusive
  std::size_t degree_hi = 0;
  std::vector<VertexPair> pairs;  // explicit_list
  std::uint64_t rng_seed = 0;
};

// Draws `count` distinct good pairs (explicit mode: validates and returns the
// given list). Returned seeds are sorted by (a, b). Throws ParameterError
// naming the eligible count when too few pairs qualify.
std::vector<VertexPair> select_seeds(const ObservedPair& pair, const SeedPolicy& policy);

struct MatchCounts {
  std::size_t good = 0;
  std::size_t bad = 0;
  std::size_t unmatched = 0;
};

MatchCounts classify_matches(const MatchState& state, std::span<const VertexId> truth);

// CSV with header g1_id,g2_id,is_seed,marks_at_match,step_index.
void write_matches_csv(const MatchState& state, std::ostream& out);

}  // namespace deanon

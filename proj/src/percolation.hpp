#pragma once

// Mark-propagation core shared by the PGM and DDM engines.

#include <absl/container/flat_hash_map.h>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "deanon/graph.hpp"
#include "deanon/pgm.hpp"
#include "deanon/random.hpp"

namespace deanon::detail {

// Packs a pair so that integer order equals (a, b) lexicographic order.
constexpr std::uint64_t pair_key(VertexId a, VertexId b) noexcept {
  return (std::uint64_t{a} << 32) | b;
}
constexpr VertexPair unpack_key(std::uint64_t key) noexcept {
  return {static_cast<VertexId>(key >> 32), static_cast<VertexId>(key & 0xFFFFFFFFu)};
}

// Sparse mark counters keyed by pair_key. When both vertex ids and every
// possible count fit in one word (3 * id bits <= 64; a count never exceeds a
// degree, so it is below n), entries are packed as a | b | count in a
// linear-probing table of 64-bit words, 0 meaning empty. Larger graphs use a
// hash map.
class MarkTable {
 public:
  MarkTable(std::size_t n1, std::size_t n2) {
    const std::size_t n = std::max<std::size_t>({n1, n2, 2});
    id_bits_ = static_cast<unsigned>(std::bit_width(n - 1));
    packed_ = 3 * id_bits_ <= 64;
    count_bits_ = 64 - 2 * id_bits_;
    if (packed_) slots_.assign(std::size_t{1} << kMinLog, 0);
    log_capacity_ = kMinLog;
  }

  // Adds one mark and returns the new count.
  std::uint32_t increment(std::uint64_t key) {
    if (!packed_) return ++map_[key];
    const std::uint64_t tag = pack(key);
    std::size_t i = slot_of(tag);
    const std::size_t mask = slots_.size() - 1;
    while (true) {
      std::uint64_t& e = slots_[i];
      if (e == 0) {
        e = (tag << count_bits_) | 1;
        if (++size_ > max_load()) grow();
        return 1;
      }
      if ((e >> count_bits_) == tag) return static_cast<std::uint32_t>(++e & count_mask());
      i = (i + 1) & mask;
    }
  }

  std::uint32_t count(std::uint64_t key) const {
    if (!packed_) {
      const auto it = map_.find(key);
      return it == map_.end() ? 0 : it->second;
    }
    const std::uint64_t tag = pack(key);
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t i = slot_of(tag);; i = (i + 1) & mask) {
      const std::uint64_t e = slots_[i];
      if (e == 0) return 0;
      if ((e >> count_bits_) == tag) return static_cast<std::uint32_t>(e & count_mask());
    }
  }

  std::size_t size() const noexcept { return packed_ ? size_ : map_.size(); }

  // Calls f(key, count) for every counter, in unspecified order.
  template <typename F>
  void for_each(F&& f) const {
    if (!packed_) {
      for (const auto& [key, c] : map_) f(key, c);
      return;
    }
    for (std::uint64_t e : slots_) {
      if (e != 0) f(unpack(e >> count_bits_), static_cast<std::uint32_t>(e & count_mask()));
    }
  }

 private:
  static constexpr unsigned kMinLog = 10;

  std::uint64_t count_mask() const noexcept { return (std::uint64_t{1} << count_bits_) - 1; }
  std::uint64_t pack(std::uint64_t key) const noexcept {
    return ((key >> 32) << id_bits_) | (key & 0xFFFFFFFFu);
  }
  std::uint64_t unpack(std::uint64_t tag) const noexcept {
    return ((tag >> id_bits_) << 32) | (tag & ((std::uint64_t{1} << id_bits_) - 1));
  }
  std::size_t slot_of(std::uint64_t tag) const noexcept {
    return static_cast<std::size_t>((tag * 0x9E3779B97F4A7C15ull) >> (64 - log_capacity_));
  }
  std::size_t max_load() const noexcept { return slots_.size() / 10 * 8; }

  void grow() {
    std::vector<std::uint64_t> old(std::size_t{1} << (log_capacity_ + 1), 0);
    old.swap(slots_);
    ++log_capacity_;
    const std::size_t mask = slots_.size() - 1;
    for (std::uint64_t e : old) {
      if (e == 0) continue;
      std::size_t i = slot_of(e >> count_bits_);
      while (slots_[i] != 0) i = (i + 1) & mask;
      slots_[i] = e;
    }
  }

  bool packed_ = true;
  unsigned id_bits_ = 1;
  unsigned count_bits_ = 62;
  unsigned log_capacity_ = kMinLog;
  std::size_t size_ = 0;
  std::vector<std::uint64_t> slots_;
  absl::flat_hash_map<std::uint64_t, std::uint32_t> map_;
};

// Matched-but-unprocessed elements. An element is a group of pairs that is
// processed atomically (a single pair in plain PGM).
class Frontier {
 public:
  void push(VertexPair p) { push_group(std::span<const VertexPair>(&p, 1)); }
  void push_group(std::span<const VertexPair> group) {
    const auto begin = static_cast<std::uint32_t>(pool_.size());
    pool_.insert(pool_.end(), group.begin(), group.end());
    items_.push_back({begin, static_cast<std::uint32_t>(group.size())});
  }
  bool empty() const noexcept { return head_ == items_.size(); }

  // Removes the next element: uniform over pending elements, or the oldest.
  std::span<const VertexPair> take(FrontierOrder order, Rng& rng) {
    if (order == FrontierOrder::uniform_random) {
      const std::size_t pick = head_ + pick_index(rng, items_.size() - head_);
      std::swap(items_[head_], items_[pick]);
    }
    const Item item = items_[head_++];
    return {pool_.data() + item.begin, item.size};
  }

 private:
  struct Item {
    std::uint32_t begin;
    std::uint32_t size;
  };
  std::vector<VertexPair> pool_;
  std::vector<Item> items_;
  std::size_t head_ = 0;
};

// Adds one mark to every pair in adj1(p.a) x adj2(p.b) with two free
// endpoints that passes `eligible`. Calls `on_marked(key, count)` after each
// increment. Returns the number of increments.
template <typename Eligible, typename OnMarked>
std::uint64_t spread_marks(const Graph& g1, const Graph& g2, const MatchState& state, VertexPair p,
                           MarkTable& marks, std::vector<VertexId>& scratch, Eligible&& eligible,
                           OnMarked&& on_marked) {
  scratch.clear();
  for (VertexId v2 : g2.neighbors(p.b)) {
    if (!state.used_g2(v2)) scratch.push_back(v2);
  }
  if (scratch.empty()) return 0;
  std::uint64_t increments = 0;
  for (VertexId v1 : g1.neighbors(p.a)) {
    if (state.used_g1(v1)) continue;
    for (VertexId v2 : scratch) {
      if (!eligible(v1, v2)) continue;
      const std::uint64_t key = pair_key(v1, v2);
      const std::uint32_t count = marks.increment(key);
      ++increments;
      on_marked(key, count);
    }
  }
  return increments;
}

// Runs Alg.-1 style percolation from the given frontier until it empties.
// Only pairs accepted by `eligible` collect marks or get admitted.
template <typename Eligible, typename OnAdmit>
void percolate(const Graph& g1, const Graph& g2, MatchState& state, Frontier& frontier,
               MarkTable& marks, std::uint32_t threshold, FrontierOrder order, Rng& rng,
               Eligible&& eligible, OnAdmit&& on_admit) {
  std::vector<VertexId> scratch;
  std::vector<std::uint64_t> reached;
  while (!frontier.empty()) {
    const auto item = frontier.take(order, rng);
    state.count_step();
    reached.clear();
    std::uint64_t increments = 0;
    for (const VertexPair& p : item) {
      increments += spread_marks(g1, g2, state, p, marks, scratch, eligible,
                                 [&](std::uint64_t key, std::uint32_t count) {
                                   if (count == threshold) reached.push_back(key);
                                 });
    }
    state.add_mark_increments(increments);
    state.note_counters(marks.size());
    std::sort(reached.begin(), reached.end());
    for (std::uint64_t key : reached) {
      const VertexPair v = unpack_key(key);
      const MatchRecord rec{v, false, threshold, state.processed_count()};
      if (state.try_admit(rec)) {
        frontier.push(v);
        on_admit(rec);
      }
    }
  }
}

}  // namespace deanon::detail

#include "deanon/pgm.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "deanon/errors.hpp"
#include "percolation.hpp"

namespace deanon {

bool MatchState::try_admit(const MatchRecord& record) {
  if (!can_admit(record.pair)) return false;
  used1_[record.pair.a] = 1;
  used2_[record.pair.b] = 1;
  matched_.push_back(record);
  return true;
}

std::vector<VertexPair> normalize_seeds(std::span<const VertexPair> seeds, std::size_t n1,
                                        std::size_t n2) {
  std::vector<VertexPair> out(seeds.begin(), seeds.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  std::vector<char> seen1(n1, 0);
  std::vector<char> seen2(n2, 0);
  for (const auto& p : out) {
    if (p.a >= n1 || p.b >= n2) {
      throw ParameterError("seed [" + std::to_string(p.a) + "," + std::to_string(p.b) +
                           "] out of range");
    }
    if (seen1[p.a] || seen2[p.b]) {
      throw ParameterError("conflicting seeds share vertex in seed [" + std::to_string(p.a) +
                           "," + std::to_string(p.b) + "]");
    }
    seen1[p.a] = seen2[p.b] = 1;
  }
  return out;
}

MatchState run_pgm(const Graph& g1, const Graph& g2, std::span<const VertexPair> seeds,
                   const PgmOptions& options) {
  if (options.threshold < 1) throw ParameterError("PGM threshold must be >= 1");
  const auto normalized = normalize_seeds(seeds, g1.num_vertices(), g2.num_vertices());

  MatchState state(g1.num_vertices(), g2.num_vertices());
  detail::Frontier frontier;
  for (const auto& p : normalized) {
    state.try_admit({p, true, 0, 0});
    frontier.push(p);
  }
  detail::MarkTable marks(g1.num_vertices(), g2.num_vertices());
  Rng rng(options.rng_seed);
  detail::percolate(
      g1, g2, state, frontier, marks, options.threshold, options.order, rng,
      [](VertexId, VertexId) { return true; }, [](const MatchRecord&) {});
  return state;
}

MatchCounts classify_matches(const MatchState& state, std::span<const VertexId> truth) {
  MatchCounts c;
  for (const auto& rec : state.matched()) {
    if (rec.pair.a < truth.size() && truth[rec.pair.a] == rec.pair.b) {
      ++c.good;
    } else {
      ++c.bad;
    }
  }
  c.unmatched = truth.size() - c.good - c.bad;
  return c;
}

void write_matches_csv(const MatchState& state, std::ostream& out) {
  out << "g1_id,g2_id,is_seed,marks_at_match,step_index\n";
  for (const auto& rec : state.matched()) {
    out << rec.pair.a << ',' << rec.pair.b << ',' << (rec.is_seed ? 1 : 0) << ','
        << rec.marks_at_match << ',' << rec.step_index << '\n';
  }
}

}  // namespace deanon

#include "deanon/ddm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "deanon/analysis.hpp"
#include "deanon/errors.hpp"
#include "percolation.hpp"

namespace deanon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_inner(double w, const Slice& slice, double eps) {
  return w >= slice.lo * (1.0 + eps) && w < slice.hi * (1.0 - eps);
}

void bin_vertices(std::span<const double> weights, const SlicePlan& plan, bool all_inner,
                  std::vector<int>& slice, std::vector<Region>& region) {
  slice.resize(weights.size());
  region.resize(weights.size());
  for (std::size_t v = 0; v < weights.size(); ++v) {
    const int k = plan.slice_of(weights[v]);
    slice[v] = k;
    if (k < 0) {
      region[v] = Region::excluded;
    } else if (all_inner || is_inner(weights[v], plan.slices[static_cast<std::size_t>(k)],
                                     plan.options.epsilon)) {
      region[v] = Region::inner;
    } else {
      region[v] = Region::outer;
    }
  }
}

// State shared by the stages of one run.
class DdmRun {
 public:
  DdmRun(const ObservedPair& pair, const SlicePlan& plan, const StagePlan& stages,
         DdmOutcome& out)
      : g1_(pair.g1), g2_(pair.g2), plan_(plan), stages_(stages), out_(out),
        asg_(assign_slices(pair, plan)), top_cut_(plan.top_cut()) {}

  void run(std::span<const VertexPair> seeds, const DdmOptions& options) {
    out_.state = MatchState(g1_.num_vertices(), g2_.num_vertices());
    if (!seeds.empty() &&
        std::none_of(seeds.begin(), seeds.end(),
                     [&](VertexPair p) { return asg_.eligible_slice(p) >= 0; })) {
      throw UnreachableSeedsError("seed set unreachable: no seed pair lies in any slice");
    }
    for (VertexPair p : seeds) {
      out_.state.try_admit({p, true, 0, 0});
      out_.match_stage.push_back(-1);
    }
    if (seeds.empty()) return;

    first_stage(seeds, options);
    std::size_t last_core = 1;
    for (std::size_t k = 2; k < plan_.num_slices(); ++k) {
      if (plan_.slices[k].kind != SliceKind::cascade) break;
      cascade_stage(k);
      last_core = k;
    }
    low_stage(last_core);
    top_stage();
  }

 private:
  bool first_eligible(VertexId a, VertexId b) const {
    return asg_.eligible_slice({a, b}) == 1;
  }
  bool top_candidate(VertexId a, VertexId b) const {
    return (asg_.weight1[a] > top_cut_ || asg_.weight2[b] > top_cut_) && !first_eligible(a, b);
  }
  // Candidates of the cascade and low stages.
  auto below(double cap) const {
    return [this, cap](VertexId a, VertexId b) {
      return asg_.weight1[a] < cap && asg_.weight2[b] < cap && !first_eligible(a, b) &&
             !top_candidate(a, b);
    };
  }

  std::vector<VertexPair> core_of(int slice) const {
    std::vector<VertexPair> core;
    for (const auto& rec : out_.state.matched()) {
      if (asg_.eligible_slice(rec.pair) == slice) core.push_back(rec.pair);
    }
    return core;
  }

  StageTrace& open_stage(StageKind kind, int slice, double lo, double hi, std::uint32_t threshold) {
    StageTrace t;
    t.kind = kind;
    t.slice = slice;
    t.lo = lo;
    t.hi = hi;
    t.threshold = threshold;
    out_.stages.push_back(t);
    out_.references.emplace_back();
    return out_.stages.back();
  }
  int stage_index() const { return static_cast<int>(out_.stages.size()) - 1; }

  bool admit(VertexPair p, std::uint32_t marks) {
    MatchState& state = out_.state;
    if (!state.try_admit({p, false, marks, state.processed_count()})) return false;
    out_.match_stage.push_back(stage_index());
    return true;
  }

  void first_stage(std::span<const VertexPair> seeds, const DdmOptions& options) {
    const Slice& s1 = plan_.slices[1];
    StageTrace& t = open_stage(StageKind::first, 1, s1.lo, s1.hi, stages_.first_threshold);
    detail::Frontier frontier;
    if (options.group_seeds) {
      for (const auto& group : group_uniform_seeds(seeds, plan_, asg_)) frontier.push_group(group);
    } else {
      for (VertexPair p : seeds) frontier.push(p);
    }
    detail::MarkTable marks(g1_.num_vertices(), g2_.num_vertices());
    Rng rng(options.rng_seed);
    auto& ref = out_.references.back();
    ref.assign(seeds.begin(), seeds.end());
    const std::size_t before = out_.state.size();
    const int idx = stage_index();
    detail::percolate(
        g1_, g2_, out_.state, frontier, marks, t.threshold, options.order, rng,
        [this](VertexId a, VertexId b) { return first_eligible(a, b); },
        [&](const MatchRecord& rec) {
          out_.match_stage.push_back(idx);
          ref.push_back(rec.pair);
        });
    t.admitted = out_.state.size() - before;
    t.reference_size = ref.size();
    t.core_size = core_of(1).size();
  }

  // Admits every candidate with at least `threshold` neighbors in `ref`,
  // by descending count then (a, b).
  template <typename Candidate>
  void one_shot(const std::vector<VertexPair>& ref, std::uint32_t threshold, Candidate&& candidate,
                StageTrace& t) {
    MatchState& state = out_.state;
    detail::MarkTable marks(g1_.num_vertices(), g2_.num_vertices());
    std::vector<VertexId> scratch;
    for (VertexPair p : ref) {
      state.count_step();
      state.add_mark_increments(detail::spread_marks(g1_, g2_, state, p, marks, scratch, candidate,
                                                     [](std::uint64_t, std::uint32_t) {}));
    }
    state.note_counters(marks.size());
    std::vector<std::pair<std::uint32_t, std::uint64_t>> hits;
    marks.for_each([&](std::uint64_t key, std::uint32_t count) {
      if (count >= threshold) hits.emplace_back(count, key);
    });
    std::sort(hits.begin(), hits.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    const std::size_t before = state.size();
    for (const auto& [count, key] : hits) admit(detail::unpack_key(key), count);
    t.admitted = state.size() - before;
    t.reference_size = ref.size();
  }

  void cascade_stage(std::size_t k) {
    const Slice& sk = plan_.slices[k];
    StageTrace& t = open_stage(StageKind::cascade, static_cast<int>(k), sk.lo, sk.hi,
                               stages_.slice_thresholds[k]);
    out_.references.back() = core_of(static_cast<int>(k) - 1);
    one_shot(out_.references.back(), t.threshold, below(plan_.alpha(k - 1)), t);
    t.core_size = core_of(static_cast<int>(k)).size();
  }

  void low_stage(std::size_t last_core) {
    MatchState& state = out_.state;
    const double cap = plan_.alpha(last_core);
    const std::size_t first_low = last_core + 1;
    const double lo = plan_.boundaries.back();
    StageTrace& t = open_stage(StageKind::low, static_cast<int>(first_low), lo, cap,
                               stages_.low_threshold);
    auto& ref = out_.references.back();
    for (const auto& rec : state.matched()) {
      if (rec.is_seed || asg_.eligible_slice(rec.pair) == static_cast<int>(last_core)) {
        ref.push_back(rec.pair);
      }
    }
    const std::uint32_t threshold = t.threshold;
    const auto candidate = below(cap);
    detail::MarkTable marks(g1_.num_vertices(), g2_.num_vertices());
    std::vector<VertexId> scratch;
    std::vector<std::uint64_t> ready;
    auto spread = [&](std::size_t from) {
      for (std::size_t i = from; i < ref.size(); ++i) {
        state.count_step();
        state.add_mark_increments(detail::spread_marks(
            g1_, g2_, state, ref[i], marks, scratch, candidate,
            [&](std::uint64_t key, std::uint32_t count) {
              if (count == threshold) ready.push_back(key);
            }));
      }
      state.note_counters(marks.size());
    };
    spread(0);
    const std::size_t before = state.size();
    std::vector<std::pair<std::uint32_t, std::uint64_t>> batch;
    while (!ready.empty()) {
      ++t.rounds;
      batch.clear();
      for (std::uint64_t key : ready) {
        if (state.can_admit(detail::unpack_key(key))) batch.emplace_back(marks.count(key), key);
      }
      ready.clear();
      std::sort(batch.begin(), batch.end(), [](const auto& x, const auto& y) {
        return x.first != y.first ? x.first > y.first : x.second < y.second;
      });
      const std::size_t from = ref.size();
      for (const auto& [count, key] : batch) {
        const VertexPair p = detail::unpack_key(key);
        if (admit(p, count)) ref.push_back(p);
      }
      spread(from);
    }
    t.admitted = state.size() - before;
    t.reference_size = ref.size();
  }

  void top_stage() {
    const double lo_cap = plan_.log_n;
    const double hi_cap = plan_.log_n * plan_.log_n;
    int ref_slice = -1;
    for (std::size_t k = 1; k < plan_.num_slices(); ++k) {
      const double a = plan_.slices[k].hi;
      if (a > lo_cap && a < hi_cap) {
        ref_slice = static_cast<int>(k);
        break;
      }
    }
    const Slice& s0 = plan_.slices[0];
    StageTrace& t = open_stage(StageKind::top, 0, s0.lo, s0.hi, stages_.top_threshold);
    auto& ref = out_.references.back();
    if (ref_slice >= 0) {
      ref = core_of(ref_slice);
    } else {
      for (const auto& rec : out_.state.matched()) ref.push_back(rec.pair);
    }
    one_shot(ref, t.threshold,
             [this](VertexId a, VertexId b) { return top_candidate(a, b); }, t);
  }

  const Graph& g1_;
  const Graph& g2_;
  const SlicePlan& plan_;
  const StagePlan& stages_;
  DdmOutcome& out_;
  SliceAssignment asg_;
  double top_cut_;
};

}  // namespace

int SlicePlan::slice_of(double weight) const noexcept {
  if (boundaries.empty() || weight < boundaries.back()) return -1;
  if (weight >= boundaries.front()) return 0;
  for (std::size_t k = 1; k < boundaries.size(); ++k) {
    if (weight >= boundaries[k]) return static_cast<int>(k);
  }
  return -1;
}

double SlicePlan::top_cut() const noexcept { return 0.5 * (boundaries[0] + boundaries[1]); }

SlicePlan build_slice_plan(const SlicePlanOptions& options) {
  const auto& o = options;
  if (o.n < 2) throw ParameterError("slice plan needs n >= 2");
  if (!(o.beta > 2.0)) throw ParameterError("slice plan needs beta > 2");
  if (!(o.w_bar > 0.0)) throw ParameterError("slice plan needs w_bar > 0");
  if (!(o.s >= 0.0 && o.s <= 1.0)) throw ParameterError("s must lie in [0, 1]");
  if (!(o.epsilon > 0.0 && o.epsilon <= 0.25)) throw ParameterError("epsilon must lie in (0, 1/4]");
  if (!(o.density_constant > 0.0)) throw ParameterError("density constant must be > 0");
  if (!(o.alpha_floor > 0.0)) throw ParameterError("alpha_floor must be > 0");
  if (!(o.gamma > 0.0 && o.gamma <= 0.5)) throw ParameterError("gamma must lie in (0, 1/2]");

  SlicePlan plan;
  plan.options = o;
  const bool gamma_ok = o.gamma > 0.25 && o.gamma < 0.5;
  if (!gamma_ok) {
    const std::string msg = "gamma=" + std::to_string(o.gamma) + " lies outside (1/4, 1/2)";
    if (o.theory_mode) throw ParameterError(msg);
    plan.warnings.push_back(msg);
  }
  const double n = static_cast<double>(o.n);
  plan.alpha0 = std::sqrt(n);
  plan.log_n = std::log(n);
  double b = std::pow(n, o.gamma);
  if (!(b > o.alpha_floor)) throw ParameterError("n^gamma must exceed alpha_floor");
  plan.boundaries.push_back(b);
  while (b > o.alpha_floor) {
    b /= 2.0;
    plan.boundaries.push_back(b);
  }
  if (o.alpha_star) {
    plan.alpha_star = *o.alpha_star;
  } else if (o.beta < 3.0 && o.s > 0.0) {
    const double base = 8.0 * o.w_bar * plan.log_n /
                        (o.density_constant * o.s * o.s * (1.0 - o.epsilon) * (1.0 - o.epsilon));
    plan.alpha_star = std::pow(base, 1.0 / (3.0 - o.beta));
  } else {
    plan.alpha_star = kInf;
  }

  plan.slices.push_back({0, plan.boundaries[0], kInf, SliceKind::top});
  for (std::size_t k = 1; k < plan.boundaries.size(); ++k) {
    Slice s{static_cast<int>(k), plan.boundaries[k], plan.boundaries[k - 1], SliceKind::first};
    if (k >= 2) {
      if (s.hi > plan.alpha_star) {
        s.kind = SliceKind::cascade;
      } else if (s.hi >= plan.log_n) {
        s.kind = SliceKind::growth;
      } else {
        s.kind = SliceKind::bounded;
      }
    }
    plan.slices.push_back(s);
  }
  return plan;
}

double stage_rho(double alpha, double beta, std::size_t n) {
  return std::max(4.0, std::pow(alpha, 4.0 - beta) / std::sqrt(static_cast<double>(n)));
}

std::uint32_t strict_threshold(double x) {
  if (!(x >= 0.0) || x > 4e9) throw ParameterError("threshold out of range");
  return static_cast<std::uint32_t>(std::floor(x)) + 1;
}

StagePlan build_stage_plan(const SlicePlan& plan, ThresholdPolicy policy,
                           std::optional<std::uint32_t> first_threshold) {
  const auto& o = plan.options;
  StagePlan sp;
  sp.policy = policy;
  const bool simplified = policy == ThresholdPolicy::simplified;
  const bool gamma_ok = o.gamma > 0.25 && o.gamma < 0.5 && o.beta < 3.0;
  if (first_threshold) {
    if (*first_threshold < 1) throw ParameterError("first-slice threshold must be >= 1");
    sp.first_threshold = *first_threshold;
  } else if (simplified) {
    sp.first_threshold = 4;
  } else if (policy == ThresholdPolicy::theory || gamma_ok) {
    sp.first_threshold = std::max<std::uint32_t>(4, p1_seed_exponent(o.gamma, o.beta, 4).min_r);
  } else {
    sp.first_threshold = 4;
  }

  sp.rho.resize(plan.num_slices());
  sp.rho[0] = std::pow(static_cast<double>(o.n), o.gamma / 2.0);
  for (std::size_t k = 1; k < plan.num_slices(); ++k) {
    sp.rho[k] = stage_rho(plan.slices[k].hi, o.beta, o.n);
  }
  sp.top_threshold = simplified ? 4 : strict_threshold(sp.rho[0]);
  sp.slice_thresholds.resize(plan.num_slices());
  sp.slice_thresholds[0] = sp.top_threshold;
  for (std::size_t k = 1; k < plan.num_slices(); ++k) {
    if (k == 1) {
      sp.slice_thresholds[k] = sp.first_threshold;
    } else if (plan.slices[k].kind == SliceKind::cascade && !simplified) {
      sp.slice_thresholds[k] = strict_threshold(sp.rho[k - 1]);
    } else {
      sp.slice_thresholds[k] = sp.low_threshold;
    }
  }
  return sp;
}

SliceAssignment assign_slices(const ObservedPair& pair, const SlicePlan& plan) {
  if (pair.num_vertices() != plan.options.n) {
    throw ParameterError("slice plan was built for n=" + std::to_string(plan.options.n) +
                         " but the graphs have " + std::to_string(pair.num_vertices()) +
                         " vertices");
  }
  SliceAssignment asg;
  const bool true_mode = plan.options.mode == WeightMode::true_weight;
  if (true_mode) {
    if (!pair.g1.has_weights() || !pair.g2.has_weights()) {
      throw ParameterError("true-weight slicing needs vertex weights on both graphs");
    }
    asg.weight1.assign(pair.g1.weights().begin(), pair.g1.weights().end());
    asg.weight2.assign(pair.g2.weights().begin(), pair.g2.weights().end());
  } else {
    if (!(pair.s > 0.0)) throw ParameterError("estimated-weight slicing needs s > 0");
    auto estimate = [&](const Graph& g) {
      std::vector<double> w(g.num_vertices());
      for (VertexId v = 0; v < g.num_vertices(); ++v) w[v] = static_cast<double>(g.degree(v)) / pair.s;
      return w;
    };
    asg.weight1 = estimate(pair.g1);
    asg.weight2 = estimate(pair.g2);
  }
  bin_vertices(asg.weight1, plan, true_mode, asg.slice1, asg.region1);
  bin_vertices(asg.weight2, plan, true_mode, asg.slice2, asg.region2);
  return asg;
}

std::vector<std::vector<VertexPair>> group_uniform_seeds(std::span<const VertexPair> seeds,
                                                         const SlicePlan& plan,
                                                         const SliceAssignment& assignment) {
  std::vector<VertexPair> sorted(seeds.begin(), seeds.end());
  std::sort(sorted.begin(), sorted.end());
  std::map<int, std::vector<VertexPair>> by_slice;
  std::vector<std::vector<VertexPair>> groups;
  for (VertexPair p : sorted) {
    const int k = assignment.eligible_slice(p);
    if (k >= 2) {
      by_slice[k].push_back(p);
    } else {
      groups.push_back({p});
    }
  }
  const double alpha1 = plan.boundaries.front();
  for (const auto& [k, members] : by_slice) {
    const double ratio = alpha1 / plan.slices[static_cast<std::size_t>(k)].lo;
    const auto size = static_cast<std::size_t>(std::ceil(ratio - 1e-9)) + 1;
    std::size_t i = 0;
    for (; i + size <= members.size(); i += size) {
      groups.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(i),
                          members.begin() + static_cast<std::ptrdiff_t>(i + size));
    }
    for (; i < members.size(); ++i) groups.push_back({members[i]});
  }
  std::sort(groups.begin(), groups.end());
  return groups;
}

DdmOutcome run_ddm(const ObservedPair& pair, std::span<const VertexPair> seeds,
                   const SlicePlan& plan, const StagePlan& stages, const DdmOptions& options) {
  if (plan.num_slices() < 2) throw ParameterError("slice plan has no first slice");
  if (stages.slice_thresholds.size() != plan.num_slices()) {
    throw ParameterError("stage plan does not match slice plan");
  }
  const auto normalized = normalize_seeds(seeds, pair.num_vertices(), pair.num_vertices());
  DdmOutcome out;
  DdmRun run(pair, plan, stages, out);
  run.run(normalized, options);
  return out;
}

void annotate_stage_counts(DdmOutcome& outcome, std::span<const VertexId> truth) {
  for (auto& t : outcome.stages) t.admitted_good = t.admitted_bad = 0;
  std::size_t seed_good = 0;
  std::size_t seed_bad = 0;
  const auto matched = outcome.state.matched();
  for (std::size_t i = 0; i < matched.size(); ++i) {
    const auto& p = matched[i].pair;
    const bool good = p.a < truth.size() && truth[p.a] == p.b;
    const int s = outcome.match_stage[i];
    if (s < 0) {
      (good ? seed_good : seed_bad) += 1;
    } else {
      auto& t = outcome.stages[static_cast<std::size_t>(s)];
      (good ? t.admitted_good : t.admitted_bad) += 1;
    }
  }
  std::size_t good = seed_good;
  std::size_t bad = seed_bad;
  for (auto& t : outcome.stages) {
    good += t.admitted_good;
    bad += t.admitted_bad;
    t.cumulative_good = good;
    t.cumulative_bad = bad;
  }
}

void write_stage_trace_json(const DdmOutcome& outcome, const SlicePlan& plan, std::ostream& out) {
  using nlohmann::json;
  auto bound = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json stages = json::array();
  for (const auto& t : outcome.stages) {
    stages.push_back({{"stage", to_string(t.kind)},
                      {"slice", t.slice},
                      {"lo", bound(t.lo)},
                      {"hi", bound(t.hi)},
                      {"threshold", t.threshold},
                      {"reference_size", t.reference_size},
                      {"admitted", t.admitted},
                      {"admitted_good", t.admitted_good},
                      {"admitted_bad", t.admitted_bad},
                      {"cumulative_good", t.cumulative_good},
                      {"cumulative_bad", t.cumulative_bad},
                      {"rounds", t.rounds}});
  }
  json slices = json::array();
  for (const auto& s : plan.slices) {
    slices.push_back({{"index", s.index}, {"lo", bound(s.lo)}, {"hi", bound(s.hi)},
                      {"kind", to_string(s.kind)}});
  }
  json doc = {{"alpha0", plan.alpha0},
              {"alpha_star", bound(plan.alpha_star)},
              {"slices", slices},
              {"stages", stages}};
  out << doc.dump(2) << '\n';
}

const char* to_string(StageKind kind) noexcept {
  switch (kind) {
    case StageKind::first: return "first";
    case StageKind::cascade: return "cascade";
    case StageKind::low: return "low";
    case StageKind::top: return "top";
  }
  return "?";
}

const char* to_string(SliceKind kind) noexcept {
  switch (kind) {
    case SliceKind::top: return "top";
    case SliceKind::first: return "first";
    case SliceKind::cascade: return "cascade";
    case SliceKind::growth: return "growth";
    case SliceKind::bounded: return "bounded";
  }
  return "?";
}

}  // namespace deanon

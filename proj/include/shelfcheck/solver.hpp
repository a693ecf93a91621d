#ifndef SHELFCHECK_SOLVER_HPP_
#define SHELFCHECK_SOLVER_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "shelfcheck/planogram.hpp"

namespace shelfcheck {

/// Candidate pairing of a reference facing with an observed item of the same
/// product, scored by the fraction of coherent neighbors. Scores can rise
/// above 1 while a solution is being grown.
struct Hypothesis {
  std::string ref_node;
  std::string obs_node;
  double score = 0.0;
};

/// All candidate pairings for one (reference, observed) graph pair, sorted by
/// (ref_node, obs_node).
class HypothesisSet {
 public:
  HypothesisSet() = default;
  explicit HypothesisSet(std::vector<Hypothesis> hyps) : hyps_(std::move(hyps)) {
    std::sort(hyps_.begin(), hyps_.end(), [](const Hypothesis& a, const Hypothesis& b) {
      if (a.ref_node != b.ref_node) return a.ref_node < b.ref_node;
      return a.obs_node < b.obs_node;
    });
    for (std::size_t i = 0; i < hyps_.size(); ++i) {
      by_ref_.emplace(hyps_[i].ref_node, i);
      by_obs_.emplace(hyps_[i].obs_node, i);
    }
  }

  const std::vector<Hypothesis>& hypotheses() const { return hyps_; }
  bool empty() const { return hyps_.empty(); }
  std::size_t size() const { return hyps_.size(); }

  const Hypothesis* find(const std::string& ref, const std::string& obs) const {
    auto [lo, hi] = by_ref_.equal_range(ref);
    for (auto it = lo; it != hi; ++it) {
      if (hyps_[it->second].obs_node == obs) return &hyps_[it->second];
    }
    return nullptr;
  }

  std::vector<const Hypothesis*> by_ref(const std::string& ref) const {
    return collect(by_ref_, ref);
  }
  std::vector<const Hypothesis*> by_obs(const std::string& obs) const {
    return collect(by_obs_, obs);
  }

 private:
  std::vector<const Hypothesis*> collect(
      const std::unordered_multimap<std::string, std::size_t>& index,
      const std::string& key) const {
    std::vector<const Hypothesis*> out;
    auto [lo, hi] = index.equal_range(key);
    for (auto it = lo; it != hi; ++it) out.push_back(&hyps_[it->second]);
    std::sort(out.begin(), out.end(), [](const Hypothesis* a, const Hypothesis* b) {
      if (a->ref_node != b->ref_node) return a->ref_node < b->ref_node;
      return a->obs_node < b->obs_node;
    });
    return out;
  }

  std::vector<Hypothesis> hyps_;
  std::unordered_multimap<std::string, std::size_t> by_ref_;
  std::unordered_multimap<std::string, std::size_t> by_obs_;
};

struct SolverParams {
  /// Minimum hypothesis score for acceptance while growing a solution.
  double tau = 0.25;
  /// Weight of the displaced-component penalty in the confidence score.
  double lambda_penalty = 1.0;
  /// Branch-and-bound pruning; off only for differential testing.
  bool prune = true;
};

/// One accepted pairing, with the (possibly boosted) score it had when picked.
struct Assignment {
  std::string ref_node;
  std::string obs_node;
  double score_at_pick = 0.0;
};

/// A self-consistent assignment set. Injective both ways and
/// product-consistent by construction.
struct Solution {
  std::vector<Assignment> assignments;  // in acceptance order
  double confidence = 0.0;
  std::optional<Hypothesis> seed;  // first accepted hypothesis, h0

  bool contains_ref(const std::string& id) const {
    return std::any_of(assignments.begin(), assignments.end(),
                       [&](const Assignment& a) { return a.ref_node == id; });
  }
  bool contains_obs(const std::string& id) const {
    return std::any_of(assignments.begin(), assignments.end(),
                       [&](const Assignment& a) { return a.obs_node == id; });
  }
};

/// Row/col extent of the matched reference nodes; localizes the image within
/// the aisle.
struct GridExtent {
  int min_row = 0;
  int min_col = 0;
  int max_row = 0;
  int max_col = 0;
};

struct MatchResult {
  Solution solution;
  std::vector<std::string> consistent_obs_nodes;  // sorted
  std::vector<std::string> missing_ref_nodes;     // sorted
  std::optional<GridExtent> localization;
};

/// All product-matching (reference, observed) pairs, scored by
/// nn_c / nn_t: coherent neighbor directions over the reference node's
/// neighbor count. An isolated reference node scores 0.
inline HypothesisSet create_hypotheses(const ReferencePlanogram& ref,
                                       const ObservedPlanogram& obs) {
  std::vector<Hypothesis> hyps;
  const int nr = static_cast<int>(ref.size());
  const int no = static_cast<int>(obs.size());
  for (int r = 0; r < nr; ++r) {
    const ReferenceNode& rn = ref.node_at(r);
    const int nn_t = ref.degree(r);
    for (int o = 0; o < no; ++o) {
      const ObservedNode& on = obs.node_at(o);
      if (rn.product != on.detection.product) continue;
      int nn_c = 0;
      for (Direction d : kAllDirections) {
        const int rnb = ref.neighbor_index(r, d);
        const int onb = obs.neighbor_index(o, d);
        if (rnb < 0 || onb < 0) continue;
        if (ref.node_at(rnb).product == obs.node_at(onb).detection.product) ++nn_c;
      }
      const double score = nn_t > 0 ? static_cast<double>(nn_c) / nn_t : 0.0;
      hyps.push_back({rn.node_id, on.detection.det_id, score});
    }
  }
  return HypothesisSet(std::move(hyps));
}

/// Confidence of an assignment set: its cardinality minus lambda per pair of
/// matched observed components whose relative placement (pixel offset in
/// units of the mean observed edge length) is off by more than one grid cell
/// from what the reference layout implies.
inline double confidence(const std::vector<Assignment>& assignments,
                         const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                         const SolverParams& params = {}) {
  if (assignments.empty()) return 0.0;

  const auto comps = obs.connected_components();
  std::vector<int> comp_of(obs.size(), -1);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
  }

  // Anchor of each matched component: its lexicographically-smallest
  // assigned observed node (node indices are in id order).
  struct AnchorInfo {
    int obs_index;
    int ref_index;
  };
  std::unordered_map<int, AnchorInfo> anchors;
  for (const Assignment& a : assignments) {
    const int o = obs.index_of(a.obs_node);
    const int r = ref.index_of(a.ref_node);
    if (o < 0 || r < 0) throw std::invalid_argument("confidence: assignment node not in graph");
    const int c = comp_of[o];
    auto it = anchors.find(c);
    if (it == anchors.end() || o < it->second.obs_index) {
      anchors[c] = {o, r};
    }
  }

  int mismatched_pairs = 0;
  if (anchors.size() > 1) {
    const double unit = mean_edge_length(obs);
    std::vector<AnchorInfo> list;
    list.reserve(anchors.size());
    for (const auto& [c, info] : anchors) list.push_back(info);
    std::sort(list.begin(), list.end(),
              [](const AnchorInfo& a, const AnchorInfo& b) { return a.obs_index < b.obs_index; });
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = i + 1; j < list.size(); ++j) {
        const Point pi = obs.node_at(list[i].obs_index).detection.bbox.center();
        const Point pj = obs.node_at(list[j].obs_index).detection.bbox.center();
        const long obs_dcol = std::lround((pj.x - pi.x) / unit);
        const long obs_drow = std::lround((pj.y - pi.y) / unit);
        const ReferenceNode& ri = ref.node_at(list[i].ref_index);
        const ReferenceNode& rj = ref.node_at(list[j].ref_index);
        const long ref_dcol = rj.col - ri.col;
        const long ref_drow = rj.row - ri.row;
        const long cheb = std::max(std::labs(obs_dcol - ref_dcol), std::labs(obs_drow - ref_drow));
        if (cheb > 1) ++mismatched_pairs;
      }
    }
  }
  return std::max(0.0, static_cast<double>(assignments.size()) -
                           params.lambda_penalty * mismatched_pairs);
}

inline double confidence(const Solution& s, const ReferencePlanogram& ref,
                         const ObservedPlanogram& obs, const SolverParams& params = {}) {
  return confidence(s.assignments, ref, obs, params);
}

/// Admissible upper bound on the confidence of any completion of a partial
/// solution: current cardinality plus the bipartite capacity of the
/// remaining hypotheses.
inline double bound(std::size_t partial_size, const std::vector<Hypothesis>& remaining) {
  std::unordered_set<std::string> refs;
  std::unordered_set<std::string> obs;
  for (const Hypothesis& h : remaining) {
    refs.insert(h.ref_node);
    obs.insert(h.obs_node);
  }
  return static_cast<double>(partial_size + std::min(refs.size(), obs.size()));
}

namespace detail {

struct WorkingHypothesis {
  int ref = -1;
  int obs = -1;
  double score = 0.0;
  bool alive = false;
};

/// Greedy constrained growth of one solution, operating on node indices.
/// `pool_alive` masks hypotheses removed by the outer loop. Returns the
/// accepted assignments (indices into `hyps`), or nothing once every
/// remaining hypothesis scores below tau.
struct GrowResult {
  std::vector<int> picked;             // indices into hyps, acceptance order
  std::vector<double> score_at_pick;   // parallel to picked
};

inline GrowResult grow_solution(const std::vector<WorkingHypothesis>& base,
                                const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                                double c_max, const SolverParams& params) {
  std::vector<WorkingHypothesis> work = base;
  const int n = static_cast<int>(work.size());
  GrowResult out;

  // Pair lookup for the boost step.
  std::unordered_map<long long, int> pair_index;
  pair_index.reserve(work.size());
  for (int i = 0; i < n; ++i) {
    pair_index.emplace(static_cast<long long>(work[i].ref) * obs.size() + work[i].obs, i);
  }

  int alive_count = 0;
  for (const WorkingHypothesis& h : work)
    if (h.alive) ++alive_count;

  while (alive_count > 0) {
    int best = -1;
    for (int i = 0; i < n; ++i) {
      if (!work[i].alive) continue;
      if (best < 0 || work[i].score > work[best].score) best = i;
      // Equal scores: node indices are in id order, and hypotheses were
      // built ref-major, so the first hit already is the lexicographic
      // minimum; nothing further to do.
    }
    if (work[best].score < params.tau) break;

    out.picked.push_back(best);
    out.score_at_pick.push_back(work[best].score);
    const int r = work[best].ref;
    const int o = work[best].obs;

    for (int i = 0; i < n; ++i) {
      if (work[i].alive && (work[i].ref == r || work[i].obs == o)) {
        work[i].alive = false;
        --alive_count;
      }
    }

    // Reward pairings of coherent neighbors: each gains one extra
    // coherent-neighbor fraction.
    for (Direction d : kAllDirections) {
      const int rnb = ref.neighbor_index(r, d);
      const int onb = obs.neighbor_index(o, d);
      if (rnb < 0 || onb < 0) continue;
      auto it = pair_index.find(static_cast<long long>(rnb) * obs.size() + onb);
      if (it == pair_index.end() || !work[it->second].alive) continue;
      const int nn_t = ref.degree(rnb);
      if (nn_t > 0) work[it->second].score += 1.0 / nn_t;
    }

    if (params.prune) {
      std::vector<char> ref_seen(ref.size(), 0), obs_seen(obs.size(), 0);
      int refs = 0, obs_count = 0;
      for (int i = 0; i < n; ++i) {
        if (!work[i].alive) continue;
        if (!ref_seen[work[i].ref]) { ref_seen[work[i].ref] = 1; ++refs; }
        if (!obs_seen[work[i].obs]) { obs_seen[work[i].obs] = 1; ++obs_count; }
      }
      const double b_c = static_cast<double>(out.picked.size() + std::min(refs, obs_count));
      if (b_c <= c_max) break;  // no completion can improve on the incumbent
    }
  }
  return out;
}

inline std::vector<WorkingHypothesis> index_hypotheses(const HypothesisSet& hset,
                                                       const ReferencePlanogram& ref,
                                                       const ObservedPlanogram& obs) {
  std::vector<WorkingHypothesis> work;
  work.reserve(hset.size());
  for (const Hypothesis& h : hset.hypotheses()) {
    const int r = ref.index_of(h.ref_node);
    const int o = obs.index_of(h.obs_node);
    if (r < 0 || o < 0) {
      throw std::invalid_argument("hypothesis references a node outside the graphs");
    }
    work.push_back({r, o, h.score, true});
  }
  return work;
}

}  // namespace detail

struct FindSolutionResult {
  double confidence = 0.0;
  Solution solution;
  std::optional<Hypothesis> h0;
};

/// One FindSolution pass: grows a solution greedily from the highest-scoring
/// hypothesis, propagating score boosts to coherent neighbors and abandoning
/// the attempt once the upper bound drops to c_max. Throws on an empty set.
inline FindSolutionResult find_solution(const HypothesisSet& hset,
                                        const ReferencePlanogram& ref,
                                        const ObservedPlanogram& obs, double c_max,
                                        const SolverParams& params = {}) {
  if (hset.empty()) throw std::invalid_argument("find_solution: empty hypothesis set");
  const auto work = detail::index_hypotheses(hset, ref, obs);
  const auto grown = detail::grow_solution(work, ref, obs, c_max, params);

  FindSolutionResult result;
  for (std::size_t k = 0; k < grown.picked.size(); ++k) {
    const auto& h = work[grown.picked[k]];
    result.solution.assignments.push_back({ref.node_at(h.ref).node_id,
                                           obs.node_at(h.obs).node_id,
                                           grown.score_at_pick[k]});
  }
  if (!grown.picked.empty()) {
    const auto& h = work[grown.picked[0]];
    result.h0 = Hypothesis{ref.node_at(h.ref).node_id, obs.node_at(h.obs).node_id,
                           work[grown.picked[0]].score};
    result.solution.seed = result.h0;
  }
  result.confidence = confidence(result.solution.assignments, ref, obs, params);
  result.solution.confidence = result.confidence;
  return result;
}

/// Full heuristic search: restarts FindSolution on the pool with the previous
/// seed hypothesis removed, and keeps the best-confidence solution seen.
inline MatchResult solve(const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                         const SolverParams& params = {}) {
  const HypothesisSet hset = create_hypotheses(ref, obs);
  auto pool = detail::index_hypotheses(hset, ref, obs);

  double c_max = 0.0;
  detail::GrowResult best;
  bool have_best = false;

  std::size_t alive = pool.size();
  while (alive > 0) {
    const auto grown = detail::grow_solution(pool, ref, obs, c_max, params);
    if (grown.picked.empty()) break;  // nothing above tau remains

    std::vector<Assignment> assignments;
    assignments.reserve(grown.picked.size());
    for (std::size_t k = 0; k < grown.picked.size(); ++k) {
      const auto& h = pool[grown.picked[k]];
      assignments.push_back({ref.node_at(h.ref).node_id, obs.node_at(h.obs).node_id,
                             grown.score_at_pick[k]});
    }
    const double c = confidence(assignments, ref, obs, params);
    if (c > c_max) {
      c_max = c;
      best = grown;
      have_best = true;
    }
    pool[grown.picked[0]].alive = false;  // H <- H - h0
    --alive;
  }

  MatchResult result;
  if (have_best) {
    for (std::size_t k = 0; k < best.picked.size(); ++k) {
      const auto& h = pool[best.picked[k]];
      result.solution.assignments.push_back({ref.node_at(h.ref).node_id,
                                             obs.node_at(h.obs).node_id,
                                             best.score_at_pick[k]});
    }
    const auto& h = pool[best.picked[0]];
    result.solution.seed = Hypothesis{ref.node_at(h.ref).node_id,
                                      obs.node_at(h.obs).node_id, h.score};
    result.solution.confidence = c_max;
  }

  for (const Assignment& a : result.solution.assignments) {
    result.consistent_obs_nodes.push_back(a.obs_node);
  }
  std::sort(result.consistent_obs_nodes.begin(), result.consistent_obs_nodes.end());

  for (const ReferenceNode& n : ref.nodes()) {
    if (!result.solution.contains_ref(n.node_id)) {
      result.missing_ref_nodes.push_back(n.node_id);
    }
  }

  if (!result.solution.assignments.empty()) {
    GridExtent ext{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(),
                   std::numeric_limits<int>::min(), std::numeric_limits<int>::min()};
    for (const Assignment& a : result.solution.assignments) {
      const ReferenceNode& n = ref.node(a.ref_node);
      ext.min_row = std::min(ext.min_row, n.row);
      ext.min_col = std::min(ext.min_col, n.col);
      ext.max_row = std::max(ext.max_row, n.row);
      ext.max_col = std::max(ext.max_col, n.col);
    }
    result.localization = ext;
  }
  return result;
}

/// Matches one observed graph against several candidate aisles and returns
/// the best fit (ties go to the lowest index).
inline std::pair<std::size_t, MatchResult> solve_multi(
    const std::vector<ReferencePlanogram>& refs, const ObservedPlanogram& obs,
    const SolverParams& params = {}) {
  if (refs.empty()) throw std::invalid_argument("solve_multi: no reference planograms");
  std::size_t best_index = 0;
  MatchResult best = solve(refs[0], obs, params);
  for (std::size_t i = 1; i < refs.size(); ++i) {
    MatchResult r = solve(refs[i], obs, params);
    if (r.solution.confidence > best.solution.confidence) {
      best_index = i;
      best = std::move(r);
    }
  }
  return {best_index, std::move(best)};
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_SOLVER_HPP_

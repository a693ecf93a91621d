#ifndef SHELFCHECK_ORACLE_HPP_
#define SHELFCHECK_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "shelfcheck/planogram.hpp"
#include "shelfcheck/solver.hpp"

namespace shelfcheck {

/// Exhaustive reference solver. Enumerates every injective product-consistent
/// assignment set and returns one maximizing the confidence score, with ties
/// broken toward larger cardinality and then the lexicographically smallest
/// assignment list. Exponential; guarded by node_limit. Kept deliberately
/// separate from the heuristic solver: components, length scale and
/// confidence are all recomputed here from the raw graphs.
namespace oracle_detail {

struct Instance {
  const ReferencePlanogram* ref;
  const ObservedPlanogram* obs;
  SolverParams params;
  std::vector<std::vector<int>> candidates;  // per ref index, compatible obs indices
  std::vector<int> obs_component;
  double unit_length = 0.0;
};

inline Instance prepare(const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                        const SolverParams& params) {
  Instance inst;
  inst.ref = &ref;
  inst.obs = &obs;
  inst.params = params;

  inst.candidates.resize(ref.size());
  for (std::size_t r = 0; r < ref.size(); ++r) {
    for (std::size_t o = 0; o < obs.size(); ++o) {
      if (ref.node_at(r).product == obs.node_at(o).detection.product) {
        inst.candidates[r].push_back(static_cast<int>(o));
      }
    }
  }

  // Connected components straight from the edge list.
  const int n = static_cast<int>(obs.size());
  std::vector<std::vector<int>> adj(n);
  for (const Edge& e : obs.edges()) {
    adj[obs.index_of(e.from)].push_back(obs.index_of(e.to));
  }
  inst.obs_component.assign(n, -1);
  int comp = 0;
  for (int s = 0; s < n; ++s) {
    if (inst.obs_component[s] >= 0) continue;
    std::vector<int> stack{s};
    inst.obs_component[s] = comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int u : adj[v]) {
        if (inst.obs_component[u] < 0) {
          inst.obs_component[u] = comp;
          stack.push_back(u);
        }
      }
    }
    ++comp;
  }

  double sum = 0.0;
  int count = 0;
  for (const Edge& e : obs.edges()) {
    if (e.from < e.to) {
      sum += distance(obs.node(e.from).detection.bbox.center(),
                      obs.node(e.to).detection.bbox.center());
      ++count;
    }
  }
  if (count > 0) {
    inst.unit_length = sum / count;
  } else if (n > 0) {
    for (const ObservedNode& node : obs.nodes()) sum += node.detection.bbox.diagonal();
    inst.unit_length = sum / n;
  }
  return inst;
}

/// Confidence of the assignment encoded as obs index per ref index (-1 for
/// unassigned). Same definition as the solver's, evaluated independently.
inline double leaf_confidence(const Instance& inst, const std::vector<int>& pick) {
  int cardinality = 0;
  // Anchor per component: smallest assigned obs index.
  std::vector<int> anchor_obs;
  std::vector<int> anchor_ref;
  std::vector<int> comp_slot(inst.obs->size(), -1);
  for (std::size_t r = 0; r < pick.size(); ++r) {
    if (pick[r] < 0) continue;
    ++cardinality;
    const int c = inst.obs_component[pick[r]];
    if (comp_slot[c] < 0) {
      comp_slot[c] = static_cast<int>(anchor_obs.size());
      anchor_obs.push_back(pick[r]);
      anchor_ref.push_back(static_cast<int>(r));
    } else if (pick[r] < anchor_obs[comp_slot[c]]) {
      anchor_obs[comp_slot[c]] = pick[r];
      anchor_ref[comp_slot[c]] = static_cast<int>(r);
    }
  }
  if (cardinality == 0) return 0.0;

  // Sort anchors by observed index so pair iteration matches the solver's.
  std::vector<int> order(anchor_obs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return anchor_obs[a] < anchor_obs[b]; });

  int mismatched = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const Point pi = inst.obs->node_at(anchor_obs[order[i]]).detection.bbox.center();
      const Point pj = inst.obs->node_at(anchor_obs[order[j]]).detection.bbox.center();
      const long obs_dcol = std::lround((pj.x - pi.x) / inst.unit_length);
      const long obs_drow = std::lround((pj.y - pi.y) / inst.unit_length);
      const ReferenceNode& ri = inst.ref->node_at(anchor_ref[order[i]]);
      const ReferenceNode& rj = inst.ref->node_at(anchor_ref[order[j]]);
      const long cheb = std::max(std::labs(obs_dcol - (rj.col - ri.col)),
                                 std::labs(obs_drow - (rj.row - ri.row)));
      if (cheb > 1) ++mismatched;
    }
  }
  return std::max(0.0, static_cast<double>(cardinality) -
                           inst.params.lambda_penalty * mismatched);
}

struct Best {
  double confidence = -1.0;
  std::vector<int> pick;
  int cardinality = -1;
};

inline bool better(double c, int card, const std::vector<int>& pick, const Best& best) {
  if (c != best.confidence) return c > best.confidence;
  if (card != best.cardinality) return card > best.cardinality;
  // Lexicographic on the (ref, obs) pair list; refs are in index order on
  // both sides, so comparing the per-ref choices with "assigned sorts
  // before unassigned" realizes the list comparison.
  for (std::size_t r = 0; r < pick.size(); ++r) {
    if (pick[r] == best.pick[r]) continue;
    if (pick[r] < 0) return false;  // candidate list ends earlier at r -> larger
    if (best.pick[r] < 0) return true;
    return pick[r] < best.pick[r];
  }
  return false;
}

inline void enumerate(const Instance& inst, std::size_t r, std::vector<int>& pick,
                      std::uint64_t used_obs, Best& best, std::uint64_t* counter) {
  if (r == pick.size()) {
    if (counter) ++(*counter);
    const double c = leaf_confidence(inst, pick);
    int card = 0;
    for (int p : pick)
      if (p >= 0) ++card;
    if (better(c, card, pick, best)) {
      best.confidence = c;
      best.cardinality = card;
      best.pick = pick;
    }
    return;
  }
  for (int o : inst.candidates[r]) {
    if (used_obs & (1ULL << o)) continue;
    pick[r] = o;
    enumerate(inst, r + 1, pick, used_obs | (1ULL << o), best, counter);
  }
  pick[r] = -1;  // "unassigned" explored last
  enumerate(inst, r + 1, pick, used_obs, best, counter);
}

}  // namespace oracle_detail

/// Exhaustive optimum of the same objective the heuristic pursues.
/// Throws when min(|I|, |O|) exceeds node_limit.
inline Solution brute_force_solve(const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                                  const SolverParams& params = {}, int node_limit = 12) {
  if (static_cast<int>(std::min(ref.size(), obs.size())) > node_limit) {
    throw std::invalid_argument("brute_force_solve: instance too large for oracle");
  }
  if (obs.size() > 63) {
    throw std::invalid_argument("brute_force_solve: observed graph exceeds bitmask width");
  }
  auto inst = oracle_detail::prepare(ref, obs, params);
  oracle_detail::Best best;
  best.pick.assign(ref.size(), -1);
  std::vector<int> pick(ref.size(), -1);
  oracle_detail::enumerate(inst, 0, pick, 0, best, nullptr);

  Solution s;
  for (std::size_t r = 0; r < best.pick.size(); ++r) {
    if (best.pick[r] < 0) continue;
    s.assignments.push_back({ref.node_at(r).node_id,
                             obs.node_at(best.pick[r]).detection.det_id, 0.0});
  }
  s.confidence = std::max(0.0, best.confidence);
  return s;
}

/// Number of injective product-consistent assignment sets (the empty set
/// included); used to cross-check enumeration exhaustiveness.
inline std::uint64_t brute_force_count(const ReferencePlanogram& ref,
                                       const ObservedPlanogram& obs,
                                       int node_limit = 12) {
  if (static_cast<int>(std::min(ref.size(), obs.size())) > node_limit) {
    throw std::invalid_argument("brute_force_count: instance too large for oracle");
  }
  if (obs.size() > 63) {
    throw std::invalid_argument("brute_force_count: observed graph exceeds bitmask width");
  }
  auto inst = oracle_detail::prepare(ref, obs, SolverParams{});
  oracle_detail::Best best;
  best.pick.assign(ref.size(), -1);
  std::vector<int> pick(ref.size(), -1);
  std::uint64_t count = 0;
  oracle_detail::enumerate(inst, 0, pick, 0, best, &count);
  return count;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_ORACLE_HPP_

#ifndef SHELFCHECK_PIPELINE_HPP_
#define SHELFCHECK_PIPELINE_HPP_

#include <chrono>
#include <string>
#include <unordered_set>
#include <vector>

#include "shelfcheck/eval.hpp"
#include "shelfcheck/graph_builder.hpp"
#include "shelfcheck/planogram.hpp"
#include "shelfcheck/solver.hpp"
#include "shelfcheck/verify.hpp"

namespace shelfcheck {

struct PipelineParams {
  BuilderParams builder;
  SolverParams solver;
  VerifyParams verify;
};

struct Timings {
  double build_ms = 0.0;
  double solve_ms = 0.0;
  double verify_ms = 0.0;
  double total_ms = 0.0;
};

/// Everything one scene produces: the built graph, the consistency-check
/// result, and the verification outcome.
struct SceneRun {
  ObservedPlanogram observed;
  MatchResult match;
  VerifyOutcome outcome;
  std::size_t planogram_index = 0;
  Timings timings;
};

/// detections -> graph -> consistency check -> verification.
/// With several references, the consistency check localizes the scene by
/// picking the best-matching one.
inline SceneRun run_scene(const std::vector<ReferencePlanogram>& refs,
                          const std::vector<Detection>& detections, Matcher& matcher,
                          const PipelineParams& params = {}) {
  using clock = std::chrono::steady_clock;
  const auto ms = [](clock::time_point a, clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
  };

  SceneRun run;
  const auto t0 = clock::now();
  run.observed = build_observed(detections, params.builder);
  const auto t1 = clock::now();
  auto [index, match] = solve_multi(refs, run.observed, params.solver);
  run.planogram_index = index;
  run.match = std::move(match);
  const auto t2 = clock::now();
  run.outcome = verify_all(refs[run.planogram_index], run.observed, run.match, matcher,
                           params.verify, params.builder, params.solver);
  const auto t3 = clock::now();

  run.timings.build_ms = ms(t0, t1);
  run.timings.solve_ms = ms(t1, t2);
  run.timings.verify_ms = ms(t2, t3);
  run.timings.total_ms = ms(t0, t3);
  return run;
}

enum class Stage { kDetection, kConsistency, kVerification };

/// Detection set as it stands after the given pipeline stage.
inline std::vector<Detection> stage_detections(const std::vector<Detection>& input,
                                               const SceneRun& run, Stage stage) {
  if (stage == Stage::kDetection) return input;
  std::unordered_set<std::string> consistent(run.match.consistent_obs_nodes.begin(),
                                             run.match.consistent_obs_nodes.end());
  std::vector<Detection> out;
  for (const Detection& d : input) {
    if (consistent.count(d.det_id)) out.push_back(d);
  }
  if (stage == Stage::kVerification) {
    for (const Detection& d : run.outcome.verified) out.push_back(d);
  }
  return out;
}

/// Evaluation ground truth for a scene: product labels resolved through the
/// planogram.
inline std::vector<GtItem> eval_items(const ReferencePlanogram& ref,
                                      const std::vector<std::pair<std::string, BBox>>& items) {
  std::vector<GtItem> out;
  out.reserve(items.size());
  for (const auto& [node_id, box] : items) {
    out.push_back({ref.node(node_id).product, box});
  }
  return out;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_PIPELINE_HPP_

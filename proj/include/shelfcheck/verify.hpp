#ifndef SHELFCHECK_VERIFY_HPP_
#define SHELFCHECK_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "shelfcheck/geometry.hpp"
#include "shelfcheck/graph_builder.hpp"
#include "shelfcheck/planogram.hpp"
#include "shelfcheck/solver.hpp"

namespace shelfcheck {

struct VerifyParams {
  /// Fractional ROI enlargement per side over the expected item size.
  double roi_margin = 0.5;
  /// Minimum combined proposal score for acceptance.
  double accept_threshold = 0.5;
  /// Proposals overlapping an accepted detection beyond this IoU are dropped.
  double overlap_iou_max = 0.3;
};

/// Candidate localization of a sought product inside a ROI.
struct Proposal {
  BBox bbox;
  double raw_score = 0.0;
};

/// Source of detection proposals for a product within a region. Implementations
/// carry their own scene context (image, ground truth, ...). Returned boxes
/// must intersect the query ROI.
class Matcher {
 public:
  virtual ~Matcher() = default;
  virtual std::vector<Proposal> find_proposals(const ProductId& product,
                                               const BBox& roi) = 0;
  /// Normalization constant for raw scores; nullopt means "use the per-query
  /// maximum".
  virtual std::optional<double> max_raw_score() const { return std::nullopt; }
};

/// Verification matcher backed by a known item list (the simulator's ground
/// truth): returns, with full confidence, every item of the sought product
/// whose center lies inside the ROI.
class KnownItemsMatcher final : public Matcher {
 public:
  explicit KnownItemsMatcher(std::vector<std::pair<ProductId, BBox>> items)
      : items_(std::move(items)) {
    std::stable_sort(items_.begin(), items_.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first < b.first;
                       if (a.second.x != b.second.x) return a.second.x < b.second.x;
                       return a.second.y < b.second.y;
                     });
  }

  std::vector<Proposal> find_proposals(const ProductId& product, const BBox& roi) override {
    std::vector<Proposal> out;
    for (const auto& [pid, box] : items_) {
      if (pid != product) continue;
      const Point c = box.center();
      if (c.x >= roi.x && c.x <= roi.right() && c.y >= roi.y && c.y <= roi.bottom()) {
        out.push_back({box, 1.0});
      }
    }
    return out;
  }

  std::optional<double> max_raw_score() const override { return 1.0; }

 private:
  std::vector<std::pair<ProductId, BBox>> items_;
};

/// Matcher that never proposes anything; turns verification into pure
/// issue reporting.
class NullMatcher final : public Matcher {
 public:
  std::vector<Proposal> find_proposals(const ProductId&, const BBox&) override {
    return {};
  }
};

enum class IssueReason { kNoProposals, kAllOverlapping, kBestScoreBelowThreshold };

inline std::string_view issue_reason_name(IssueReason r) {
  switch (r) {
    case IssueReason::kNoProposals: return "no-proposals";
    case IssueReason::kAllOverlapping: return "all-overlapping";
    case IssueReason::kBestScoreBelowThreshold: return "best-score-below-threshold";
  }
  throw std::invalid_argument("issue_reason_name: bad reason");
}

/// A facing that could not be matched or verified (missing or misplaced
/// item; the two are not distinguished). expected_roi is absent when the
/// target never had an assigned neighbor to estimate one from.
struct ComplianceIssue {
  std::string ref_node;
  ProductId expected_product;
  std::optional<BBox> expected_roi;
  IssueReason reason;
};

/// The missing reference node with the most already-assigned neighbors;
/// ties go to the smallest node id.
inline std::string select_target(const std::vector<std::string>& missing,
                                 const Solution& solution, const ReferencePlanogram& ref) {
  if (missing.empty()) throw std::invalid_argument("select_target: nothing missing");
  std::unordered_set<std::string> assigned;
  for (const Assignment& a : solution.assignments) assigned.insert(a.ref_node);

  std::vector<std::string> sorted = missing;
  std::sort(sorted.begin(), sorted.end());
  std::string best;
  int best_count = -1;
  for (const std::string& id : sorted) {
    int count = 0;
    for (Direction d : kAllDirections) {
      const ReferenceNode* nb = ref.neighbor(id, d);
      if (nb && assigned.count(nb->node_id)) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = id;
    }
  }
  return best;
}

/// Expected region of a missing facing: each assigned neighbor votes for a
/// center one mean-edge-length away from its own detection, opposite the
/// direction it occupies; the votes are averaged. The box size comes from
/// metric ratios when the catalog knows them, else from the neighbors'
/// pixel sizes, enlarged by the margin.
inline BBox estimate_roi(const std::string& target, const Solution& solution,
                         const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                         const VerifyParams& params = {}) {
  std::unordered_map<std::string, std::string> ref_to_obs;
  for (const Assignment& a : solution.assignments) ref_to_obs[a.ref_node] = a.obs_node;

  const ReferenceNode& target_node = ref.node(target);
  const double edge_len = mean_edge_length(obs);

  double cx = 0.0, cy = 0.0;
  double w_metric = 0.0, h_metric = 0.0;
  int n_metric = 0;
  double w_pixel = 0.0, h_pixel = 0.0;
  int n_votes = 0;

  for (Direction d : kAllDirections) {
    const ReferenceNode* nb = ref.neighbor(target, d);
    if (!nb) continue;
    auto it = ref_to_obs.find(nb->node_id);
    if (it == ref_to_obs.end()) continue;
    const BBox& nb_box = obs.node(it->second).detection.bbox;
    const Point u = unit_vector(opposite(d));
    const Point c = nb_box.center();
    cx += c.x + u.x * edge_len;
    cy += c.y + u.y * edge_len;
    w_pixel += nb_box.w;
    h_pixel += nb_box.h;
    ++n_votes;
    if (target_node.metric_size && nb->metric_size) {
      w_metric += nb_box.w * (target_node.metric_size->width_mm / nb->metric_size->width_mm);
      h_metric += nb_box.h * (target_node.metric_size->height_mm / nb->metric_size->height_mm);
      ++n_metric;
    }
  }
  if (n_votes == 0) throw std::runtime_error("estimate_roi: unconstrained target");

  cx /= n_votes;
  cy /= n_votes;
  const double w_exp = n_metric > 0 ? w_metric / n_metric : w_pixel / n_votes;
  const double h_exp = n_metric > 0 ? h_metric / n_metric : h_pixel / n_votes;
  const double w_roi = w_exp * (1.0 + 2.0 * params.roi_margin);
  const double h_roi = h_exp * (1.0 + 2.0 * params.roi_margin);
  return BBox(cx - w_roi / 2.0, cy - h_roi / 2.0, w_roi, h_roi);
}

/// Combined proposal score: position coherence against the ROI center and
/// normalized matcher confidence, averaged. In [0, 1].
inline double score_proposal(const Proposal& p, const BBox& roi,
                             const std::vector<Proposal>& proposals,
                             std::optional<double> declared_max = std::nullopt) {
  const double half_diag = roi.diagonal() / 2.0;
  const double dist = distance(p.bbox.center(), roi.center());
  const double position = std::max(0.0, 1.0 - dist / half_diag);

  double denom;
  if (declared_max) {
    denom = *declared_max;
  } else {
    denom = 0.0;
    for (const Proposal& q : proposals) denom = std::max(denom, q.raw_score);
  }
  if (denom <= 0.0) denom = 1.0;
  const double conf = std::min(1.0, p.raw_score / denom);
  return (position + conf) / 2.0;
}

struct VerifyOutcome {
  ObservedPlanogram observed;
  Solution solution;
  std::vector<ComplianceIssue> issues;
  /// Detections added by accepted proposals, in acceptance order.
  std::vector<Detection> verified;
};

/// Iterative product verification: repeatedly picks the best-constrained
/// missing facing, queries the matcher inside its estimated ROI, and either
/// grows the observed graph and the solution or files a compliance issue.
/// Runs until every reference facing is assigned or flagged.
inline VerifyOutcome verify_all(const ReferencePlanogram& ref, const ObservedPlanogram& obs,
                                const MatchResult& match, Matcher& matcher,
                                const VerifyParams& params = {},
                                const BuilderParams& builder_params = {},
                                const SolverParams& solver_params = {}) {
  VerifyOutcome out;
  out.solution = match.solution;

  std::vector<Detection> detections;
  detections.reserve(obs.size());
  for (const ObservedNode& n : obs.nodes()) detections.push_back(n.detection);
  std::unordered_set<std::string> det_ids;
  for (const Detection& d : detections) det_ids.insert(d.det_id);

  ObservedPlanogram current = obs;
  std::set<std::string> missing(match.missing_ref_nodes.begin(),
                                match.missing_ref_nodes.end());

  auto assigned_boxes = [&]() {
    std::vector<BBox> boxes;
    for (const Assignment& a : out.solution.assignments) {
      boxes.push_back(current.node(a.obs_node).detection.bbox);
    }
    return boxes;
  };

  while (!missing.empty()) {
    const std::vector<std::string> missing_list(missing.begin(), missing.end());
    const std::string target = select_target(missing_list, out.solution, ref);

    int constrained = 0;
    for (Direction d : kAllDirections) {
      const ReferenceNode* nb = ref.neighbor(target, d);
      if (nb && out.solution.contains_ref(nb->node_id)) ++constrained;
    }
    if (constrained == 0) {
      // The best-constrained candidate has no anchor at all: no remaining
      // target can be localized, so flag them all and stop.
      for (const std::string& id : missing_list) {
        out.issues.push_back({id, ref.node(id).product, std::nullopt,
                              IssueReason::kNoProposals});
      }
      break;
    }

    const BBox roi = estimate_roi(target, out.solution, ref, current, params);
    const ProductId product = ref.node(target).product;
    const std::vector<Proposal> raw = matcher.find_proposals(product, roi);
    missing.erase(target);

    if (raw.empty()) {
      out.issues.push_back({target, product, roi, IssueReason::kNoProposals});
      continue;
    }

    std::vector<Proposal> kept;
    const std::vector<BBox> taken = assigned_boxes();
    for (const Proposal& p : raw) {
      bool overlaps = false;
      for (const BBox& b : taken) {
        if (iou(p.bbox, b) > params.overlap_iou_max) {
          overlaps = true;
          break;
        }
      }
      if (!overlaps) kept.push_back(p);
    }
    if (kept.empty()) {
      out.issues.push_back({target, product, roi, IssueReason::kAllOverlapping});
      continue;
    }

    int best = 0;
    double best_score = -1.0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      const double s = score_proposal(kept[i], roi, kept, matcher.max_raw_score());
      const bool wins =
          s > best_score ||
          (s == best_score &&
           std::tie(kept[i].bbox.x, kept[i].bbox.y, kept[i].bbox.w, kept[i].bbox.h) <
               std::tie(kept[best].bbox.x, kept[best].bbox.y, kept[best].bbox.w,
                        kept[best].bbox.h));
      if (wins) {
        best = static_cast<int>(i);
        best_score = s;
      }
    }

    if (best_score >= params.accept_threshold) {
      std::string det_id = "v:" + target;
      while (det_ids.count(det_id)) det_id += "+";
      det_ids.insert(det_id);
      const Detection det{det_id, product, kept[best].bbox, kept[best].raw_score};
      detections.push_back(det);
      out.verified.push_back(det);
      current = build_observed(detections, builder_params);
      out.solution.assignments.push_back({target, det_id, best_score});
    } else {
      out.issues.push_back({target, product, roi, IssueReason::kBestScoreBelowThreshold});
    }
  }

  out.solution.confidence = confidence(out.solution.assignments, ref, current, solver_params);
  out.observed = std::move(current);
  return out;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_VERIFY_HPP_

#ifndef SHELFCHECK_EVAL_HPP_
#define SHELFCHECK_EVAL_HPP_

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "shelfcheck/geometry.hpp"
#include "shelfcheck/planogram.hpp"

namespace shelfcheck {

struct EvalResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

inline EvalResult make_eval_result(int tp, int fp, int fn) {
  EvalResult r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  r.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  r.f_measure = (r.precision + r.recall) > 0.0
                    ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                    : 0.0;
  return r;
}

/// A ground-truth instance to score against: the product and its true box.
struct GtItem {
  ProductId product;
  BBox bbox;
};

struct DetectionMatch {
  int det_index;
  int gt_index;
  double iou;
};

struct MatchStats {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<DetectionMatch> pairing;
};

/// PASCAL-style one-to-one matching: a detection is correct when its label
/// equals a ground-truth item's and their boxes overlap with IoU above the
/// threshold; candidate pairs are consumed greedily by descending IoU.
inline MatchStats match_detections(const std::vector<Detection>& dets,
                                   const std::vector<GtItem>& gt,
                                   double iou_threshold = 0.5) {
  struct Cand {
    double overlap;
    int det, gt;
  };
  std::vector<Cand> cands;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (dets[d].product != gt[g].product) continue;
      const double o = iou(dets[d].bbox, gt[g].bbox);
      if (o > iou_threshold) cands.push_back({o, static_cast<int>(d), static_cast<int>(g)});
    }
  }
  std::sort(cands.begin(), cands.end(), [&](const Cand& a, const Cand& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (dets[a.det].det_id != dets[b.det].det_id)
      return dets[a.det].det_id < dets[b.det].det_id;
    return a.gt < b.gt;
  });

  std::vector<char> det_used(dets.size(), 0), gt_used(gt.size(), 0);
  MatchStats stats;
  for (const Cand& c : cands) {
    if (det_used[c.det] || gt_used[c.gt]) continue;
    det_used[c.det] = gt_used[c.gt] = 1;
    stats.pairing.push_back({c.det, c.gt, c.overlap});
  }
  stats.tp = static_cast<int>(stats.pairing.size());
  stats.fp = static_cast<int>(dets.size()) - stats.tp;
  stats.fn = static_cast<int>(gt.size()) - stats.tp;
  return stats;
}

inline EvalResult evaluate_scene(const std::vector<Detection>& dets,
                                 const std::vector<GtItem>& gt,
                                 double iou_threshold = 0.5) {
  const MatchStats s = match_detections(dets, gt, iou_threshold);
  return make_eval_result(s.tp, s.fp, s.fn);
}

/// Macro-averaged dataset metrics: per-image precision/recall/F are computed
/// first and then averaged arithmetically; the counts are summed for
/// reference.
inline EvalResult evaluate_dataset(
    const std::vector<std::pair<std::vector<Detection>, std::vector<GtItem>>>& scenes,
    double iou_threshold = 0.5) {
  if (scenes.empty()) throw std::invalid_argument("evaluate_dataset: empty scene list");
  EvalResult total;
  double p = 0.0, r = 0.0, f = 0.0;
  for (const auto& [dets, gt] : scenes) {
    const EvalResult e = evaluate_scene(dets, gt, iou_threshold);
    total.tp += e.tp;
    total.fp += e.fp;
    total.fn += e.fn;
    p += e.precision;
    r += e.recall;
    f += e.f_measure;
  }
  const double n = static_cast<double>(scenes.size());
  total.precision = p / n;
  total.recall = r / n;
  total.f_measure = f / n;
  return total;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_EVAL_HPP_

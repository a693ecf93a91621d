#ifndef SHELFCHECK_GRAPH_BUILDER_HPP_
#define SHELFCHECK_GRAPH_BUILDER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "shelfcheck/direction.hpp"
#include "shelfcheck/geometry.hpp"
#include "shelfcheck/planogram.hpp"

namespace shelfcheck {

struct BuilderParams {
  /// Neighbor admission radius as a multiple of the mean bbox diagonal of
  /// the two candidates.
  double alpha = 1.2;
  /// Half-width of each direction sector in degrees. 22.5 tiles the circle.
  double sector_half_width_deg = 22.5;
};

/// Classifies the offset from one box center to another into one of the
/// eight direction sectors. Sectors are half-open, [center - w, center + w)
/// walking counterclockwise; with the default width they tile the circle and
/// a direction is always returned. Throws on identical centers.
inline std::optional<Direction> classify_direction(const Point& from, const Point& to,
                                                   double sector_half_width_deg = 22.5) {
  const double dx = to.x - from.x;
  const double dy = to.y - from.y;
  if (dx == 0.0 && dy == 0.0) {
    throw std::invalid_argument("classify_direction: degenerate offset");
  }
  // Math convention (counterclockwise from E) on the y-down image plane.
  constexpr double rad2deg = 57.29577951308232;
  double angle = std::atan2(-dy, dx) * rad2deg;
  if (angle < 0.0) angle += 360.0;
  // Sector k covers [45k - w, 45k + w); k = 0 is E, counting counterclockwise.
  static constexpr std::array<Direction, 8> by_sector = {
      Direction::E, Direction::NE, Direction::N, Direction::NW,
      Direction::W, Direction::SW, Direction::S, Direction::SE};
  const int k = static_cast<int>(std::floor((angle + 22.5) / 45.0)) % 8;
  const double center = 45.0 * k;
  double delta = angle - center;
  if (delta >= 180.0) delta -= 360.0;
  if (delta < -180.0) delta += 360.0;
  if (delta < -sector_half_width_deg || delta >= sector_half_width_deg) {
    return std::nullopt;
  }
  return by_sector[k];
}

/// Builds the observed planogram from a flat detection list. Every admissible
/// proximity pair becomes a candidate edge; candidates are accepted closest
/// first, so a contested direction slot always goes to the nearest pair and
/// the output is independent of the input ordering.
inline ObservedPlanogram build_observed(std::vector<Detection> detections,
                                        const BuilderParams& params = {}) {
  if (!(params.alpha > 0.0)) {
    throw std::invalid_argument("build_observed: alpha must be positive");
  }
  std::sort(detections.begin(), detections.end(),
            [](const Detection& a, const Detection& b) { return a.det_id < b.det_id; });
  {
    std::unordered_set<std::string> ids;
    for (const Detection& d : detections) {
      if (!ids.insert(d.det_id).second) {
        throw std::invalid_argument("build_observed: duplicate det_id '" + d.det_id + "'");
      }
    }
  }

  struct Candidate {
    double dist;
    int a, b;  // indices into the sorted detection list, a < b
    Direction dir_ab;
  };
  std::vector<Candidate> candidates;
  const int n = static_cast<int>(detections.size());
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const Point ca = detections[a].bbox.center();
      const Point cb = detections[b].bbox.center();
      if (ca.x == cb.x && ca.y == cb.y) continue;  // coincident centers pair with nobody
      const double dist = distance(ca, cb);
      const double threshold = params.alpha *
          (detections[a].bbox.diagonal() + detections[b].bbox.diagonal()) / 2.0;
      if (dist > threshold) continue;
      const auto dir = classify_direction(ca, cb, params.sector_half_width_deg);
      if (!dir) continue;
      candidates.push_back({dist, a, b, *dir});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](const Candidate& x, const Candidate& y) {
              if (x.dist != y.dist) return x.dist < y.dist;
              if (detections[x.a].det_id != detections[y.a].det_id)
                return detections[x.a].det_id < detections[y.a].det_id;
              return detections[x.b].det_id < detections[y.b].det_id;
            });

  std::vector<std::array<bool, 8>> taken(n, {false, false, false, false,
                                             false, false, false, false});
  std::vector<Edge> edges;
  for (const Candidate& c : candidates) {
    const Direction d_ab = c.dir_ab;
    const Direction d_ba = opposite(d_ab);
    bool& slot_a = taken[c.a][static_cast<int>(d_ab)];
    bool& slot_b = taken[c.b][static_cast<int>(d_ba)];
    if (slot_a || slot_b) continue;
    slot_a = slot_b = true;
    edges.push_back({detections[c.a].det_id, d_ab, detections[c.b].det_id});
    edges.push_back({detections[c.b].det_id, d_ba, detections[c.a].det_id});
  }

  std::vector<ObservedNode> nodes;
  nodes.reserve(detections.size());
  for (Detection& d : detections) {
    std::string id = d.det_id;
    nodes.push_back({std::move(id), std::move(d)});
  }
  return ObservedPlanogram(std::move(nodes), std::move(edges));
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_GRAPH_BUILDER_HPP_

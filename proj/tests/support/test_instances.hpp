// Shared builders for hand-crafted and randomized solver instances.
#ifndef SHELFCHECK_TESTS_SUPPORT_TEST_INSTANCES_HPP_
#define SHELFCHECK_TESTS_SUPPORT_TEST_INSTANCES_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "shelfcheck/graph_builder.hpp"
#include "shelfcheck/planogram.hpp"
#include "shelfcheck/rng.hpp"
#include "shelfcheck/simulator.hpp"

namespace shelfcheck::testing {

/// Reference planogram from a grid of product labels; full 8-neighborhood.
inline ReferencePlanogram ref_from_grid(const std::vector<std::vector<std::string>>& grid) {
  std::vector<ReferenceNode> nodes;
  std::vector<Edge> edges;
  const int rows = static_cast<int>(grid.size());
  for (int r = 0; r < rows; ++r) {
    const int cols = static_cast<int>(grid[r].size());
    for (int c = 0; c < cols; ++c) {
      nodes.push_back({sim_detail::node_name(r, c), grid[r][c], r, c, std::nullopt});
    }
  }
  for (int r = 0; r < rows; ++r) {
    const int cols = static_cast<int>(grid[r].size());
    for (int c = 0; c < cols; ++c) {
      for (Direction d : kAllDirections) {
        const auto [dr, dc] = grid_offset(d);
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nr >= rows || nc < 0 ||
            nc >= static_cast<int>(grid[nr].size()))
          continue;
        edges.push_back({sim_detail::node_name(r, c), d, sim_detail::node_name(nr, nc)});
      }
    }
  }
  return ReferencePlanogram(std::move(nodes), std::move(edges));
}

/// Noise-free detections covering every facing of a reference planogram.
inline std::vector<Detection> detections_for(const ReferencePlanogram& ref,
                                             double cell_w = 60.0, double cell_h = 60.0,
                                             double fill = 0.9) {
  std::vector<Detection> dets;
  for (const ReferenceNode& n : ref.nodes()) {
    dets.push_back({"o_" + n.node_id, n.product,
                    BBox(n.col * cell_w, n.row * cell_h, cell_w * fill, cell_h * fill), 1.0});
  }
  return dets;
}

struct RandomInstance {
  ReferencePlanogram ref;
  ObservedPlanogram obs;
};

/// Small randomized solver instance: |I|, |O| <= 8 (two-row grids of 2-4
/// columns), 3-6 product labels, a few missed detections, jitter, and up to
/// three injected label mismatches (at most one per four facings, so label
/// noise stays noise rather than a full scramble).
inline RandomInstance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  const int rows = 2;
  const int cols = 2 + static_cast<int>(rng.next_below(3));
  const int alphabet = 3 + static_cast<int>(rng.next_below(4));

  ReferencePlanogram ref = gen_planogram(rows, cols, alphabet, rng.next_u64());
  const GroundTruthScene gt = gen_scene(ref, 50.0, 40.0, 0.0, rng.next_u64());

  NoiseParams noise;
  noise.miss_rate = 0.08 * rng.next_double();
  noise.jitter_sigma = 1.5;
  noise.seed = rng.next_u64();
  std::vector<Detection> dets = corrupt(gt, noise);

  const std::vector<ProductId> catalog = catalog_of(ref);
  const int cap = std::min(3, rows * cols / 4);
  const int mismatches = static_cast<int>(rng.next_below(cap + 1));
  for (int m = 0; m < mismatches && !dets.empty(); ++m) {
    Detection& d = dets[rng.next_below(dets.size())];
    d.product = catalog[rng.next_below(catalog.size())];
  }
  return {std::move(ref), build_observed(dets)};
}

}  // namespace shelfcheck::testing

#endif  // SHELFCHECK_TESTS_SUPPORT_TEST_INSTANCES_HPP_

#include "shelfcheck/graph_builder.hpp"

#include <algorithm>
#include <gtest/gtest.h>

#include "shelfcheck/simulator.hpp"
#include "support/test_instances.hpp"

namespace shelfcheck {
namespace {

std::vector<std::string> edge_triples(const ObservedPlanogram& g) {
  std::vector<std::string> out;
  for (const Edge& e : g.edges()) {
    out.push_back(e.from + ">" + std::string(direction_name(e.dir)) + ">" + e.to);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Detection det(const std::string& id, const std::string& product, double cx, double cy,
              double w, double h) {
  return {id, product, BBox(cx - w / 2.0, cy - h / 2.0, w, h), 1.0};
}

TEST(GraphBuilder, TwoByTwoLatticeGetsFullEightNeighborhood) {
  // 36x36 boxes on a 40px pitch: threshold 1.2 * diag = 61.1 admits both the
  // 40px axis step and the 56.6px diagonal.
  const std::vector<Detection> dets = {det("a", "A", 20, 20, 36, 36),
                                       det("b", "B", 60, 20, 36, 36),
                                       det("c", "C", 20, 60, 36, 36),
                                       det("d", "D", 60, 60, 36, 36)};
  const ObservedPlanogram g = build_observed(dets);
  EXPECT_TRUE(validate_graph(g).empty());
  EXPECT_EQ(g.edges().size(), 12u);  // 6 undirected: 2 horizontal, 2 vertical, 2 diagonal
  EXPECT_EQ(g.neighbor("a", Direction::E)->node_id, "b");
  EXPECT_EQ(g.neighbor("a", Direction::S)->node_id, "c");
  EXPECT_EQ(g.neighbor("a", Direction::SE)->node_id, "d");
  EXPECT_EQ(g.neighbor("d", Direction::NW)->node_id, "a");
  EXPECT_EQ(g.neighbor("b", Direction::SW)->node_id, "c");
}

TEST(GraphBuilder, DistantColumnExceedsThreshold) {
  // Right column moved 180px away; only the vertical edges survive.
  const std::vector<Detection> dets = {det("a", "A", 20, 20, 36, 36),
                                       det("b", "B", 200, 20, 36, 36),
                                       det("c", "C", 20, 60, 36, 36),
                                       det("d", "D", 200, 60, 36, 36)};
  const ObservedPlanogram g = build_observed(dets);
  EXPECT_EQ(g.neighbor("a", Direction::E), nullptr);
  EXPECT_EQ(g.neighbor("a", Direction::SE), nullptr);
  EXPECT_EQ(g.neighbor("a", Direction::S)->node_id, "c");
  EXPECT_EQ(g.neighbor("b", Direction::S)->node_id, "d");
  EXPECT_EQ(g.edges().size(), 4u);
}

TEST(GraphBuilder, NearestInSectorWinsTheSlot) {
  // B and C are both east of A and admissible; the closer B takes the slot.
  const std::vector<Detection> dets = {det("a", "A", 50, 50, 100, 100),
                                       det("b", "B", 150, 50, 100, 100),
                                       det("c", "C", 210, 50, 100, 100)};
  const ObservedPlanogram g = build_observed(dets);
  EXPECT_EQ(g.neighbor("a", Direction::E)->node_id, "b");
  EXPECT_EQ(g.neighbor("b", Direction::E)->node_id, "c");
  EXPECT_EQ(g.neighbor("c", Direction::W)->node_id, "b");
}

TEST(GraphBuilder, PermutationInvariant) {
  const ReferencePlanogram ref = gen_planogram(3, 4, 5, 99);
  const GroundTruthScene gt = gen_scene(ref, 60, 60, 0.0, 99);
  NoiseParams noise;
  noise.jitter_sigma = 3.0;
  noise.seed = 5;
  std::vector<Detection> dets = corrupt(gt, noise);

  const auto baseline = edge_triples(build_observed(dets));
  std::reverse(dets.begin(), dets.end());
  EXPECT_EQ(edge_triples(build_observed(dets)), baseline);
  std::rotate(dets.begin(), dets.begin() + dets.size() / 2, dets.end());
  EXPECT_EQ(edge_triples(build_observed(dets)), baseline);
}

TEST(GraphBuilder, NoiseFreeSceneReproducesReferenceStructure) {
  const ReferencePlanogram ref = gen_planogram(3, 4, 6, 123);
  const std::vector<Detection> dets = testing::detections_for(ref);
  const ObservedPlanogram obs = build_observed(dets);

  ASSERT_EQ(obs.size(), ref.size());
  EXPECT_TRUE(validate_graph(obs).empty());
  for (const ReferenceNode& n : ref.nodes()) {
    const std::string obs_id = "o_" + n.node_id;
    for (Direction d : kAllDirections) {
      const ReferenceNode* rn = ref.neighbor(n.node_id, d);
      const ObservedNode* on = obs.neighbor(obs_id, d);
      ASSERT_EQ(rn != nullptr, on != nullptr)
          << n.node_id << " " << direction_name(d);
      if (rn) {
        EXPECT_EQ(on->node_id, "o_" + rn->node_id);
        EXPECT_EQ(on->detection.product, rn->product);
      }
    }
  }
}

TEST(GraphBuilder, OutputAlwaysStructurallyValid) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = testing::random_instance(seed);
    EXPECT_TRUE(validate_graph(inst.obs).empty()) << "seed " << seed;
    for (std::size_t i = 0; i < inst.obs.size(); ++i) {
      EXPECT_LE(inst.obs.degree(static_cast<int>(i)), 8);
    }
  }
}

TEST(GraphBuilder, DuplicateDetIdThrows) {
  const std::vector<Detection> dets = {det("a", "A", 0, 0, 10, 10),
                                       det("a", "B", 50, 0, 10, 10)};
  EXPECT_THROW(build_observed(dets), std::invalid_argument);
}

TEST(GraphBuilder, CoincidentCentersFormNoEdge) {
  const std::vector<Detection> dets = {det("a", "A", 20, 20, 30, 30),
                                       det("b", "B", 20, 20, 30, 30)};
  const ObservedPlanogram g = build_observed(dets);
  EXPECT_TRUE(g.edges().empty());
}

}  // namespace
}  // namespace shelfcheck

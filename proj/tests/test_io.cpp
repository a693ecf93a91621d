#include "shelfcheck/io.hpp"

#include <filesystem>
#include <gtest/gtest.h>

#include "shelfcheck/image.hpp"
#include "shelfcheck/simulator.hpp"
#include "support/test_instances.hpp"

namespace shelfcheck {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("shelfcheck_io_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(IoTest, PlanogramRoundTrip) {
  const ReferencePlanogram original = gen_planogram(3, 4, 6, 77);
  save_planogram(original, path("p.json"));
  const ReferencePlanogram loaded = load_planogram(path("p.json"));

  ASSERT_EQ(loaded.size(), original.size());
  for (std::size_t i = 0; i < original.size(); ++i) {
    EXPECT_EQ(loaded.node_at(i).node_id, original.node_at(i).node_id);
    EXPECT_EQ(loaded.node_at(i).product, original.node_at(i).product);
    EXPECT_EQ(loaded.node_at(i).row, original.node_at(i).row);
    EXPECT_EQ(loaded.node_at(i).col, original.node_at(i).col);
  }
  EXPECT_EQ(loaded.edges().size(), original.edges().size());
}

TEST_F(IoTest, EdgesDerivedFromGridWhenOmitted) {
  const json j = {
      {"products", {{{"id", "A"}}, {{"id", "B"}}, {{"id", "C"}}, {{"id", "D"}}}},
      {"nodes",
       {{{"node_id", "n00"}, {"product", "A"}, {"row", 0}, {"col", 0}},
        {{"node_id", "n01"}, {"product", "B"}, {"row", 0}, {"col", 1}},
        {{"node_id", "n10"}, {"product", "C"}, {"row", 1}, {"col", 0}},
        {{"node_id", "n11"}, {"product", "D"}, {"row", 1}, {"col", 1}}}}};
  const ReferencePlanogram p = planogram_from_json(j);
  EXPECT_EQ(p.edges().size(), 12u);
  EXPECT_EQ(p.neighbor("n00", Direction::E)->node_id, "n01");
  EXPECT_EQ(p.neighbor("n00", Direction::SE)->node_id, "n11");
  EXPECT_TRUE(validate_graph(p).empty());
}

TEST_F(IoTest, MetricSizesTravelThroughProducts) {
  const json j = {{"products", {{{"id", "A"}, {"width_mm", 120.0}, {"height_mm", 80.0}}}},
                  {"nodes", {{{"node_id", "n"}, {"product", "A"}, {"row", 0}, {"col", 0}}}}};
  const ReferencePlanogram p = planogram_from_json(j);
  ASSERT_TRUE(p.node("n").metric_size.has_value());
  EXPECT_DOUBLE_EQ(p.node("n").metric_size->width_mm, 120.0);
}

TEST_F(IoTest, UnknownProductRejected) {
  const json j = {{"products", {{{"id", "A"}}}},
                  {"nodes", {{{"node_id", "n"}, {"product", "Z"}, {"row", 0}, {"col", 0}}}}};
  EXPECT_THROW(planogram_from_json(j), std::runtime_error);
}

TEST_F(IoTest, WhitespaceProductIdRejected) {
  const json j = {{"products", {{{"id", "A B"}}}}, {"nodes", json::array()}};
  EXPECT_THROW(planogram_from_json(j), std::runtime_error);
}

TEST_F(IoTest, DetectionRoundTrip) {
  DetectionFile f;
  f.image_width = 240;
  f.image_height = 180;
  f.detections = {{"d0", "P00", BBox(1.5, 2.25, 54, 54), 0.75},
                  {"d1", "P01", BBox(60, 0, 54, 54), 1.0}};
  save_detections(f, path("d.json"));
  const DetectionFile loaded = load_detections(path("d.json"));
  ASSERT_EQ(loaded.detections.size(), 2u);
  EXPECT_EQ(loaded.image_width, 240);
  EXPECT_EQ(loaded.detections[0].det_id, "d0");
  EXPECT_DOUBLE_EQ(loaded.detections[0].bbox.x, 1.5);
  EXPECT_DOUBLE_EQ(loaded.detections[0].confidence, 0.75);
}

TEST_F(IoTest, MalformedDetectionFileThrows) {
  {
    std::ofstream out(path("broken.json"));
    out << "{ not json";
  }
  EXPECT_THROW(load_detections(path("broken.json")), std::runtime_error);

  {
    std::ofstream out(path("fields.json"));
    out << R"({"image": {"width": 10, "height": 10}, "detections": [{"det_id": "d"}]})";
  }
  EXPECT_THROW(load_detections(path("fields.json")), std::runtime_error);
}

TEST_F(IoTest, GroundTruthRoundTripAndScene) {
  const ReferencePlanogram p = gen_planogram(2, 3, 5, 5);
  const GroundTruthScene gt = gen_scene(p, 60, 60, 0.3, 5);
  save_ground_truth(gt, path("gt.json"));
  const GroundTruthFile loaded = load_ground_truth(path("gt.json"));
  EXPECT_EQ(loaded.items.size(), gt.items.size());
  EXPECT_EQ(loaded.absent, gt.absent);

  const GroundTruthScene rebuilt = make_ground_truth_scene(p, loaded);
  EXPECT_EQ(rebuilt.items.size(), gt.items.size());
}

TEST_F(IoTest, AnnotationStyleGroundTruthAccepted) {
  const json j = {{"detections",
                   {{{"node_id", "n0"}, {"product", "A"}, {"x", 0.0}, {"y", 0.0},
                     {"w", 10.0}, {"h", 10.0}}}}};
  const GroundTruthFile f = ground_truth_from_json(j);
  ASSERT_EQ(f.items.size(), 1u);
  EXPECT_EQ(f.items[0].first, "n0");
  EXPECT_TRUE(f.absent.empty());
}

TEST_F(IoTest, PgmBinaryAndPlainRoundTrip) {
  ImageGrid img(7, 5);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    img.pixels[i] = static_cast<std::uint8_t>((i * 37) % 256);
  }
  save_pgm(img, path("raw.pgm"));
  const ImageGrid raw = load_pgm(path("raw.pgm"));
  EXPECT_EQ(raw.width, 7);
  EXPECT_EQ(raw.height, 5);
  EXPECT_EQ(raw.pixels, img.pixels);

  save_pgm(img, path("plain.pgm"), /*plain=*/true);
  const ImageGrid plain = load_pgm(path("plain.pgm"));
  EXPECT_EQ(plain.pixels, img.pixels);
}

TEST_F(IoTest, PgmHeaderCommentsAndErrors) {
  {
    std::ofstream out(path("commented.pgm"));
    out << "P2\n# a comment\n2 2\n255\n0 64\n128 255\n";
  }
  const ImageGrid img = load_pgm(path("commented.pgm"));
  EXPECT_EQ(img.at(1, 0), 64);
  EXPECT_EQ(img.at(1, 1), 255);

  {
    std::ofstream out(path("bad_magic.pgm"));
    out << "P6\n2 2\n255\n";
  }
  EXPECT_THROW(load_pgm(path("bad_magic.pgm")), std::runtime_error);

  {
    std::ofstream out(path("truncated.pgm"), std::ios::binary);
    out << "P5\n4 4\n255\nab";
  }
  EXPECT_THROW(load_pgm(path("truncated.pgm")), std::runtime_error);
}

TEST_F(IoTest, ManifestParsing) {
  {
    std::ofstream out(path("manifest.json"));
    out << R"({"planogram": "p.json",
               "scenes": [{"detections": "d0.json", "ground_truth": "g0.json",
                           "scene_image": "s0.pgm", "templates": "tpl"}]})";
  }
  const Manifest m = load_manifest(path("manifest.json"));
  ASSERT_EQ(m.planograms.size(), 1u);
  ASSERT_EQ(m.scenes.size(), 1u);
  EXPECT_EQ(m.scenes[0].templates, "tpl");

  {
    std::ofstream out(path("empty.json"));
    out << R"({"planogram": "p.json", "scenes": []})";
  }
  EXPECT_THROW(load_manifest(path("empty.json")), std::runtime_error);
}

TEST_F(IoTest, SaveIsByteStableAcrossRuns) {
  const ReferencePlanogram p = gen_planogram(3, 4, 6, 99);
  save_planogram(p, path("a.json"));
  save_planogram(p, path("b.json"));
  std::ifstream a(path("a.json")), b(path("b.json"));
  const std::string sa((std::istreambuf_iterator<char>(a)), {});
  const std::string sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);
  EXPECT_FALSE(sa.empty());
}

}  // namespace
}  // namespace shelfcheck

#include "shelfcheck/zncc.hpp"

#include <gtest/gtest.h>

#include "shelfcheck/simulator.hpp"

namespace shelfcheck {
namespace {

// Deterministic texture with sample values well inside [0, 255] so integer
// gain/bias transforms stay exact.
ImageGrid small_texture(int w, int h, std::uint64_t salt) {
  ImageGrid img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint64_t v = sim_detail::mix64(salt ^ (y * 131ULL + x));
      img.set(x, y, static_cast<std::uint8_t>(v % 100));
    }
  }
  return img;
}

ImageGrid embed(const ImageGrid& tmpl, int scene_w, int scene_h, int ox, int oy,
                int gain = 1, int bias = 0) {
  ImageGrid scene(scene_w, scene_h, 128);
  for (int y = 0; y < tmpl.height; ++y) {
    for (int x = 0; x < tmpl.width; ++x) {
      scene.set(ox + x, oy + y,
                static_cast<std::uint8_t>(gain * tmpl.at(x, y) + bias));
    }
  }
  return scene;
}

TEST(Zncc, IdentityPlacementScoresOne) {
  const ImageGrid tmpl = small_texture(24, 24, 7);
  const ImageGrid scene = embed(tmpl, 100, 100, 31, 42);
  EXPECT_NEAR(zncc_at(tmpl, scene, 31, 42), 1.0, 1e-9);
}

TEST(Zncc, AffineGainAndBiasInvariance) {
  const ImageGrid tmpl = small_texture(20, 20, 3);
  // window = 2*T + 30 stays within range for samples < 100.
  const ImageGrid scene = embed(tmpl, 80, 80, 10, 10, 2, 30);
  EXPECT_NEAR(zncc_at(tmpl, scene, 10, 10), 1.0, 1e-9);
}

TEST(Zncc, ZeroVarianceScoresZero) {
  const ImageGrid tmpl = small_texture(16, 16, 5);
  const ImageGrid flat(64, 64, 200);
  EXPECT_DOUBLE_EQ(zncc_at(tmpl, flat, 5, 5), 0.0);

  const ImageGrid flat_tmpl(16, 16, 99);
  const ImageGrid scene = embed(tmpl, 64, 64, 0, 0);
  EXPECT_DOUBLE_EQ(zncc_at(flat_tmpl, scene, 0, 0), 0.0);
}

TEST(Zncc, AntiCorrelatedWindowScoresMinusOne) {
  ImageGrid tmpl(8, 8);
  ImageGrid scene(32, 32, 128);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) {
      const std::uint8_t v = static_cast<std::uint8_t>((x * 13 + y * 29) % 90);
      tmpl.set(x, y, v);
      scene.set(x, y, static_cast<std::uint8_t>(200 - v));  // gain -1, bias 200
    }
  }
  EXPECT_NEAR(zncc_at(tmpl, scene, 0, 0), -1.0, 1e-9);
}

TEST(ZnccMatch, FindsTheEmbeddedTemplate) {
  const ImageGrid tmpl = small_texture(24, 24, 11);
  const ImageGrid scene = embed(tmpl, 120, 120, 48, 36);
  const BBox roi(48, 36, 24, 24);  // exactly the true box

  const std::vector<Proposal> proposals = zncc_match(tmpl, scene, roi);
  ASSERT_FALSE(proposals.empty());
  double best = 0.0;
  BBox best_box(0, 0, 1, 1);
  for (const Proposal& p : proposals) {
    EXPECT_GT(iou(p.bbox, roi), 0.0);  // proposals intersect the ROI
    if (p.raw_score > best) {
      best = p.raw_score;
      best_box = p.bbox;
    }
  }
  EXPECT_NEAR(best, 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(best_box.x, 48.0);
  EXPECT_DOUBLE_EQ(best_box.y, 36.0);
  EXPECT_DOUBLE_EQ(best_box.w, 24.0);
  EXPECT_DOUBLE_EQ(best_box.h, 24.0);
}

TEST(ZnccMatch, EmptyWhenRoiIsOutsideTheScene) {
  const ImageGrid tmpl = small_texture(16, 16, 2);
  const ImageGrid scene(64, 64, 128);
  EXPECT_TRUE(zncc_match(tmpl, scene, BBox(-200, -200, 50, 50)).empty());
}

TEST(ZnccMatch, ScalesProduceScaledBoxes) {
  const ImageGrid tmpl = small_texture(20, 20, 13);
  const ImageGrid scene = embed(tmpl, 200, 200, 90, 90);
  const BBox roi(60, 60, 80, 80);
  bool saw_scaled = false;
  for (const Proposal& p : zncc_match(tmpl, scene, roi, {0.8})) {
    EXPECT_DOUBLE_EQ(p.bbox.w, 16.0);
    EXPECT_DOUBLE_EQ(p.bbox.h, 16.0);
    saw_scaled = true;
  }
  EXPECT_TRUE(saw_scaled);
}

TEST(ResizeNearest, IdentityKeepsPixels) {
  const ImageGrid img = small_texture(15, 9, 17);
  const ImageGrid same = resize_nearest(img, 15, 9);
  EXPECT_EQ(same.pixels, img.pixels);
}

TEST(ZnccMatcher, MissingTemplateThrows) {
  ZnccMatcher matcher(ImageGrid(32, 32, 128), {});
  EXPECT_THROW(matcher.find_proposals("P00", BBox(0, 0, 10, 10)), std::runtime_error);
}

}  // namespace
}  // namespace shelfcheck

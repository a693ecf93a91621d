#ifndef SHELFCHECK_ZNCC_HPP_
#define SHELFCHECK_ZNCC_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "shelfcheck/geometry.hpp"
#include "shelfcheck/image.hpp"
#include "shelfcheck/verify.hpp"

namespace shelfcheck {

struct ZnccParams {
  std::vector<double> scales = {0.8, 1.0, 1.25};
};

/// Nearest-neighbor resize.
inline ImageGrid resize_nearest(const ImageGrid& src, int w, int h) {
  if (w <= 0 || h <= 0) throw std::invalid_argument("resize_nearest: bad size");
  ImageGrid dst(w, h);
  for (int y = 0; y < h; ++y) {
    int sy = static_cast<int>((y + 0.5) * src.height / h);
    sy = std::min(sy, src.height - 1);
    for (int x = 0; x < w; ++x) {
      int sx = static_cast<int>((x + 0.5) * src.width / w);
      sx = std::min(sx, src.width - 1);
      dst.set(x, y, src.at(sx, sy));
    }
  }
  return dst;
}

/// Zero-mean normalized cross-correlation of the template against the scene
/// window anchored at (ox, oy). Zero-variance template or window scores 0.
inline double zncc_at(const ImageGrid& tmpl, const ImageGrid& scene, int ox, int oy) {
  const int w = tmpl.width, h = tmpl.height;
  const double n = static_cast<double>(w) * h;
  double sum_t = 0.0, sum_w = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      sum_t += tmpl.at(x, y);
      sum_w += scene.at(ox + x, oy + y);
    }
  }
  const double mu_t = sum_t / n, mu_w = sum_w / n;
  double cross = 0.0, var_t = 0.0, var_w = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dt = tmpl.at(x, y) - mu_t;
      const double dw = scene.at(ox + x, oy + y) - mu_w;
      cross += dt * dw;
      var_t += dt * dt;
      var_w += dw * dw;
    }
  }
  if (var_t <= 0.0 || var_w <= 0.0) return 0.0;
  return cross / (n * std::sqrt(var_t / n) * std::sqrt(var_w / n));
}

/// Slides the template (at each scale, nearest-neighbor rescaled) across the
/// ROI and returns the positive local maxima of the clamped correlation map
/// as proposals. Stride is an eighth of the scaled template's short side.
inline std::vector<Proposal> zncc_match(const ImageGrid& tmpl, const ImageGrid& scene,
                                        const BBox& roi,
                                        const std::vector<double>& scales = {0.8, 1.0, 1.25}) {
  std::vector<Proposal> proposals;
  for (double scale : scales) {
    const int tw = std::max(1, static_cast<int>(std::lround(tmpl.width * scale)));
    const int th = std::max(1, static_cast<int>(std::lround(tmpl.height * scale)));
    if (tw > scene.width || th > scene.height) continue;
    const ImageGrid scaled =
        (tw == tmpl.width && th == tmpl.height) ? tmpl : resize_nearest(tmpl, tw, th);

    const int stride = std::max(1, static_cast<int>(std::lround(std::min(tw, th) / 8.0)));
    // Anchors inside both the ROI and the scene.
    const int x_lo = std::max(static_cast<int>(std::ceil(roi.x)), 0);
    const int x_hi = std::min(static_cast<int>(std::floor(roi.right())) - tw, scene.width - tw);
    const int y_lo = std::max(static_cast<int>(std::ceil(roi.y)), 0);
    const int y_hi = std::min(static_cast<int>(std::floor(roi.bottom())) - th, scene.height - th);
    if (x_hi < x_lo || y_hi < y_lo) continue;

    const int nx = (x_hi - x_lo) / stride + 1;
    const int ny = (y_hi - y_lo) / stride + 1;
    std::vector<double> score_map(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double z = zncc_at(scaled, scene, x_lo + i * stride, y_lo + j * stride);
        score_map[static_cast<std::size_t>(j) * nx + i] = std::max(0.0, z);
      }
    }

    auto at = [&](int i, int j) { return score_map[static_cast<std::size_t>(j) * nx + i]; };
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double s = at(i, j);
        if (s <= 0.0) continue;
        bool is_max = true;
        for (int dj = -1; dj <= 1 && is_max; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            if (di == 0 && dj == 0) continue;
            const int ii = i + di, jj = j + dj;
            if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
            if (at(ii, jj) >= s) {
              is_max = false;
              break;
            }
          }
        }
        if (is_max) {
          proposals.push_back({BBox(x_lo + i * stride, y_lo + j * stride,
                                    static_cast<double>(tw), static_cast<double>(th)),
                               s});
        }
      }
    }
  }
  return proposals;
}

/// Template-matching verification backend: one graymap template per product,
/// correlated inside the ROI of the scene image.
class ZnccMatcher final : public Matcher {
 public:
  ZnccMatcher(ImageGrid scene, std::map<ProductId, ImageGrid> templates,
              ZnccParams params = {})
      : scene_(std::move(scene)), templates_(std::move(templates)),
        params_(std::move(params)) {}

  std::vector<Proposal> find_proposals(const ProductId& product, const BBox& roi) override {
    auto it = templates_.find(product);
    if (it == templates_.end()) {
      throw std::runtime_error("ZnccMatcher: no template for product '" + product + "'");
    }
    return zncc_match(it->second, scene_, roi, params_.scales);
  }

  std::optional<double> max_raw_score() const override { return 1.0; }

 private:
  ImageGrid scene_;
  std::map<ProductId, ImageGrid> templates_;
  ZnccParams params_;
};

}  // namespace shelfcheck

#endif  // SHELFCHECK_ZNCC_HPP_

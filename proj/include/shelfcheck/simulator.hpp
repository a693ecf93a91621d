#ifndef SHELFCHECK_SIMULATOR_HPP_
#define SHELFCHECK_SIMULATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "shelfcheck/image.hpp"
#include "shelfcheck/planogram.hpp"
#include "shelfcheck/rng.hpp"

namespace shelfcheck {

/// Detector nuisance model: dropped items, spurious boxes, labels confused
/// within a product category, and position jitter. All effects are driven by
/// the seed only.
struct NoiseParams {
  double miss_rate = 0.0;
  double fp_rate = 0.0;        // expected false detections per true item
  double confusion_rate = 0.0; // label swap to a catalog-adjacent product
  double jitter_sigma = 0.0;   // pixels
  std::uint64_t seed = 0;
};

/// What is actually on the shelf: the planned layout, the items present with
/// their true boxes, and the planned facings that are void.
struct GroundTruthScene {
  ReferencePlanogram planogram;
  std::vector<std::pair<std::string, BBox>> items;  // (node_id, true bbox)
  std::vector<std::string> absent;                  // void facings
};

namespace sim_detail {

inline std::string pad2(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

inline std::string node_name(int row, int col) {
  return "r" + pad2(row) + "c" + pad2(col);
}

inline std::string product_name(int index) { return "P" + pad2(index); }

}  // namespace sim_detail

/// Sorted distinct products of a planogram.
inline std::vector<ProductId> catalog_of(const ReferencePlanogram& p) {
  std::set<ProductId> s;
  for (const ReferenceNode& n : p.nodes()) s.insert(n.product);
  return {s.begin(), s.end()};
}

/// Full rows x cols grid with 8-neighborhood edges; each facing's product is
/// drawn uniformly from a catalog of n_products (repeats give multi-facing
/// products).
inline ReferencePlanogram gen_planogram(int rows, int cols, int n_products,
                                        std::uint64_t seed) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("gen_planogram: non-positive dims");
  if (n_products <= 0) throw std::invalid_argument("gen_planogram: need at least one product");
  Rng rng = Rng(seed).split(1);

  std::vector<ReferenceNode> nodes;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int p = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n_products)));
      nodes.push_back({sim_detail::node_name(r, c), sim_detail::product_name(p), r, c,
                       std::nullopt});
    }
  }

  std::vector<Edge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      for (Direction d : kAllDirections) {
        const auto [dr, dc] = grid_offset(d);
        const int nr = r + dr, nc = c + dc;
        if (nr < 0 || nc < 0 || nr >= rows || nc >= cols) continue;
        edges.push_back({sim_detail::node_name(r, c), d, sim_detail::node_name(nr, nc)});
      }
    }
  }
  return ReferencePlanogram(std::move(nodes), std::move(edges));
}

/// Places each facing of the planogram on a uniform pixel grid; a facing is
/// void with probability void_rate. Item boxes fill 90% of their cell.
inline GroundTruthScene gen_scene(const ReferencePlanogram& p, double cell_w, double cell_h,
                                  double void_rate, std::uint64_t seed) {
  if (cell_w <= 0.0 || cell_h <= 0.0) throw std::invalid_argument("gen_scene: bad cell size");
  Rng rng = Rng(seed).split(2);
  GroundTruthScene gt;
  gt.planogram = p;
  for (const ReferenceNode& n : p.nodes()) {
    if (rng.bernoulli(void_rate)) {
      gt.absent.push_back(n.node_id);
    } else {
      gt.items.emplace_back(n.node_id,
                            BBox(n.col * cell_w, n.row * cell_h, cell_w * 0.9, cell_h * 0.9));
    }
  }
  return gt;
}

/// Applies the noise model to a ground-truth scene and returns the simulated
/// detector output. Surviving items keep their true label unless confused
/// with a category sibling; spurious boxes land uniformly on the canvas with
/// random labels.
inline std::vector<Detection> corrupt(const GroundTruthScene& gt, const NoiseParams& noise) {
  Rng rng = Rng(noise.seed).split(3);
  const std::vector<ProductId> catalog = catalog_of(gt.planogram);
  std::map<ProductId, int> catalog_index;
  for (std::size_t i = 0; i < catalog.size(); ++i) catalog_index[catalog[i]] = static_cast<int>(i);

  auto confuse = [&](const ProductId& p) -> ProductId {
    const int idx = catalog_index.at(p);
    const int lo = (idx / 4) * 4;
    const int hi = std::min<int>(lo + 4, static_cast<int>(catalog.size()));
    if (hi - lo < 2) return p;  // singleton category
    int pick = lo + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(hi - lo - 1)));
    if (pick >= idx) ++pick;
    return catalog[pick];
  };

  std::vector<Detection> dets;
  int serial = 0;
  auto next_id = [&]() {
    std::string s = std::to_string(serial++);
    while (s.size() < 3) s = "0" + s;
    return "d" + s;
  };

  for (const auto& [node_id, box] : gt.items) {
    if (rng.bernoulli(noise.miss_rate)) continue;
    const double dx = rng.gaussian_truncated(noise.jitter_sigma);
    const double dy = rng.gaussian_truncated(noise.jitter_sigma);
    ProductId label = gt.planogram.node(node_id).product;
    if (rng.bernoulli(noise.confusion_rate)) label = confuse(label);
    dets.push_back({next_id(), label, BBox(box.x + dx, box.y + dy, box.w, box.h), 1.0});
  }

  if (!gt.items.empty() && noise.fp_rate > 0.0) {
    double max_x = 0.0, max_y = 0.0, mean_w = 0.0, mean_h = 0.0;
    for (const auto& [id, box] : gt.items) {
      max_x = std::max(max_x, box.right());
      max_y = std::max(max_y, box.bottom());
      mean_w += box.w;
      mean_h += box.h;
    }
    mean_w /= static_cast<double>(gt.items.size());
    mean_h /= static_cast<double>(gt.items.size());
    const int n_fp = rng.poisson(noise.fp_rate * static_cast<double>(gt.items.size()));
    for (int i = 0; i < n_fp; ++i) {
      const double x = rng.next_double() * std::max(0.0, max_x - mean_w);
      const double y = rng.next_double() * std::max(0.0, max_y - mean_h);
      const ProductId label = catalog[rng.next_below(catalog.size())];
      dets.push_back({next_id(), label, BBox(x, y, mean_w, mean_h), 1.0});
    }
  }
  return dets;
}

struct RenderParams {
  int noise_period = 6;  // value-noise lattice pitch in pixels
};

struct RenderResult {
  ImageGrid image;
  std::map<ProductId, ImageGrid> templates;
};

namespace sim_detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t product_hash(const ProductId& p) {
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a
  for (unsigned char c : p) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline double lattice_value(std::uint64_t ph, int ix, int iy) {
  const std::uint64_t v = mix64(ph ^ (static_cast<std::uint64_t>(ix) * 0x9E3779B97F4A7C15ULL)
                                   ^ (static_cast<std::uint64_t>(iy) * 0xC2B2AE3D27D4EB4FULL));
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

/// Per-product value noise: bilinear interpolation of hashed lattice values.
/// A pure function of (product, pixel), so the same product renders
/// identically everywhere.
inline std::uint8_t texture_pixel(std::uint64_t ph, int u, int v, int period) {
  const int ix = u / period, iy = v / period;
  const double fx = static_cast<double>(u % period) / period;
  const double fy = static_cast<double>(v % period) / period;
  const double v00 = lattice_value(ph, ix, iy);
  const double v10 = lattice_value(ph, ix + 1, iy);
  const double v01 = lattice_value(ph, ix, iy + 1);
  const double v11 = lattice_value(ph, ix + 1, iy + 1);
  const double top = v00 * (1.0 - fx) + v10 * fx;
  const double bot = v01 * (1.0 - fx) + v11 * fx;
  return static_cast<std::uint8_t>(std::lround((top * (1.0 - fy) + bot * fy) * 255.0));
}

}  // namespace sim_detail

/// Renders a product's template at the given size.
inline ImageGrid render_template(const ProductId& product, int w, int h,
                                 const RenderParams& params = {}) {
  const std::uint64_t ph = sim_detail::product_hash(product);
  ImageGrid img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      img.set(x, y, sim_detail::texture_pixel(ph, x, y, params.noise_period));
    }
  }
  return img;
}

/// Paints the present items onto a mid-gray canvas and returns the pristine
/// per-product templates alongside. Template size is the modal item size.
/// Throws if any item falls outside the canvas.
inline RenderResult render_scene(const GroundTruthScene& gt, int width, int height,
                                 const RenderParams& params = {}) {
  RenderResult out;
  out.image = ImageGrid(width, height, 128);

  std::map<std::pair<int, int>, int> size_votes;
  for (const auto& [node_id, box] : gt.items) {
    const int x0 = static_cast<int>(std::lround(box.x));
    const int y0 = static_cast<int>(std::lround(box.y));
    const int w = static_cast<int>(std::lround(box.w));
    const int h = static_cast<int>(std::lround(box.h));
    if (x0 < 0 || y0 < 0 || x0 + w > width || y0 + h > height) {
      throw std::invalid_argument("render_scene: item '" + node_id + "' overflows canvas");
    }
    ++size_votes[{w, h}];
    const std::uint64_t ph =
        sim_detail::product_hash(gt.planogram.node(node_id).product);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        out.image.set(x0 + u, y0 + v,
                      sim_detail::texture_pixel(ph, u, v, params.noise_period));
      }
    }
  }

  if (!size_votes.empty()) {
    auto best = size_votes.begin();
    for (auto it = size_votes.begin(); it != size_votes.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    const auto [tw, th] = best->first;
    for (const ProductId& p : catalog_of(gt.planogram)) {
      out.templates.emplace(p, render_template(p, tw, th, params));
    }
  }
  return out;
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_SIMULATOR_HPP_

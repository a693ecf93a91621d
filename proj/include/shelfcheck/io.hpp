#ifndef SHELFCHECK_IO_HPP_
#define SHELFCHECK_IO_HPP_

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "shelfcheck/planogram.hpp"
#include "shelfcheck/simulator.hpp"

namespace shelfcheck {

using json = nlohmann::json;

namespace io_detail {

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

inline void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

inline void check_product_id(const std::string& id) {
  if (id.empty()) throw std::runtime_error("empty product id");
  for (unsigned char c : id) {
    if (std::isspace(c)) throw std::runtime_error("product id '" + id + "' contains whitespace");
  }
}

}  // namespace io_detail

// ---------------------------------------------------------------------------
// Planogram files
// ---------------------------------------------------------------------------
// { "products": [{"id", "width_mm"?, "height_mm"?}],
//   "nodes":    [{"node_id", "product", "row", "col"}],
//   "edges":    [["a", "NE", "b"], ...] }          // optional, derived from
//                                                  // the grid when omitted

inline ReferencePlanogram planogram_from_json(const json& j) {
  std::unordered_map<std::string, std::optional<MetricSize>> product_sizes;
  for (const json& p : j.at("products")) {
    const std::string id = p.at("id").get<std::string>();
    io_detail::check_product_id(id);
    std::optional<MetricSize> size;
    if (p.contains("width_mm") || p.contains("height_mm")) {
      const double w = p.at("width_mm").get<double>();
      const double h = p.at("height_mm").get<double>();
      if (w <= 0.0 || h <= 0.0) throw std::runtime_error("product '" + id + "': metric size must be positive");
      size = MetricSize{w, h};
    }
    if (!product_sizes.emplace(id, size).second) {
      throw std::runtime_error("duplicate product id '" + id + "'");
    }
  }

  std::vector<ReferenceNode> nodes;
  for (const json& n : j.at("nodes")) {
    ReferenceNode node;
    node.node_id = n.at("node_id").get<std::string>();
    node.product = n.at("product").get<std::string>();
    node.row = n.at("row").get<int>();
    node.col = n.at("col").get<int>();
    auto it = product_sizes.find(node.product);
    if (it == product_sizes.end()) {
      throw std::runtime_error("node '" + node.node_id + "' references unknown product '" +
                               node.product + "'");
    }
    node.metric_size = it->second;
    nodes.push_back(std::move(node));
  }

  std::vector<Edge> edges;
  if (j.contains("edges")) {
    for (const json& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw std::runtime_error("edge must be [from, dir, to]");
      const auto dir = parse_direction(e.at(1).get<std::string>());
      if (!dir) throw std::runtime_error("unknown direction '" + e.at(1).get<std::string>() + "'");
      edges.push_back({e.at(0).get<std::string>(), *dir, e.at(2).get<std::string>()});
    }
  } else {
    // 8-neighborhood on the integer grid.
    std::unordered_map<long long, const ReferenceNode*> by_pos;
    for (const ReferenceNode& n : nodes) {
      by_pos[static_cast<long long>(n.row) * 1000000LL + n.col] = &n;
    }
    for (const ReferenceNode& n : nodes) {
      for (Direction d : kAllDirections) {
        const auto [dr, dc] = grid_offset(d);
        auto it = by_pos.find(static_cast<long long>(n.row + dr) * 1000000LL + (n.col + dc));
        if (it != by_pos.end()) edges.push_back({n.node_id, d, it->second->node_id});
      }
    }
  }
  return ReferencePlanogram(std::move(nodes), std::move(edges));
}

/// Loads and structurally validates a reference planogram file.
inline ReferencePlanogram load_planogram(const std::string& path) {
  ReferencePlanogram p = planogram_from_json(io_detail::load_json_file(path));
  const auto violations = validate_graph(p);
  if (!violations.empty()) {
    throw std::runtime_error("invalid planogram '" + path + "': " + violations.front());
  }
  return p;
}

inline json planogram_to_json(const ReferencePlanogram& p) {
  json products = json::array();
  std::map<ProductId, std::optional<MetricSize>> sizes;
  for (const ReferenceNode& n : p.nodes()) {
    auto it = sizes.find(n.product);
    if (it == sizes.end()) {
      sizes.emplace(n.product, n.metric_size);
    } else if (!it->second && n.metric_size) {
      it->second = n.metric_size;
    }
  }
  for (const auto& [id, size] : sizes) {
    json entry{{"id", id}};
    if (size) {
      entry["width_mm"] = size->width_mm;
      entry["height_mm"] = size->height_mm;
    }
    products.push_back(entry);
  }

  json nodes = json::array();
  for (const ReferenceNode& n : p.nodes()) {
    nodes.push_back({{"node_id", n.node_id},
                     {"product", n.product},
                     {"row", n.row},
                     {"col", n.col}});
  }

  std::vector<Edge> sorted_edges = p.edges();
  std::sort(sorted_edges.begin(), sorted_edges.end(), [](const Edge& a, const Edge& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.dir != b.dir) return static_cast<int>(a.dir) < static_cast<int>(b.dir);
    return a.to < b.to;
  });
  json edges = json::array();
  for (const Edge& e : sorted_edges) {
    edges.push_back({e.from, std::string(direction_name(e.dir)), e.to});
  }
  return json{{"products", products}, {"nodes", nodes}, {"edges", edges}};
}

inline void save_planogram(const ReferencePlanogram& p, const std::string& path) {
  io_detail::save_json_file(planogram_to_json(p), path);
}

// ---------------------------------------------------------------------------
// Detection files
// ---------------------------------------------------------------------------
// { "image": {"width", "height"},
//   "detections": [{"det_id", "product", "x", "y", "w", "h", "confidence"}] }

struct DetectionFile {
  int image_width = 0;
  int image_height = 0;
  std::vector<Detection> detections;
};

inline DetectionFile detections_from_json(const json& j) {
  DetectionFile f;
  f.image_width = j.at("image").at("width").get<int>();
  f.image_height = j.at("image").at("height").get<int>();
  for (const json& d : j.at("detections")) {
    Detection det;
    det.det_id = d.at("det_id").get<std::string>();
    det.product = d.at("product").get<std::string>();
    io_detail::check_product_id(det.product);
    det.bbox = BBox(d.at("x").get<double>(), d.at("y").get<double>(),
                    d.at("w").get<double>(), d.at("h").get<double>());
    det.confidence = d.value("confidence", 0.0);
    if (det.confidence < 0.0) throw std::runtime_error("detection '" + det.det_id +
                                                       "': negative confidence");
    f.detections.push_back(std::move(det));
  }
  return f;
}

inline DetectionFile load_detections(const std::string& path) {
  try {
    return detections_from_json(io_detail::load_json_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid detection file '" + path + "': " + e.what());
  }
}

inline json detections_to_json(const DetectionFile& f) {
  json dets = json::array();
  for (const Detection& d : f.detections) {
    dets.push_back({{"det_id", d.det_id},
                    {"product", d.product},
                    {"x", d.bbox.x},
                    {"y", d.bbox.y},
                    {"w", d.bbox.w},
                    {"h", d.bbox.h},
                    {"confidence", d.confidence}});
  }
  return json{{"image", {{"width", f.image_width}, {"height", f.image_height}}},
              {"detections", dets}};
}

inline void save_detections(const DetectionFile& f, const std::string& path) {
  io_detail::save_json_file(detections_to_json(f), path);
}

// ---------------------------------------------------------------------------
// Ground-truth files
// ---------------------------------------------------------------------------
// Simulator form:  { "items": [{"node_id", "x", "y", "w", "h"}], "absent": [...] }
// Annotation form: { "detections": [{"node_id", "x", "y", "w", "h", ...}] }

struct GroundTruthFile {
  std::vector<std::pair<std::string, BBox>> items;
  std::vector<std::string> absent;
};

inline GroundTruthFile ground_truth_from_json(const json& j) {
  GroundTruthFile f;
  const char* key = j.contains("items") ? "items" : "detections";
  for (const json& it : j.at(key)) {
    f.items.emplace_back(it.at("node_id").get<std::string>(),
                         BBox(it.at("x").get<double>(), it.at("y").get<double>(),
                              it.at("w").get<double>(), it.at("h").get<double>()));
  }
  if (j.contains("absent")) {
    for (const json& a : j.at("absent")) f.absent.push_back(a.get<std::string>());
  }
  return f;
}

inline GroundTruthFile load_ground_truth(const std::string& path) {
  try {
    return ground_truth_from_json(io_detail::load_json_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid ground-truth file '" + path + "': " + e.what());
  }
}

inline json ground_truth_to_json(const GroundTruthScene& gt) {
  json items = json::array();
  for (const auto& [node_id, box] : gt.items) {
    items.push_back({{"node_id", node_id}, {"x", box.x}, {"y", box.y},
                     {"w", box.w}, {"h", box.h}});
  }
  json absent = json::array();
  for (const std::string& id : gt.absent) absent.push_back(id);
  return json{{"items", items}, {"absent", absent}};
}

inline void save_ground_truth(const GroundTruthScene& gt, const std::string& path) {
  io_detail::save_json_file(ground_truth_to_json(gt), path);
}

/// Rebuilds the full scene struct from a planogram plus a loaded file.
inline GroundTruthScene make_ground_truth_scene(const ReferencePlanogram& p,
                                                const GroundTruthFile& f) {
  GroundTruthScene gt;
  gt.planogram = p;
  gt.items = f.items;
  gt.absent = f.absent;
  for (const auto& [node_id, box] : gt.items) {
    if (!p.has_node(node_id)) {
      throw std::runtime_error("ground truth references unknown node '" + node_id + "'");
    }
  }
  return gt;
}

// ---------------------------------------------------------------------------
// Dataset manifests
// ---------------------------------------------------------------------------
// { "planogram": "...", | "planograms": ["...", ...],
//   "scenes": [{"detections", "ground_truth", "scene_image"?, "templates"?}] }

struct ManifestScene {
  std::string detections;
  std::string ground_truth;
  std::string scene_image;  // empty when absent
  std::string templates;    // empty when absent
};

struct Manifest {
  std::vector<std::string> planograms;
  std::vector<ManifestScene> scenes;
};

inline Manifest manifest_from_json(const json& j) {
  Manifest m;
  if (j.contains("planograms")) {
    for (const json& p : j.at("planograms")) m.planograms.push_back(p.get<std::string>());
  } else {
    m.planograms.push_back(j.at("planogram").get<std::string>());
  }
  if (m.planograms.empty()) throw std::runtime_error("manifest lists no planograms");
  for (const json& s : j.at("scenes")) {
    ManifestScene scene;
    scene.detections = s.at("detections").get<std::string>();
    scene.ground_truth = s.at("ground_truth").get<std::string>();
    scene.scene_image = s.value("scene_image", "");
    scene.templates = s.value("templates", "");
    m.scenes.push_back(std::move(scene));
  }
  if (m.scenes.empty()) throw std::runtime_error("manifest lists no scenes");
  return m;
}

inline Manifest load_manifest(const std::string& path) {
  try {
    return manifest_from_json(io_detail::load_json_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("invalid manifest '" + path + "': " + e.what());
  }
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_IO_HPP_

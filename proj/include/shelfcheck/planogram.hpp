#ifndef SHELFCHECK_PLANOGRAM_HPP_
#define SHELFCHECK_PLANOGRAM_HPP_

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "shelfcheck/direction.hpp"
#include "shelfcheck/geometry.hpp"

namespace shelfcheck {

using ProductId = std::string;

/// Physical product dimensions in millimetres, when the catalog knows them.
struct MetricSize {
  double width_mm = 0.0;
  double height_mm = 0.0;
};

/// One planned facing in the reference layout.
struct ReferenceNode {
  std::string node_id;
  ProductId product;
  int row = 0;
  int col = 0;
  std::optional<MetricSize> metric_size;
};

/// A labeled detection in image coordinates. Confidence is on the detector's
/// native scale (e.g. a match count) and only required to be non-negative.
struct Detection {
  std::string det_id;
  ProductId product;
  BBox bbox;
  double confidence = 0.0;
};

/// One detected item promoted to a graph node.
struct ObservedNode {
  std::string node_id;
  Detection detection;
};

/// Directed labeled edge (from, dir, to).
struct Edge {
  std::string from;
  Direction dir;
  std::string to;
};

namespace detail {
inline const std::string& id_of(const ReferenceNode& n) { return n.node_id; }
inline const std::string& id_of(const ObservedNode& n) { return n.node_id; }
}  // namespace detail

/// Grid-like labeled graph shared by the reference and observed planograms.
/// Nodes are kept sorted by id; each node has at most one neighbor per
/// direction. Construction keeps the raw edge list so that validate() can
/// report structural violations instead of silently repairing them.
/// Immutable after construction.
template <typename NodeT>
class LayoutGraph {
 public:
  LayoutGraph() = default;

  LayoutGraph(std::vector<NodeT> nodes, std::vector<Edge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    std::sort(nodes_.begin(), nodes_.end(), [](const NodeT& a, const NodeT& b) {
      return detail::id_of(a) < detail::id_of(b);
    });
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const std::string& id = detail::id_of(nodes_[i]);
      if (!index_.emplace(id, i).second) {
        throw std::invalid_argument("LayoutGraph: duplicate node id '" + id + "'");
      }
    }
    slots_.assign(nodes_.size(), empty_slots());
    for (const Edge& e : edges_) {
      const int a = index_of(e.from);
      const int b = index_of(e.to);
      if (a < 0 || b < 0) {
        throw std::invalid_argument("LayoutGraph: edge references unknown node");
      }
      // First writer wins on slot conflicts; validate() reports them.
      int& slot = slots_[a][static_cast<int>(e.dir)];
      if (slot < 0) slot = b;
    }
  }

  const std::vector<NodeT>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return nodes_.size(); }
  bool empty() const { return nodes_.empty(); }

  bool has_node(const std::string& id) const { return index_.count(id) != 0; }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : static_cast<int>(it->second);
  }

  const NodeT& node(const std::string& id) const {
    const int i = index_of(id);
    if (i < 0) throw std::out_of_range("LayoutGraph: unknown node '" + id + "'");
    return nodes_[i];
  }

  const NodeT& node_at(std::size_t i) const { return nodes_.at(i); }

  /// Neighbor index of node i along d, or -1.
  int neighbor_index(int i, Direction d) const {
    return slots_.at(i)[static_cast<int>(d)];
  }

  const NodeT* neighbor(const std::string& id, Direction d) const {
    const int i = index_of(id);
    if (i < 0) return nullptr;
    const int j = neighbor_index(i, d);
    return j < 0 ? nullptr : &nodes_[j];
  }

  int degree(int i) const {
    int n = 0;
    for (int s : slots_.at(i))
      if (s >= 0) ++n;
    return n;
  }

  /// Undirected connected components over the slot adjacency, as node indices.
  std::vector<std::vector<int>> connected_components() const {
    std::vector<std::vector<int>> comps;
    std::vector<char> seen(nodes_.size(), 0);
    for (std::size_t start = 0; start < nodes_.size(); ++start) {
      if (seen[start]) continue;
      std::vector<int> comp;
      std::vector<int> stack{static_cast<int>(start)};
      seen[start] = 1;
      while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        comp.push_back(v);
        for (Direction d : kAllDirections) {
          const int u = neighbor_index(v, d);
          if (u >= 0 && !seen[u]) {
            seen[u] = 1;
            stack.push_back(u);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
    return comps;
  }

 private:
  static std::array<int, 8> empty_slots() {
    return {-1, -1, -1, -1, -1, -1, -1, -1};
  }

  std::vector<NodeT> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::array<int, 8>> slots_;
  std::unordered_map<std::string, std::size_t> index_;
};

using ReferencePlanogram = LayoutGraph<ReferenceNode>;
using ObservedPlanogram = LayoutGraph<ObservedNode>;

namespace detail {

template <typename NodeT>
std::vector<std::string> validate_structure(const LayoutGraph<NodeT>& g) {
  std::vector<std::string> violations;
  auto triple = [](const std::string& from, Direction d, const std::string& to) {
    return from + "|" + std::string(direction_name(d)) + "|" + to;
  };
  // Per-node per-direction slot may be claimed by at most one edge.
  std::unordered_map<std::string, std::string> slot_owner;
  std::unordered_set<std::string> triples;
  for (const Edge& e : g.edges()) {
    triples.insert(triple(e.from, e.dir, e.to));
    const std::string key = e.from + "|" + std::string(direction_name(e.dir));
    auto [it, inserted] = slot_owner.emplace(key, e.to);
    if (!inserted && it->second != e.to) {
      violations.push_back("duplicate direction slot: node '" + e.from + "' has two " +
                           std::string(direction_name(e.dir)) + " neighbors ('" +
                           it->second + "', '" + e.to + "')");
    }
  }
  // Edge symmetry: (a, d, b) requires (b, opposite(d), a).
  for (const Edge& e : g.edges()) {
    if (!triples.count(triple(e.to, opposite(e.dir), e.from))) {
      violations.push_back("asymmetric edge: ('" + e.from + "', " +
                           std::string(direction_name(e.dir)) + ", '" + e.to +
                           "') lacks its reverse");
    }
  }
  return violations;
}

}  // namespace detail

/// Checks slot uniqueness, edge symmetry and connectivity. Returns a
/// description of every violation; empty means the graph is well formed.
inline std::vector<std::string> validate_graph(const ReferencePlanogram& g) {
  std::vector<std::string> violations = detail::validate_structure(g);
  std::unordered_map<long long, std::string> pos_seen;
  for (const ReferenceNode& n : g.nodes()) {
    const long long key = static_cast<long long>(n.row) * 1000000LL + n.col;
    auto [it, inserted] = pos_seen.emplace(key, n.node_id);
    if (!inserted) {
      violations.push_back("duplicate grid position for nodes '" + it->second +
                           "' and '" + n.node_id + "'");
    }
  }
  if (!g.empty() && g.connected_components().size() > 1) {
    violations.push_back("disconnected: reference planogram must be a single component");
  }
  return violations;
}

/// Observed graphs may be disconnected; only the structural checks apply.
inline std::vector<std::string> validate_graph(const ObservedPlanogram& g) {
  return detail::validate_structure(g);
}

/// Mean center-to-center distance over the undirected edges of the observed
/// graph. Falls back to the mean bbox diagonal when the graph has no edges,
/// so callers always get a usable length scale.
inline double mean_edge_length(const ObservedPlanogram& g) {
  double sum = 0.0;
  int count = 0;
  for (const Edge& e : g.edges()) {
    if (e.from < e.to) {  // count each undirected edge once
      sum += distance(g.node(e.from).detection.bbox.center(),
                      g.node(e.to).detection.bbox.center());
      ++count;
    }
  }
  if (count > 0) return sum / count;
  if (g.empty()) return 0.0;
  for (const ObservedNode& n : g.nodes()) sum += n.detection.bbox.diagonal();
  return sum / static_cast<double>(g.size());
}

}  // namespace shelfcheck

#endif  // SHELFCHECK_PLANOGRAM_HPP_

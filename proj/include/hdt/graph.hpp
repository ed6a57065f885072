#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hdt {

using NodeId = std::uint32_t;

/// Immutable undirected simple graph in compressed adjacency (CSR) form.
///
/// Node ids are dense in [0, node_count()). Every neighbor list is sorted
/// ascending, has no duplicates and never contains the node itself; the
/// adjacency relation is symmetric. `original_label(i)` recovers the
/// identifier the node carried in the source file.
class Graph {
 public:
  Graph() = default;

  /// Builds from an undirected edge list over dense ids [0, node_count).
  /// Self-loops are dropped and duplicate edges merged.
  static Graph from_edges(std::size_t node_count,
                          std::vector<std::pair<NodeId, NodeId>> edges,
                          std::vector<std::uint64_t> original_labels = {});

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return adjacency_.size() / 2; }

  /// Sorted neighbor list of `i`. Throws std::out_of_range on a bad id.
  std::span<const NodeId> neighbors(NodeId i) const;
  std::size_t degree(NodeId i) const;
  /// |N(i)| + 1, the size of the neighborhood including i itself.
  std::size_t expanded_degree(NodeId i) const { return degree(i) + 1; }

  std::uint64_t original_label(NodeId i) const;
  const std::vector<std::uint64_t>& original_labels() const noexcept { return labels_; }

  double average_degree() const noexcept;
  bool has_edge(NodeId i, NodeId j) const;
  bool is_connected() const;

  /// Degree lookup without bounds checking, for sampler inner loops.
  std::size_t degree_unchecked(NodeId i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  std::span<const NodeId> neighbors_unchecked(NodeId i) const noexcept {
    return {adjacency_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

  /// Stable 64-bit fingerprint of the adjacency structure.
  std::uint64_t fingerprint() const noexcept;

 private:
  void check(NodeId i) const;

  std::vector<std::size_t> offsets_;
  std::vector<NodeId> adjacency_;
  std::vector<std::uint64_t> labels_;
};

/// Parses a SNAP-style edge list: one "<u> <v>" pair per line, '#' comments,
/// blank lines ignored. Node identifiers are relabeled densely in order of
/// first appearance.
///
/// With `symmetrize` every directed line u->v contributes the undirected edge
/// {u,v}. Without it only reciprocated pairs (both u->v and v->u present)
/// become edges. The result may be disconnected.
Graph load_edge_list(std::istream& source, bool symmetrize = true);
Graph load_edge_list_file(const std::string& path, bool symmetrize = true);

/// Induced subgraph on the largest connected component, relabeled densely in
/// increasing order of the input ids. Ties between equally sized components
/// go to the component holding the smallest original label.
Graph largest_connected_component(const Graph& raw);

/// load_edge_list_file followed by largest_connected_component.
Graph load_normalized_graph(const std::string& path, bool symmetrize = true);

}  // namespace hdt

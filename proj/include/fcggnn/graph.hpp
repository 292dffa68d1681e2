#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fcggnn {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

/// Non-owning CSR adjacency view consumed by the sparse tensor ops.
struct AdjacencyView {
  std::span<const std::int64_t> offsets;  // size N+1
  std::span<const NodeId> targets;

  NodeId node_count() const { return static_cast<NodeId>(offsets.size()) - 1; }
};

/// Directed function-call graph. Stores CSR adjacency in both directions
/// plus the symmetrized (union of in/out, deduplicated) neighbor lists used
/// for message passing. Immutable after construction; safe to share across
/// threads.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Builds from an explicit node count and edge list. Self-loops are
  /// dropped, duplicate directed edges deduplicated. Throws if an endpoint
  /// is out of range or node_count < 1.
  DirectedGraph(NodeId node_count, std::vector<Edge> edges);

  NodeId node_count() const { return node_count_; }
  std::int64_t edge_count() const { return static_cast<std::int64_t>(edges_.size()); }

  /// Edges sorted by (src, dst), deduplicated, no self-loops.
  const std::vector<Edge>& edges() const { return edges_; }

  std::span<const NodeId> successors(NodeId v) const;
  std::span<const NodeId> predecessors(NodeId v) const;
  std::span<const NodeId> sym_neighbors(NodeId v) const;

  NodeId out_degree(NodeId v) const;
  NodeId in_degree(NodeId v) const;

  AdjacencyView out_adjacency() const { return {out_offsets_, out_targets_}; }
  AdjacencyView in_adjacency() const { return {in_offsets_, in_targets_}; }
  AdjacencyView sym_adjacency() const { return {sym_offsets_, sym_targets_}; }

  bool operator==(const DirectedGraph& other) const {
    return node_count_ == other.node_count_ && edges_ == other.edges_;
  }

 private:
  void check_node(NodeId v) const;

  NodeId node_count_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::int64_t> out_offsets_, in_offsets_, sym_offsets_;
  std::vector<NodeId> out_targets_, in_targets_, sym_targets_;
};

/// Parses a line-oriented edge list ("<src> <dst>" per line, '#' comments).
/// Node ids are compacted to 0..N-1 preserving the numeric order of the
/// original ids. Throws on malformed lines (with line number) and when the
/// stream yields neither nodes nor edges.
DirectedGraph load_edge_list(std::istream& text);
DirectedGraph load_edge_list_file(const std::string& path);

/// Writes edges back as "<src> <dst>" lines using the compacted ids.
/// Isolated nodes are emitted as self-loop lines so a reload reproduces the
/// same graph (loops are dropped again but the node id survives).
void write_edge_list(const DirectedGraph& g, std::ostream& out);

/// Block-diagonal union of several graphs plus the node -> graph map.
struct GraphBatch {
  DirectedGraph merged;
  std::vector<NodeId> segment_ids;  // length merged.node_count(), non-decreasing
  std::vector<int> labels;          // one per graph
  int graph_count = 0;
};

/// Merges graphs by offsetting node ids with the cumulative node counts.
/// Throws on an empty input list.
GraphBatch batch_graphs(std::span<const DirectedGraph* const> graphs,
                        std::span<const int> labels);

}  // namespace fcggnn

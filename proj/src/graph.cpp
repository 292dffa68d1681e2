#include "fcggnn/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace fcggnn {

namespace {

// Builds CSR offsets/targets from (src, dst) pairs sorted by src then dst.
void build_csr(NodeId node_count, const std::vector<Edge>& sorted_edges,
               std::vector<std::int64_t>& offsets, std::vector<NodeId>& targets) {
  offsets.assign(static_cast<std::size_t>(node_count) + 1, 0);
  for (const auto& [src, dst] : sorted_edges) {
    (void)dst;
    ++offsets[static_cast<std::size_t>(src) + 1];
  }
  for (std::size_t v = 1; v < offsets.size(); ++v) offsets[v] += offsets[v - 1];
  targets.resize(sorted_edges.size());
  std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [src, dst] : sorted_edges) {
    targets[static_cast<std::size_t>(cursor[static_cast<std::size_t>(src)]++)] = dst;
  }
}

}  // namespace

DirectedGraph::DirectedGraph(NodeId node_count, std::vector<Edge> edges)
    : node_count_(node_count) {
  if (node_count < 1) throw std::runtime_error("graph: node count must be >= 1");
  for (const auto& [src, dst] : edges) {
    if (src < 0 || src >= node_count || dst < 0 || dst >= node_count) {
      throw std::runtime_error("graph: edge endpoint out of range: " +
                               std::to_string(src) + " -> " + std::to_string(dst));
    }
  }
  std::erase_if(edges, [](const Edge& e) { return e.first == e.second; });
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  edges_ = std::move(edges);

  build_csr(node_count_, edges_, out_offsets_, out_targets_);

  std::vector<Edge> reversed;
  reversed.reserve(edges_.size());
  for (const auto& [src, dst] : edges_) reversed.emplace_back(dst, src);
  std::sort(reversed.begin(), reversed.end());
  build_csr(node_count_, reversed, in_offsets_, in_targets_);

  std::vector<Edge> sym;
  sym.reserve(edges_.size() * 2);
  sym.insert(sym.end(), edges_.begin(), edges_.end());
  sym.insert(sym.end(), reversed.begin(), reversed.end());
  std::sort(sym.begin(), sym.end());
  sym.erase(std::unique(sym.begin(), sym.end()), sym.end());
  build_csr(node_count_, sym, sym_offsets_, sym_targets_);
}

void DirectedGraph::check_node(NodeId v) const {
  if (v < 0 || v >= node_count_) {
    throw std::runtime_error("graph: node id out of range: " + std::to_string(v));
  }
}

std::span<const NodeId> DirectedGraph::successors(NodeId v) const {
  check_node(v);
  auto begin = out_offsets_[static_cast<std::size_t>(v)];
  auto end = out_offsets_[static_cast<std::size_t>(v) + 1];
  return {out_targets_.data() + begin, static_cast<std::size_t>(end - begin)};
}

std::span<const NodeId> DirectedGraph::predecessors(NodeId v) const {
  check_node(v);
  auto begin = in_offsets_[static_cast<std::size_t>(v)];
  auto end = in_offsets_[static_cast<std::size_t>(v) + 1];
  return {in_targets_.data() + begin, static_cast<std::size_t>(end - begin)};
}

std::span<const NodeId> DirectedGraph::sym_neighbors(NodeId v) const {
  check_node(v);
  auto begin = sym_offsets_[static_cast<std::size_t>(v)];
  auto end = sym_offsets_[static_cast<std::size_t>(v) + 1];
  return {sym_targets_.data() + begin, static_cast<std::size_t>(end - begin)};
}

NodeId DirectedGraph::out_degree(NodeId v) const {
  return static_cast<NodeId>(successors(v).size());
}

NodeId DirectedGraph::in_degree(NodeId v) const {
  return static_cast<NodeId>(predecessors(v).size());
}

DirectedGraph load_edge_list(std::istream& text) {
  std::vector<std::pair<std::int64_t, std::int64_t>> raw_edges;
  std::string line;
  int line_number = 0;
  while (std::getline(text, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t pos = line.find_first_not_of(" \t");
    if (pos == std::string::npos || line[pos] == '#') continue;

    std::int64_t ids[2];
    const char* cur = line.data() + pos;
    const char* end = line.data() + line.size();
    for (int k = 0; k < 2; ++k) {
      while (cur != end && (*cur == ' ' || *cur == '\t')) ++cur;
      auto [next, ec] = std::from_chars(cur, end, ids[k]);
      if (ec != std::errc() || next == cur || ids[k] < 0) {
        throw std::runtime_error("edge list: malformed line " +
                                 std::to_string(line_number) + ": '" + line + "'");
      }
      cur = next;
    }
    while (cur != end && (*cur == ' ' || *cur == '\t')) ++cur;
    if (cur != end) {
      throw std::runtime_error("edge list: malformed line " +
                               std::to_string(line_number) + ": '" + line + "'");
    }
    raw_edges.emplace_back(ids[0], ids[1]);
  }

  if (raw_edges.empty()) {
    throw std::runtime_error("edge list: no nodes or edges found");
  }

  // Order-preserving id compaction.
  std::vector<std::int64_t> ids;
  ids.reserve(raw_edges.size() * 2);
  for (const auto& [s, d] : raw_edges) {
    ids.push_back(s);
    ids.push_back(d);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto compact = [&ids](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Edge> edges;
  edges.reserve(raw_edges.size());
  for (const auto& [s, d] : raw_edges) edges.emplace_back(compact(s), compact(d));
  return DirectedGraph(static_cast<NodeId>(ids.size()), std::move(edges));
}

DirectedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  try {
    return load_edge_list(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_edge_list(const DirectedGraph& g, std::ostream& out) {
  for (const auto& [src, dst] : g.edges()) {
    out << src << ' ' << dst << '\n';
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (g.in_degree(v) == 0 && g.out_degree(v) == 0) {
      out << v << ' ' << v << '\n';
    }
  }
}

GraphBatch batch_graphs(std::span<const DirectedGraph* const> graphs,
                        std::span<const int> labels) {
  if (graphs.empty()) throw std::runtime_error("batch_graphs: empty graph list");
  if (labels.size() != graphs.size()) {
    throw std::runtime_error("batch_graphs: label count mismatch");
  }

  std::int64_t total_nodes = 0;
  std::size_t total_edges = 0;
  for (const DirectedGraph* g : graphs) {
    total_nodes += g->node_count();
    total_edges += static_cast<std::size_t>(g->edge_count());
  }

  std::vector<Edge> edges;
  edges.reserve(total_edges);
  std::vector<NodeId> segment_ids;
  segment_ids.reserve(static_cast<std::size_t>(total_nodes));

  NodeId offset = 0;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    const DirectedGraph& g = *graphs[k];
    for (const auto& [src, dst] : g.edges()) {
      edges.emplace_back(src + offset, dst + offset);
    }
    segment_ids.insert(segment_ids.end(), static_cast<std::size_t>(g.node_count()),
                       static_cast<NodeId>(k));
    offset += g.node_count();
  }

  GraphBatch batch;
  batch.merged = DirectedGraph(offset, std::move(edges));
  batch.segment_ids = std::move(segment_ids);
  batch.labels.assign(labels.begin(), labels.end());
  batch.graph_count = static_cast<int>(graphs.size());
  return batch;
}

}  // namespace fcggnn

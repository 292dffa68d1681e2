#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "fcggnn/graph.hpp"

using namespace fcggnn;

namespace {

DirectedGraph from_text(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

std::vector<NodeId> vec(std::span<const NodeId> s) { return {s.begin(), s.end()}; }

DirectedGraph random_digraph(std::mt19937& rng, int max_nodes = 8) {
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
  std::vector<Edge> edges;
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s != d && rng() % 100 < 30) edges.emplace_back(s, d);
    }
  }
  return DirectedGraph(n, std::move(edges));
}

}  // namespace

TEST_CASE("load_edge_list parses plain edges") {
  const DirectedGraph g = from_text("0 1\n1 2");
  CHECK(g.node_count() == 3);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
}

TEST_CASE("load_edge_list drops self-loops and keeps comment lines out") {
  const DirectedGraph g = from_text("# hdr\n0 0\n0 1");
  CHECK(g.node_count() == 2);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}});
}

TEST_CASE("load_edge_list compacts sparse ids preserving order") {
  const DirectedGraph g = from_text("5 7");
  CHECK(g.node_count() == 2);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}});
}

TEST_CASE("load_edge_list deduplicates directed edges") {
  const DirectedGraph g = from_text("0 1\n0 1\n1 0");
  CHECK(g.edge_count() == 2);
}

TEST_CASE("load_edge_list reports malformed lines with their number") {
  std::istringstream in("0 1\nnope\n");
  CHECK_THROWS_WITH_AS(load_edge_list(in), doctest::Contains("line 2"),
                       std::runtime_error);

  std::istringstream extra("0 1 2\n");
  CHECK_THROWS_AS(load_edge_list(extra), std::runtime_error);

  std::istringstream negative("0 -1\n");
  CHECK_THROWS_AS(load_edge_list(negative), std::runtime_error);
}

TEST_CASE("load_edge_list rejects empty input") {
  std::istringstream in("# only comments\n");
  CHECK_THROWS_AS(load_edge_list(in), std::runtime_error);
}

TEST_CASE("self-loop-only input keeps the node") {
  const DirectedGraph g = from_text("4 4");
  CHECK(g.node_count() == 1);
  CHECK(g.edge_count() == 0);
}

TEST_CASE("symmetrized neighbors union both directions") {
  const DirectedGraph one_way = from_text("0 1");
  CHECK(vec(one_way.sym_neighbors(0)) == std::vector<NodeId>{1});
  CHECK(vec(one_way.sym_neighbors(1)) == std::vector<NodeId>{0});

  const DirectedGraph both_ways = from_text("0 1\n1 0");
  CHECK(vec(both_ways.sym_neighbors(0)) == std::vector<NodeId>{1});
  CHECK(vec(both_ways.sym_neighbors(1)) == std::vector<NodeId>{0});

  const DirectedGraph isolated(1, {});
  CHECK(isolated.sym_neighbors(0).empty());
}

TEST_CASE("csr_in and csr_out are transposes") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const DirectedGraph g = random_digraph(rng);
    std::vector<Edge> via_out, via_in;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      for (NodeId w : g.successors(v)) via_out.emplace_back(v, w);
      for (NodeId u : g.predecessors(v)) via_in.emplace_back(u, v);
    }
    std::sort(via_in.begin(), via_in.end());
    std::sort(via_out.begin(), via_out.end());
    CHECK(via_in == via_out);
    CHECK(via_out == g.edges());
  }
}

TEST_CASE("sym degree bounded by in+out") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const DirectedGraph g = random_digraph(rng);
    for (NodeId v = 0; v < g.node_count(); ++v) {
      CHECK(static_cast<NodeId>(g.sym_neighbors(v).size()) <=
            g.in_degree(v) + g.out_degree(v));
    }
  }
}

TEST_CASE("edge list round-trips through text") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const DirectedGraph g = random_digraph(rng);
    std::ostringstream out;
    write_edge_list(g, out);
    const DirectedGraph reloaded = from_text(out.str());
    CHECK(reloaded == g);
  }
}

TEST_CASE("batch_graphs offsets ids and tracks segments") {
  const DirectedGraph a = from_text("0 1");            // N=2
  const DirectedGraph b = from_text("0 1\n1 2");       // N=3
  const DirectedGraph* graphs[] = {&a, &b};
  const int labels[] = {1, 0};
  const GraphBatch batch = batch_graphs(graphs, labels);

  CHECK(batch.merged.node_count() == 5);
  CHECK(batch.segment_ids == std::vector<NodeId>{0, 0, 1, 1, 1});
  CHECK(batch.labels == std::vector<int>{1, 0});
  CHECK(batch.merged.edges() == std::vector<Edge>{{0, 1}, {2, 3}, {3, 4}});
}

TEST_CASE("batch_graphs single graph is an identity merge") {
  const DirectedGraph a = from_text("0 1\n1 2");
  const DirectedGraph* graphs[] = {&a};
  const int labels[] = {0};
  const GraphBatch batch = batch_graphs(graphs, labels);
  CHECK(batch.merged == a);
  CHECK(batch.segment_ids == std::vector<NodeId>{0, 0, 0});
}

TEST_CASE("batch_graphs of singleton graphs") {
  const DirectedGraph n1(1, {});
  const DirectedGraph* graphs[] = {&n1, &n1, &n1};
  const int labels[] = {0, 1, 2};
  const GraphBatch batch = batch_graphs(graphs, labels);
  CHECK(batch.merged.node_count() == 3);
  CHECK(batch.segment_ids == std::vector<NodeId>{0, 1, 2});
}

TEST_CASE("batch_graphs rejects an empty list") {
  const std::vector<const DirectedGraph*> no_graphs;
  const std::vector<int> no_labels;
  CHECK_THROWS_AS(batch_graphs(no_graphs, no_labels), std::runtime_error);
}

TEST_CASE("per-segment extraction recovers the inputs") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DirectedGraph> inputs;
    std::vector<const DirectedGraph*> ptrs;
    std::vector<int> labels;
    const int count = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < count; ++k) {
      inputs.push_back(random_digraph(rng));
      labels.push_back(k);
    }
    for (const auto& g : inputs) ptrs.push_back(&g);
    const GraphBatch batch = batch_graphs(ptrs, labels);

    // No edge crosses a segment boundary, and per-segment edges match.
    NodeId offset = 0;
    for (int k = 0; k < count; ++k) {
      const NodeId n = inputs[static_cast<std::size_t>(k)].node_count();
      std::vector<Edge> recovered;
      for (const auto& [src, dst] : batch.merged.edges()) {
        const bool src_in = src >= offset && src < offset + n;
        const bool dst_in = dst >= offset && dst < offset + n;
        CHECK(src_in == dst_in);
        if (src_in) recovered.emplace_back(src - offset, dst - offset);
      }
      CHECK(recovered == inputs[static_cast<std::size_t>(k)].edges());
      for (NodeId v = 0; v < n; ++v) {
        CHECK(batch.segment_ids[static_cast<std::size_t>(offset + v)] == k);
      }
      offset += n;
    }
  }
}

TEST_CASE("graph construction validates endpoints") {
  CHECK_THROWS_AS(DirectedGraph(2, {{0, 2}}), std::runtime_error);
  CHECK_THROWS_AS(DirectedGraph(0, {}), std::runtime_error);
}

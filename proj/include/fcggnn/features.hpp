#pragma once

#include <array>
#include <span>
#include <vector>

#include "fcggnn/graph.hpp"

namespace fcggnn {

struct PageRankResult {
  std::vector<double> scores;  // sums to 1
  bool converged = true;
  int iterations = 0;
};

/// Power iteration from a uniform start with uniform redistribution of
/// dangling-node mass. Stops when the L1 change drops below tol; a run that
/// exhausts max_iter returns the last iterate with converged = false.
PageRankResult pagerank(const DirectedGraph& g, double alpha = 0.85,
                        double tol = 1e-9, int max_iter = 100);

struct DegreeVectors {
  std::vector<double> in;
  std::vector<double> out;
};

DegreeVectors degrees(const DirectedGraph& g);

/// Brandes' algorithm on the directed graph with unit edge lengths.
/// Unnormalized, endpoints excluded.
std::vector<double> betweenness(const DirectedGraph& g);

/// N x 4 node feature matrix, 64-bit, column order fixed as
/// [pagerank, in_degree, out_degree, betweenness].
class NodeFeatureMatrix {
 public:
  static constexpr int kColumns = 4;

  NodeFeatureMatrix() = default;
  explicit NodeFeatureMatrix(NodeId node_count)
      : node_count_(node_count),
        values_(static_cast<std::size_t>(node_count) * kColumns, 0.0) {}

  NodeId node_count() const { return node_count_; }
  double at(NodeId v, int c) const {
    return values_[static_cast<std::size_t>(v) * kColumns + static_cast<std::size_t>(c)];
  }
  double& at(NodeId v, int c) {
    return values_[static_cast<std::size_t>(v) * kColumns + static_cast<std::size_t>(c)];
  }
  std::span<const double> values() const { return values_; }

 private:
  NodeId node_count_ = 0;
  std::vector<double> values_;
};

NodeFeatureMatrix build_feature_matrix(const DirectedGraph& g);

/// Per-column pooled statistics, fitted on the training split only and
/// reused for validation, test, and inference.
struct StandardizationStats {
  std::array<double, NodeFeatureMatrix::kColumns> mean{};
  std::array<double, NodeFeatureMatrix::kColumns> stddev{};  // population
  double epsilon_guard = 1e-8;
};

/// Pooled mean and population standard deviation over all nodes of all
/// training graphs. Throws on an empty pool.
StandardizationStats fit_standardizer(std::span<const NodeFeatureMatrix> train_features);

/// (x - mean) / max(std, epsilon_guard), rounded through 32-bit precision
/// since that is what the model consumes.
NodeFeatureMatrix apply_standardizer(const NodeFeatureMatrix& f,
                                     const StandardizationStats& s);

}  // namespace fcggnn

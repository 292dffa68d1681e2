#include "fcggnn/features.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace fcggnn {

PageRankResult pagerank(const DirectedGraph& g, double alpha, double tol,
                        int max_iter) {
  if (alpha <= 0.0 || alpha >= 1.0) throw std::runtime_error("pagerank: alpha must be in (0,1)");
  if (tol <= 0.0) throw std::runtime_error("pagerank: tol must be positive");

  const NodeId n = g.node_count();
  const double uniform = 1.0 / static_cast<double>(n);

  PageRankResult result;
  result.scores.assign(static_cast<std::size_t>(n), uniform);
  std::vector<double> next(static_cast<std::size_t>(n), 0.0);

  for (int iter = 1; iter <= max_iter; ++iter) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (g.out_degree(v) == 0) dangling += result.scores[static_cast<std::size_t>(v)];
    }
    const double base = (1.0 - alpha) * uniform + alpha * dangling * uniform;
    std::fill(next.begin(), next.end(), base);
    for (NodeId u = 0; u < n; ++u) {
      auto succ = g.successors(u);
      if (succ.empty()) continue;
      const double share =
          alpha * result.scores[static_cast<std::size_t>(u)] / static_cast<double>(succ.size());
      for (NodeId v : succ) next[static_cast<std::size_t>(v)] += share;
    }

    double change = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      change += std::abs(next[static_cast<std::size_t>(v)] -
                         result.scores[static_cast<std::size_t>(v)]);
    }
    result.scores.swap(next);
    result.iterations = iter;
    if (change < tol) {
      result.converged = true;
      return result;
    }
  }
  result.converged = false;
  return result;
}

DegreeVectors degrees(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  DegreeVectors d;
  d.in.resize(static_cast<std::size_t>(n));
  d.out.resize(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    d.in[static_cast<std::size_t>(v)] = static_cast<double>(g.in_degree(v));
    d.out[static_cast<std::size_t>(v)] = static_cast<double>(g.out_degree(v));
  }
  return d;
}

std::vector<double> betweenness(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  std::vector<double> centrality(static_cast<std::size_t>(n), 0.0);

  std::vector<NodeId> order;           // nodes in non-decreasing distance
  std::vector<std::vector<NodeId>> preds(static_cast<std::size_t>(n));
  std::vector<std::int64_t> sigma(static_cast<std::size_t>(n));
  std::vector<std::int64_t> dist(static_cast<std::size_t>(n));
  std::vector<double> delta(static_cast<std::size_t>(n));

  for (NodeId s = 0; s < n; ++s) {
    order.clear();
    for (NodeId v = 0; v < n; ++v) {
      preds[static_cast<std::size_t>(v)].clear();
      sigma[static_cast<std::size_t>(v)] = 0;
      dist[static_cast<std::size_t>(v)] = -1;
    }
    sigma[static_cast<std::size_t>(s)] = 1;
    dist[static_cast<std::size_t>(s)] = 0;

    std::queue<NodeId> queue;
    queue.push(s);
    while (!queue.empty()) {
      NodeId v = queue.front();
      queue.pop();
      order.push_back(v);
      for (NodeId w : g.successors(v)) {
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(v)] + 1;
          queue.push(w);
        }
        if (dist[static_cast<std::size_t>(w)] == dist[static_cast<std::size_t>(v)] + 1) {
          sigma[static_cast<std::size_t>(w)] += sigma[static_cast<std::size_t>(v)];
          preds[static_cast<std::size_t>(w)].push_back(v);
        }
      }
    }

    for (NodeId v : order) delta[static_cast<std::size_t>(v)] = 0.0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeId w = *it;
      const double coeff = (1.0 + delta[static_cast<std::size_t>(w)]) /
                           static_cast<double>(sigma[static_cast<std::size_t>(w)]);
      for (NodeId v : preds[static_cast<std::size_t>(w)]) {
        delta[static_cast<std::size_t>(v)] +=
            static_cast<double>(sigma[static_cast<std::size_t>(v)]) * coeff;
      }
      if (w != s) centrality[static_cast<std::size_t>(w)] += delta[static_cast<std::size_t>(w)];
    }
  }
  return centrality;
}

NodeFeatureMatrix build_feature_matrix(const DirectedGraph& g) {
  const NodeId n = g.node_count();
  NodeFeatureMatrix features(n);
  const auto pr = pagerank(g);
  const auto deg = degrees(g);
  const auto btw = betweenness(g);
  for (NodeId v = 0; v < n; ++v) {
    features.at(v, 0) = pr.scores[static_cast<std::size_t>(v)];
    features.at(v, 1) = deg.in[static_cast<std::size_t>(v)];
    features.at(v, 2) = deg.out[static_cast<std::size_t>(v)];
    features.at(v, 3) = btw[static_cast<std::size_t>(v)];
  }
  return features;
}

StandardizationStats fit_standardizer(std::span<const NodeFeatureMatrix> train_features) {
  std::int64_t total_nodes = 0;
  for (const auto& f : train_features) total_nodes += f.node_count();
  if (total_nodes == 0) throw std::runtime_error("fit_standardizer: empty feature pool");

  StandardizationStats stats;
  for (int c = 0; c < NodeFeatureMatrix::kColumns; ++c) {
    double sum = 0.0;
    for (const auto& f : train_features) {
      for (NodeId v = 0; v < f.node_count(); ++v) sum += f.at(v, c);
    }
    const double mean = sum / static_cast<double>(total_nodes);
    double sq = 0.0;
    for (const auto& f : train_features) {
      for (NodeId v = 0; v < f.node_count(); ++v) {
        const double d = f.at(v, c) - mean;
        sq += d * d;
      }
    }
    stats.mean[static_cast<std::size_t>(c)] = mean;
    stats.stddev[static_cast<std::size_t>(c)] =
        std::sqrt(sq / static_cast<double>(total_nodes));
  }
  return stats;
}

NodeFeatureMatrix apply_standardizer(const NodeFeatureMatrix& f,
                                     const StandardizationStats& s) {
  NodeFeatureMatrix out(f.node_count());
  for (NodeId v = 0; v < f.node_count(); ++v) {
    for (int c = 0; c < NodeFeatureMatrix::kColumns; ++c) {
      const double denom = std::max(s.stddev[static_cast<std::size_t>(c)], s.epsilon_guard);
      const double z = (f.at(v, c) - s.mean[static_cast<std::size_t>(c)]) / denom;
      out.at(v, c) = static_cast<double>(static_cast<float>(z));
    }
  }
  return out;
}

}  // namespace fcggnn

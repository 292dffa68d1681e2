// Shared test helpers: random graphs, a 64-bit dense reference forward used
// as the oracle for layer values and finite-difference gradient checks, and
// the synthetic corpus generator.
#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fcggnn/dataio.hpp"
#include "fcggnn/features.hpp"
#include "fcggnn/graph.hpp"
#include "fcggnn/model.hpp"
#include "fcggnn/tensor.hpp"

namespace testsupport {

using namespace fcggnn;

inline DirectedGraph from_text(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

inline DirectedGraph random_digraph(std::mt19937& rng, int max_nodes,
                                    int edge_percent) {
  const int n = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
  std::vector<Edge> edges;
  for (NodeId s = 0; s < n; ++s) {
    for (NodeId d = 0; d < n; ++d) {
      if (s != d && rng() % 100 < static_cast<unsigned>(edge_percent)) {
        edges.emplace_back(s, d);
      }
    }
  }
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph permuted_graph(const DirectedGraph& g,
                                    std::span<const NodeId> perm) {
  std::vector<Edge> edges;
  for (const auto& [src, dst] : g.edges()) {
    edges.emplace_back(perm[static_cast<std::size_t>(src)],
                       perm[static_cast<std::size_t>(dst)]);
  }
  return DirectedGraph(g.node_count(), std::move(edges));
}

inline Tensor random_features(int rows, int cols, std::mt19937& rng,
                              float scale = 1.0f) {
  Tensor t(rows, cols);
  for (float& v : t.mutable_data()) {
    const float unit = static_cast<float>(rng()) / 4294967296.0f;
    v = scale * (2.0f * unit - 1.0f);
  }
  return t;
}

// ---- 64-bit dense reference forward ---------------------------------------

using DMat = std::vector<std::vector<double>>;

inline DMat to_dmat(const Tensor& t) {
  DMat m(static_cast<std::size_t>(t.rows()),
         std::vector<double>(static_cast<std::size_t>(t.cols())));
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < t.cols(); ++c) {
      m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = t.at(r, c);
    }
  }
  return m;
}

inline DMat dmatmul(const DMat& a, const DMat& b) {
  const std::size_t m = a.size(), k = b.size(), n = b[0].size();
  DMat out(m, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double aik = a[i][kk];
      for (std::size_t j = 0; j < n; ++j) out[i][j] += aik * b[kk][j];
    }
  }
  return out;
}

inline DMat drelu(DMat x) {
  for (auto& row : x) {
    for (double& v : row) v = v > 0.0 ? v : 0.0;
  }
  return x;
}

inline DMat dadd(DMat a, const DMat& b) {
  for (std::size_t r = 0; r < a.size(); ++r) {
    for (std::size_t c = 0; c < a[r].size(); ++c) a[r][c] += b[r][c];
  }
  return a;
}

inline DMat dadd_bias(DMat x, const DMat& bias) {
  for (auto& row : x) {
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias[0][c];
  }
  return x;
}

inline DMat dscale(DMat x, double factor) {
  for (auto& row : x) {
    for (double& v : row) v *= factor;
  }
  return x;
}

inline DMat dconcat(const DMat& a, const DMat& b) {
  DMat out = a;
  for (std::size_t r = 0; r < out.size(); ++r) {
    out[r].insert(out[r].end(), b[r].begin(), b[r].end());
  }
  return out;
}

inline DMat sym_aggregate(const DirectedGraph& g, const DMat& x, bool mean) {
  const std::size_t d = x[0].size();
  DMat out(x.size(), std::vector<double>(d, 0.0));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto neighbors = g.sym_neighbors(v);
    for (NodeId u : neighbors) {
      for (std::size_t c = 0; c < d; ++c) {
        out[static_cast<std::size_t>(v)][c] += x[static_cast<std::size_t>(u)][c];
      }
    }
    if (mean && !neighbors.empty()) {
      for (std::size_t c = 0; c < d; ++c) {
        out[static_cast<std::size_t>(v)][c] /= static_cast<double>(neighbors.size());
      }
    }
  }
  return out;
}

inline DMat sym_max(const DirectedGraph& g, const DMat& x) {
  const std::size_t d = x[0].size();
  DMat out(x.size(), std::vector<double>(d, 0.0));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto neighbors = g.sym_neighbors(v);
    bool first = true;
    for (NodeId u : neighbors) {
      for (std::size_t c = 0; c < d; ++c) {
        const double value = x[static_cast<std::size_t>(u)][c];
        auto& slot = out[static_cast<std::size_t>(v)][c];
        if (first || value > slot) slot = value;
      }
      first = false;
    }
  }
  return out;
}

inline DMat oracle_gcn_layer(const DirectedGraph& g, const DMat& x,
                             const GcnLayerParams& p) {
  return drelu(dadd_bias(dadd(dmatmul(x, to_dmat(p.w_self)),
                              dmatmul(sym_aggregate(g, x, true), to_dmat(p.w_neigh))),
                         to_dmat(p.bias)));
}

inline DMat oracle_sage_layer(const DirectedGraph& g, const DMat& x,
                              const SageLayerParams& p) {
  const DMat pooled = drelu(dadd_bias(dmatmul(x, to_dmat(p.w_pool)), to_dmat(p.b_pool)));
  const DMat aggregated = sym_max(g, pooled);
  return drelu(dadd_bias(dmatmul(dconcat(x, aggregated), to_dmat(p.w)),
                         to_dmat(p.bias)));
}

inline DMat oracle_gin_layer(const DirectedGraph& g, const DMat& x,
                             const GinLayerParams& p, double epsilon) {
  const DMat mixed = dadd(dscale(x, 1.0 + epsilon), sym_aggregate(g, x, false));
  const DMat hidden = drelu(dadd_bias(dmatmul(mixed, to_dmat(p.w1)), to_dmat(p.b1)));
  return dadd_bias(dmatmul(hidden, to_dmat(p.w2)), to_dmat(p.b2));
}

struct OracleForward {
  DMat logits;
  DMat embeddings;
};

inline OracleForward oracle_model_forward(const GraphBatch& batch, const DMat& x,
                                          const ModelParams& params,
                                          const ModelConfig& cfg) {
  DMat current = x;
  DMat stacked;
  for (int l = 0; l < cfg.num_layers; ++l) {
    switch (cfg.layer_kind) {
      case LayerKind::kGcn:
        current = oracle_gcn_layer(batch.merged, current,
                                   params.gcn[static_cast<std::size_t>(l)]);
        break;
      case LayerKind::kSage:
        current = oracle_sage_layer(batch.merged, current,
                                    params.sage[static_cast<std::size_t>(l)]);
        break;
      case LayerKind::kGin:
        current = oracle_gin_layer(batch.merged, current,
                                   params.gin[static_cast<std::size_t>(l)],
                                   cfg.gin_epsilon);
        break;
    }
    stacked = l == 0 ? current : dconcat(stacked, current);
  }

  const DMat node_embeddings =
      dadd_bias(dmatmul(stacked, to_dmat(params.w_jk)), to_dmat(params.b_jk));

  DMat graph_embeddings(static_cast<std::size_t>(batch.graph_count),
                        std::vector<double>(node_embeddings[0].size(), 0.0));
  std::vector<bool> seen(static_cast<std::size_t>(batch.graph_count), false);
  for (std::size_t v = 0; v < node_embeddings.size(); ++v) {
    const auto g = static_cast<std::size_t>(batch.segment_ids[v]);
    for (std::size_t c = 0; c < node_embeddings[v].size(); ++c) {
      if (!seen[g] || node_embeddings[v][c] > graph_embeddings[g][c]) {
        graph_embeddings[g][c] = node_embeddings[v][c];
      }
    }
    seen[g] = true;
  }

  const DMat head_hidden = drelu(dadd_bias(
      dmatmul(graph_embeddings, to_dmat(params.w_head1)), to_dmat(params.b_head1)));
  OracleForward result;
  result.logits =
      dadd_bias(dmatmul(head_hidden, to_dmat(params.w_head2)), to_dmat(params.b_head2));
  result.embeddings = graph_embeddings;
  return result;
}

inline double oracle_cross_entropy(const DMat& logits, std::span<const int> labels) {
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    double row_max = logits[i][0];
    for (double v : logits[i]) row_max = std::max(row_max, v);
    double z = 0.0;
    for (double v : logits[i]) z += std::exp(v - row_max);
    total += -(logits[i][static_cast<std::size_t>(labels[i])] - row_max - std::log(z));
  }
  return total / static_cast<double>(logits.size());
}

inline double relative_error(double analytic, double fd) {
  const double denom = std::max({std::abs(analytic), std::abs(fd), 0.1});
  return std::abs(analytic - fd) / denom;
}

// Analytic gradients from the 32-bit tape vs central finite differences of
// the 64-bit reference forward (1e-3 step). Returns the worst relative error
// over every parameter entry.
inline double model_gradient_max_error(const GraphBatch& batch, const Tensor& features,
                                       ModelParams& params, const ModelConfig& cfg,
                                       std::span<const int> labels) {
  Tape tape;
  ForwardResult forward = model_forward(tape, batch, features, params, cfg);
  Tensor loss = tape.softmax_cross_entropy(forward.logits, labels);
  tape.backward(loss);

  const DMat x = to_dmat(features);
  auto oracle_loss = [&]() {
    return oracle_cross_entropy(oracle_model_forward(batch, x, params, cfg).logits,
                                labels);
  };

  double worst = 0.0;
  const float step = 1e-3f;
  for (Tensor* p : params.all()) {
    const Tensor analytic = tape.grad(*p);
    auto values = p->mutable_data();
    const auto grads = analytic.data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const float original = values[i];
      values[i] = original + step;
      const double up = oracle_loss();
      values[i] = original - step;
      const double down = oracle_loss();
      values[i] = original;
      const double fd = (up - down) / (2.0 * static_cast<double>(step));
      worst = std::max(worst, relative_error(grads[i], fd));
    }
  }
  return worst;
}

// ---- synthetic corpora -----------------------------------------------------

inline DirectedGraph make_cycle(int n) {
  std::vector<Edge> edges;
  for (NodeId v = 0; v < n; ++v) edges.emplace_back(v, (v + 1) % n);
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph make_out_star(int n) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) edges.emplace_back(0, v);
  return DirectedGraph(n, std::move(edges));
}

inline DirectedGraph make_random_tree(int n, std::mt19937& rng) {
  std::vector<Edge> edges;
  for (NodeId v = 1; v < n; ++v) {
    const NodeId parent = static_cast<NodeId>(rng() % static_cast<unsigned>(v));
    edges.emplace_back(parent, v);
  }
  return DirectedGraph(n, std::move(edges));
}

// Three structurally distinct classes: directed cycles, out-stars, random
// trees. Sizes drawn from [min_nodes, max_nodes].
inline DirectedGraph make_shape_graph(int class_id, int nodes, std::mt19937& rng) {
  switch (class_id) {
    case 0: return make_cycle(nodes);
    case 1: return make_out_star(nodes);
    default: return make_random_tree(nodes, rng);
  }
}

inline Corpus synthetic_corpus(int train_per_class, int val_per_class,
                               int test_per_class, int num_classes,
                               std::uint32_t seed, int min_nodes = 5,
                               int max_nodes = 20) {
  std::mt19937 rng(seed);
  Corpus corpus;
  for (int c = 0; c < num_classes; ++c) {
    corpus.class_names.push_back("class" + std::to_string(c));
  }
  auto fill = [&](std::vector<LabeledGraph>& split, int per_class) {
    for (int c = 0; c < num_classes; ++c) {
      for (int k = 0; k < per_class; ++k) {
        const int nodes =
            min_nodes + static_cast<int>(rng() % static_cast<unsigned>(
                                             max_nodes - min_nodes + 1));
        split.push_back({make_shape_graph(c, nodes, rng), c, ""});
      }
    }
  };
  fill(corpus.train, train_per_class);
  fill(corpus.val, val_per_class);
  fill(corpus.test, test_per_class);
  return corpus;
}

}  // namespace testsupport

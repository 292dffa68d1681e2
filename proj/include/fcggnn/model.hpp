#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fcggnn/graph.hpp"
#include "fcggnn/tensor.hpp"

namespace fcggnn {

enum class LayerKind { kGcn, kSage, kGin };

LayerKind layer_kind_from_string(const std::string& name);  // "gcn" | "sage" | "gin"
std::string to_string(LayerKind kind);

struct ModelConfig {
  LayerKind layer_kind = LayerKind::kSage;
  int num_layers = 6;
  int hidden = 128;
  int head_units = 128;
  int num_classes = 2;
  int input_dim = 4;
  float gin_epsilon = 0.0f;
  std::uint64_t seed = 0;

  void validate() const;
};

/// self/neighbor weights plus bias: Z = ReLU(X W_self + mean(X) W_neigh + b)
struct GcnLayerParams {
  Tensor w_self, w_neigh, bias;
};

/// max-pool aggregator (transform d_in -> d_in, ReLU, neighbor max) followed
/// by the update weight on CONCAT(x, agg)
struct SageLayerParams {
  Tensor w_pool, b_pool, w, bias;
};

/// two-layer MLP applied to (1 + eps) x + sum of neighbors
struct GinLayerParams {
  Tensor w1, b1, w2, b2;
};

struct ModelParams {
  std::vector<GcnLayerParams> gcn;
  std::vector<SageLayerParams> sage;
  std::vector<GinLayerParams> gin;
  Tensor w_jk, b_jk;          // (L*hidden) x hidden + bias
  Tensor w_head1, b_head1;    // hidden x head_units
  Tensor w_head2, b_head2;    // head_units x num_classes

  /// All trainable tensors in a fixed order (layers, JK, head). The order is
  /// the contract for the optimizer state and the model container.
  std::vector<Tensor*> all();
  std::vector<const Tensor*> all() const;

  ModelParams clone() const;
};

/// Glorot-uniform weights, zero biases, seeded from cfg.seed.
ModelParams init_params(const ModelConfig& cfg);

Tensor gcn_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                 const GcnLayerParams& p);
Tensor sage_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                  const SageLayerParams& p);
Tensor gin_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                 const GinLayerParams& p, float epsilon);

/// CONCAT(H_1..H_L) W_jk + b_jk; linear, no activation.
Tensor jk_combine(Tape& tape, std::span<const Tensor> layer_outputs,
                  const Tensor& w_jk, const Tensor& b_jk);

/// Element-wise max over each graph's nodes; row g is graph g's embedding.
Tensor readout(Tape& tape, const Tensor& h_final,
               std::span<const NodeId> segment_ids, int graph_count);

/// ReLU dense head followed by the linear class layer; softmax lives in the
/// loss / prediction path.
Tensor head_forward(Tape& tape, const Tensor& graph_embeddings,
                    const ModelParams& params);

struct ForwardResult {
  Tensor logits;            // B x C
  Tensor graph_embeddings;  // B x hidden
};

/// Full pipeline on a batch of standardized features: L layers of the
/// configured kind collecting every intermediate representation, JK
/// concatenation, max readout, classification head.
ForwardResult model_forward(Tape& tape, const GraphBatch& batch,
                            const Tensor& features, const ModelParams& params,
                            const ModelConfig& cfg);

}  // namespace fcggnn

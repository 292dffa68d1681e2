#include "fcggnn/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fcggnn {

LayerKind layer_kind_from_string(const std::string& name) {
  if (name == "gcn") return LayerKind::kGcn;
  if (name == "sage") return LayerKind::kSage;
  if (name == "gin") return LayerKind::kGin;
  throw std::runtime_error("unknown layer kind: " + name);
}

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kGcn: return "gcn";
    case LayerKind::kSage: return "sage";
    case LayerKind::kGin: return "gin";
  }
  return "?";
}

void ModelConfig::validate() const {
  if (num_layers < 1) throw std::runtime_error("model config: num_layers must be >= 1");
  if (hidden < 1) throw std::runtime_error("model config: hidden must be positive");
  if (head_units < 1) throw std::runtime_error("model config: head_units must be positive");
  if (num_classes < 2) throw std::runtime_error("model config: need at least 2 classes");
  if (input_dim < 1) throw std::runtime_error("model config: input_dim must be positive");
}

std::vector<Tensor*> ModelParams::all() {
  std::vector<Tensor*> out;
  for (auto& l : gcn) {
    out.push_back(&l.w_self);
    out.push_back(&l.w_neigh);
    out.push_back(&l.bias);
  }
  for (auto& l : sage) {
    out.push_back(&l.w_pool);
    out.push_back(&l.b_pool);
    out.push_back(&l.w);
    out.push_back(&l.bias);
  }
  for (auto& l : gin) {
    out.push_back(&l.w1);
    out.push_back(&l.b1);
    out.push_back(&l.w2);
    out.push_back(&l.b2);
  }
  out.push_back(&w_jk);
  out.push_back(&b_jk);
  out.push_back(&w_head1);
  out.push_back(&b_head1);
  out.push_back(&w_head2);
  out.push_back(&b_head2);
  return out;
}

std::vector<const Tensor*> ModelParams::all() const {
  auto mutable_list = const_cast<ModelParams*>(this)->all();
  return {mutable_list.begin(), mutable_list.end()};
}

ModelParams ModelParams::clone() const {
  ModelParams copy;
  for (const auto& l : gcn) {
    copy.gcn.push_back({l.w_self.clone(), l.w_neigh.clone(), l.bias.clone()});
  }
  for (const auto& l : sage) {
    copy.sage.push_back({l.w_pool.clone(), l.b_pool.clone(), l.w.clone(), l.bias.clone()});
  }
  for (const auto& l : gin) {
    copy.gin.push_back({l.w1.clone(), l.b1.clone(), l.w2.clone(), l.b2.clone()});
  }
  copy.w_jk = w_jk.clone();
  copy.b_jk = b_jk.clone();
  copy.w_head1 = w_head1.clone();
  copy.b_head1 = b_head1.clone();
  copy.w_head2 = w_head2.clone();
  copy.b_head2 = b_head2.clone();
  return copy;
}

namespace {

// 24-bit uniform in [0, 1); avoids the implementation-defined distributions
// so a seed reproduces the same weights everywhere.
float uniform_unit(std::mt19937& rng) {
  return static_cast<float>(rng() >> 8) * (1.0f / 16777216.0f);
}

Tensor glorot(int rows, int cols, std::mt19937& rng) {
  Tensor t(rows, cols);
  const float limit = std::sqrt(6.0f / static_cast<float>(rows + cols));
  for (float& v : t.mutable_data()) v = (2.0f * uniform_unit(rng) - 1.0f) * limit;
  t.set_requires_grad(true);
  return t;
}

Tensor zero_bias(int cols) {
  Tensor t(1, cols);
  t.set_requires_grad(true);
  return t;
}

}  // namespace

ModelParams init_params(const ModelConfig& cfg) {
  cfg.validate();
  std::mt19937 rng(static_cast<std::mt19937::result_type>(cfg.seed));
  ModelParams params;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int d_in = l == 0 ? cfg.input_dim : cfg.hidden;
    const int d_out = cfg.hidden;
    switch (cfg.layer_kind) {
      case LayerKind::kGcn:
        params.gcn.push_back(
            {glorot(d_in, d_out, rng), glorot(d_in, d_out, rng), zero_bias(d_out)});
        break;
      case LayerKind::kSage:
        params.sage.push_back({glorot(d_in, d_in, rng), zero_bias(d_in),
                               glorot(2 * d_in, d_out, rng), zero_bias(d_out)});
        break;
      case LayerKind::kGin:
        params.gin.push_back({glorot(d_in, d_out, rng), zero_bias(d_out),
                              glorot(d_out, d_out, rng), zero_bias(d_out)});
        break;
    }
  }
  params.w_jk = glorot(cfg.num_layers * cfg.hidden, cfg.hidden, rng);
  params.b_jk = zero_bias(cfg.hidden);
  params.w_head1 = glorot(cfg.hidden, cfg.head_units, rng);
  params.b_head1 = zero_bias(cfg.head_units);
  params.w_head2 = glorot(cfg.head_units, cfg.num_classes, rng);
  params.b_head2 = zero_bias(cfg.num_classes);
  return params;
}

Tensor gcn_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                 const GcnLayerParams& p) {
  Tensor self_term = tape.matmul(x, p.w_self);
  Tensor neigh_mean = tape.sparse_apply(adj, x, Aggregate::kMean);
  Tensor neigh_term = tape.matmul(neigh_mean, p.w_neigh);
  return tape.relu(tape.add_bias(tape.add(self_term, neigh_term), p.bias));
}

Tensor sage_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                  const SageLayerParams& p) {
  Tensor pooled = tape.relu(tape.add_bias(tape.matmul(x, p.w_pool), p.b_pool));
  Tensor aggregated = tape.sparse_max(adj, pooled);
  const Tensor parts[] = {x, aggregated};
  Tensor combined = tape.concat_cols(parts);
  return tape.relu(tape.add_bias(tape.matmul(combined, p.w), p.bias));
}

Tensor gin_layer(Tape& tape, const Tensor& x, const AdjacencyView& adj,
                 const GinLayerParams& p, float epsilon) {
  Tensor neigh_sum = tape.sparse_apply(adj, x, Aggregate::kSum);
  Tensor mixed = tape.add(tape.scale(x, 1.0f + epsilon), neigh_sum);
  Tensor hidden = tape.relu(tape.add_bias(tape.matmul(mixed, p.w1), p.b1));
  return tape.add_bias(tape.matmul(hidden, p.w2), p.b2);
}

Tensor jk_combine(Tape& tape, std::span<const Tensor> layer_outputs,
                  const Tensor& w_jk, const Tensor& b_jk) {
  if (layer_outputs.empty()) throw std::runtime_error("jk_combine: no layer outputs");
  Tensor stacked = tape.concat_cols(layer_outputs);
  return tape.add_bias(tape.matmul(stacked, w_jk), b_jk);
}

Tensor readout(Tape& tape, const Tensor& h_final,
               std::span<const NodeId> segment_ids, int graph_count) {
  return tape.segment_max(h_final, segment_ids, graph_count);
}

Tensor head_forward(Tape& tape, const Tensor& graph_embeddings,
                    const ModelParams& params) {
  Tensor hidden = tape.relu(
      tape.add_bias(tape.matmul(graph_embeddings, params.w_head1), params.b_head1));
  return tape.add_bias(tape.matmul(hidden, params.w_head2), params.b_head2);
}

ForwardResult model_forward(Tape& tape, const GraphBatch& batch,
                            const Tensor& features, const ModelParams& params,
                            const ModelConfig& cfg) {
  cfg.validate();
  if (features.rows() != batch.merged.node_count()) {
    throw std::runtime_error("model_forward: feature rows do not match batch nodes");
  }
  if (features.cols() != cfg.input_dim) {
    throw std::runtime_error("model_forward: feature width does not match config");
  }
  const std::size_t expected_layers = static_cast<std::size_t>(cfg.num_layers);
  const bool layers_match =
      (cfg.layer_kind == LayerKind::kGcn && params.gcn.size() == expected_layers &&
       params.sage.empty() && params.gin.empty()) ||
      (cfg.layer_kind == LayerKind::kSage && params.sage.size() == expected_layers &&
       params.gcn.empty() && params.gin.empty()) ||
      (cfg.layer_kind == LayerKind::kGin && params.gin.size() == expected_layers &&
       params.gcn.empty() && params.sage.empty());
  if (!layers_match) {
    throw std::runtime_error("model_forward: parameters do not match config");
  }

  const AdjacencyView adj = batch.merged.sym_adjacency();
  std::vector<Tensor> intermediates;
  intermediates.reserve(expected_layers);
  Tensor current = features;
  for (int l = 0; l < cfg.num_layers; ++l) {
    switch (cfg.layer_kind) {
      case LayerKind::kGcn:
        current = gcn_layer(tape, current, adj, params.gcn[static_cast<std::size_t>(l)]);
        break;
      case LayerKind::kSage:
        current = sage_layer(tape, current, adj, params.sage[static_cast<std::size_t>(l)]);
        break;
      case LayerKind::kGin:
        current = gin_layer(tape, current, adj, params.gin[static_cast<std::size_t>(l)],
                            cfg.gin_epsilon);
        break;
    }
    intermediates.push_back(current);
  }

  Tensor node_embeddings = jk_combine(tape, intermediates, params.w_jk, params.b_jk);
  Tensor graph_embeddings =
      readout(tape, node_embeddings, batch.segment_ids, batch.graph_count);
  Tensor logits = head_forward(tape, graph_embeddings, params);
  return {std::move(logits), std::move(graph_embeddings)};
}

}  // namespace fcggnn

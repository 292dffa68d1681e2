#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "fcggnn/graph.hpp"

namespace fcggnn {

/// Dense row-major 32-bit matrix. Copies share the underlying buffer; a
/// buffer is treated as immutable once produced by an op. In-place writes
/// (initialization, optimizer updates) happen between tape lifetimes only.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols);  // zero-filled

  static Tensor from_rows(int rows, int cols, std::span<const float> values);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t size() const { return static_cast<std::int64_t>(rows_) * cols_; }
  bool empty() const { return size() == 0; }

  float at(int r, int c) const {
    return (*data_)[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
  }
  float& at(int r, int c) {
    return (*data_)[static_cast<std::size_t>(r) * cols_ + static_cast<std::size_t>(c)];
  }
  std::span<const float> data() const;
  std::span<float> mutable_data();

  bool requires_grad() const { return requires_grad_; }
  void set_requires_grad(bool flag) { requires_grad_ = flag; }

  /// Deep copy with its own buffer (no tape association).
  Tensor clone() const;

 private:
  friend class Tape;
  const void* buffer_id() const { return data_.get(); }

  int rows_ = 0;
  int cols_ = 0;
  std::shared_ptr<std::vector<float>> data_;
  bool requires_grad_ = false;
  int node_ = -1;  // index into the tape that produced this tensor
};

enum class Aggregate { kSum, kMean };

/// Reverse-mode gradient tape, rebuilt per forward pass. Ops record one node
/// each in execution order; backward() traverses the list exactly once in
/// reverse. Tensors with requires_grad are registered as leaves on first use
/// (identified by buffer), so parameter gradients can be queried with grad().
///
/// Adjacency views passed to the sparse ops are stored by reference; the
/// underlying graph must outlive the tape. Every op checks its output for
/// NaN/Inf and throws if a non-finite value appears.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Tensor matmul(const Tensor& a, const Tensor& b);
  /// Row v of the result aggregates X rows over adj targets of v; sum or
  /// mean. Nodes with no neighbors yield a zero row in both modes.
  Tensor sparse_apply(const AdjacencyView& adj, const Tensor& x, Aggregate mode);
  /// Row v = element-wise max over neighbor rows; empty neighborhood yields
  /// a zero row. Gradient goes to one argmax per entry, ties to the lowest
  /// neighbor id.
  Tensor sparse_max(const AdjacencyView& adj, const Tensor& x);
  Tensor relu(const Tensor& x);
  Tensor concat_cols(std::span<const Tensor> xs);
  Tensor add(const Tensor& a, const Tensor& b);
  /// Broadcasts a 1 x d bias row over an N x d tensor.
  Tensor add_bias(const Tensor& x, const Tensor& bias);
  Tensor scale(const Tensor& x, float factor);
  /// out[g, c] = max over rows v with segment_ids[v] == g. Every segment
  /// must be non-empty; gradient routes to the lowest argmax row per entry.
  Tensor segment_max(const Tensor& x, std::span<const NodeId> segment_ids,
                     int num_segments);
  /// Mean over the batch of -log softmax(logits)[label], stabilized by
  /// row-max subtraction. Returns a 1x1 tensor.
  Tensor softmax_cross_entropy(const Tensor& logits, std::span<const int> labels);

  /// Reverse sweep from a scalar loss recorded on this tape. Gradients of
  /// tensors used multiple times accumulate additively.
  void backward(const Tensor& loss);

  /// Gradient of the last backward() w.r.t. t; zeros if t never received
  /// gradient. t must be a tape output or a requires_grad leaf.
  Tensor grad(const Tensor& t) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op {
    kLeaf,
    kMatMul,
    kSparseApply,
    kSparseMax,
    kRelu,
    kConcatCols,
    kAdd,
    kAddBias,
    kScale,
    kSegmentMax,
    kSoftmaxCrossEntropy,
  };

  struct Node {
    Op op;
    std::vector<int> inputs;      // node ids; -1 marks a constant input
    std::vector<Tensor> saved;    // forward values needed by the backward rule
    AdjacencyView adj{};          // sparse ops
    Aggregate mode = Aggregate::kSum;
    float factor = 0.0f;          // scale
    std::vector<NodeId> ids;      // segment ids / labels / argmax rows
    std::vector<float> softmax;   // cached probabilities for the loss
    int rows = 0;
    int cols = 0;
  };

  int input_id(const Tensor& t);
  int resolve_id(const Tensor& t) const;
  Tensor finish(Node node, Tensor value);
  std::vector<float>& grad_buffer(int node_id);

  std::vector<Node> nodes_;
  std::vector<std::vector<float>> grads_;
  std::unordered_map<const void*, int> leaf_by_buffer_;
};

/// Adam accumulators for one parameter list; buffers are allocated on the
/// first step and afterwards must match the parameter shapes.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<std::vector<float>> first_moment;
  std::vector<std::vector<float>> second_moment;
};

/// Standard Adam with bias correction. Updates parameters in place and
/// increments the step counter once.
void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
               AdamState& state, float lr);

}  // namespace fcggnn

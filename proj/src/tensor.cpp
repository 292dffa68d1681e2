#include "fcggnn/tensor.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace fcggnn {

namespace {

void check_finite(std::span<const float> values, const char* op) {
  for (float v : values) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string(op) + ": non-finite value produced");
    }
  }
}

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

}  // namespace

Tensor::Tensor(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      data_(std::make_shared<std::vector<float>>(
          static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0f)) {
  if (rows < 0 || cols < 0) throw std::runtime_error("tensor: negative dimension");
}

Tensor Tensor::from_rows(int rows, int cols, std::span<const float> values) {
  Tensor t(rows, cols);
  if (values.size() != static_cast<std::size_t>(t.size())) {
    throw std::runtime_error("tensor: value count does not match shape");
  }
  std::copy(values.begin(), values.end(), t.data_->begin());
  return t;
}

std::span<const float> Tensor::data() const {
  if (!data_) return {};
  return {data_->data(), data_->size()};
}

std::span<float> Tensor::mutable_data() {
  if (!data_) return {};
  return {data_->data(), data_->size()};
}

Tensor Tensor::clone() const {
  Tensor t(rows_, cols_);
  if (data_) std::copy(data_->begin(), data_->end(), t.data_->begin());
  t.requires_grad_ = requires_grad_;
  return t;
}

int Tape::input_id(const Tensor& t) {
  if (t.node_ >= 0) {
    if (static_cast<std::size_t>(t.node_) >= nodes_.size()) {
      throw std::runtime_error("tape: input tensor belongs to another tape");
    }
    return t.node_;
  }
  if (!t.requires_grad()) return -1;
  auto it = leaf_by_buffer_.find(t.buffer_id());
  if (it != leaf_by_buffer_.end()) return it->second;
  Node leaf;
  leaf.op = Op::kLeaf;
  leaf.rows = t.rows();
  leaf.cols = t.cols();
  nodes_.push_back(std::move(leaf));
  const int id = static_cast<int>(nodes_.size()) - 1;
  leaf_by_buffer_.emplace(t.buffer_id(), id);
  return id;
}

int Tape::resolve_id(const Tensor& t) const {
  if (t.node_ >= 0 && static_cast<std::size_t>(t.node_) < nodes_.size()) return t.node_;
  auto it = leaf_by_buffer_.find(t.buffer_id());
  return it == leaf_by_buffer_.end() ? -1 : it->second;
}

Tensor Tape::finish(Node node, Tensor value) {
  node.rows = value.rows();
  node.cols = value.cols();
  nodes_.push_back(std::move(node));
  value.node_ = static_cast<int>(nodes_.size()) - 1;
  return value;
}

std::vector<float>& Tape::grad_buffer(int node_id) {
  auto& buf = grads_[static_cast<std::size_t>(node_id)];
  if (buf.empty()) {
    const Node& n = nodes_[static_cast<std::size_t>(node_id)];
    buf.assign(static_cast<std::size_t>(n.rows) * static_cast<std::size_t>(n.cols), 0.0f);
  }
  return buf;
}

Tensor Tape::matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) {
    throw std::runtime_error("matmul: inner dimensions mismatch (" + shape_str(a) +
                             " vs " + shape_str(b) + ")");
  }
  const int m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(m, n);
  std::vector<double> acc(static_cast<std::size_t>(n));
  const auto av = a.data();
  const auto bv = b.data();
  auto ov = out.mutable_data();
  for (int i = 0; i < m; ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int kk = 0; kk < k; ++kk) {
      const double aik = av[static_cast<std::size_t>(i) * k + kk];
      const float* brow = bv.data() + static_cast<std::size_t>(kk) * n;
      for (int j = 0; j < n; ++j) acc[static_cast<std::size_t>(j)] += aik * brow[j];
    }
    float* orow = ov.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) orow[j] = static_cast<float>(acc[static_cast<std::size_t>(j)]);
  }
  check_finite(out.data(), "matmul");

  Node node;
  node.op = Op::kMatMul;
  node.inputs = {input_id(a), input_id(b)};
  node.saved = {a, b};
  return finish(std::move(node), std::move(out));
}

Tensor Tape::sparse_apply(const AdjacencyView& adj, const Tensor& x, Aggregate mode) {
  const int n = x.rows(), d = x.cols();
  if (adj.node_count() != n) {
    throw std::runtime_error("sparse_apply: adjacency rows do not match tensor rows");
  }
  Tensor out(n, d);
  const auto xv = x.data();
  auto ov = out.mutable_data();
  std::vector<double> acc(static_cast<std::size_t>(d));
  for (int v = 0; v < n; ++v) {
    const auto begin = adj.offsets[static_cast<std::size_t>(v)];
    const auto end = adj.offsets[static_cast<std::size_t>(v) + 1];
    std::fill(acc.begin(), acc.end(), 0.0);
    for (auto e = begin; e < end; ++e) {
      const NodeId u = adj.targets[static_cast<std::size_t>(e)];
      if (u < 0 || u >= n) throw std::runtime_error("sparse_apply: neighbor id out of range");
      const float* row = xv.data() + static_cast<std::size_t>(u) * d;
      for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += row[c];
    }
    const double norm =
        (mode == Aggregate::kMean && end > begin) ? 1.0 / static_cast<double>(end - begin) : 1.0;
    float* orow = ov.data() + static_cast<std::size_t>(v) * d;
    for (int c = 0; c < d; ++c) {
      orow[c] = static_cast<float>(acc[static_cast<std::size_t>(c)] * norm);
    }
  }
  check_finite(out.data(), "sparse_apply");

  Node node;
  node.op = Op::kSparseApply;
  node.inputs = {input_id(x)};
  node.adj = adj;
  node.mode = mode;
  return finish(std::move(node), std::move(out));
}

Tensor Tape::sparse_max(const AdjacencyView& adj, const Tensor& x) {
  const int n = x.rows(), d = x.cols();
  if (adj.node_count() != n) {
    throw std::runtime_error("sparse_max: adjacency rows do not match tensor rows");
  }
  Tensor out(n, d);
  std::vector<NodeId> argmax(static_cast<std::size_t>(n) * d, -1);
  const auto xv = x.data();
  auto ov = out.mutable_data();
  for (int v = 0; v < n; ++v) {
    const auto begin = adj.offsets[static_cast<std::size_t>(v)];
    const auto end = adj.offsets[static_cast<std::size_t>(v) + 1];
    if (begin == end) continue;  // empty neighborhood -> zero row
    float* orow = ov.data() + static_cast<std::size_t>(v) * d;
    NodeId* arow = argmax.data() + static_cast<std::size_t>(v) * d;
    for (auto e = begin; e < end; ++e) {
      const NodeId u = adj.targets[static_cast<std::size_t>(e)];
      if (u < 0 || u >= n) throw std::runtime_error("sparse_max: neighbor id out of range");
      const float* row = xv.data() + static_cast<std::size_t>(u) * d;
      if (e == begin) {
        for (int c = 0; c < d; ++c) {
          orow[c] = row[c];
          arow[c] = u;
        }
      } else {
        for (int c = 0; c < d; ++c) {
          if (row[c] > orow[c]) {
            orow[c] = row[c];
            arow[c] = u;
          }
        }
      }
    }
  }
  check_finite(out.data(), "sparse_max");

  Node node;
  node.op = Op::kSparseMax;
  node.inputs = {input_id(x)};
  node.adj = adj;
  node.ids = std::move(argmax);
  return finish(std::move(node), std::move(out));
}

Tensor Tape::relu(const Tensor& x) {
  Tensor out(x.rows(), x.cols());
  const auto xv = x.data();
  auto ov = out.mutable_data();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] > 0.0f ? xv[i] : 0.0f;
  check_finite(out.data(), "relu");

  Node node;
  node.op = Op::kRelu;
  node.inputs = {input_id(x)};
  node.saved = {x};
  return finish(std::move(node), std::move(out));
}

Tensor Tape::concat_cols(std::span<const Tensor> xs) {
  if (xs.empty()) throw std::runtime_error("concat_cols: empty input list");
  const int n = xs.front().rows();
  int total = 0;
  for (const Tensor& x : xs) {
    if (x.rows() != n) throw std::runtime_error("concat_cols: row count mismatch");
    total += x.cols();
  }
  Tensor out(n, total);
  auto ov = out.mutable_data();
  int col = 0;
  for (const Tensor& x : xs) {
    const auto xv = x.data();
    for (int r = 0; r < n; ++r) {
      std::memcpy(ov.data() + static_cast<std::size_t>(r) * total + col,
                  xv.data() + static_cast<std::size_t>(r) * x.cols(),
                  static_cast<std::size_t>(x.cols()) * sizeof(float));
    }
    col += x.cols();
  }
  check_finite(out.data(), "concat_cols");

  Node node;
  node.op = Op::kConcatCols;
  node.inputs.reserve(xs.size());
  node.saved.reserve(xs.size());
  for (const Tensor& x : xs) {
    node.inputs.push_back(input_id(x));
    node.saved.push_back(x);
  }
  return finish(std::move(node), std::move(out));
}

Tensor Tape::add(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::runtime_error("add: shape mismatch (" + shape_str(a) + " vs " +
                             shape_str(b) + ")");
  }
  Tensor out(a.rows(), a.cols());
  const auto av = a.data();
  const auto bv = b.data();
  auto ov = out.mutable_data();
  for (std::size_t i = 0; i < av.size(); ++i) ov[i] = av[i] + bv[i];
  check_finite(out.data(), "add");

  Node node;
  node.op = Op::kAdd;
  node.inputs = {input_id(a), input_id(b)};
  return finish(std::move(node), std::move(out));
}

Tensor Tape::add_bias(const Tensor& x, const Tensor& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw std::runtime_error("add_bias: bias must be 1x" + std::to_string(x.cols()) +
                             ", got " + shape_str(bias));
  }
  Tensor out(x.rows(), x.cols());
  const auto xv = x.data();
  const auto bv = bias.data();
  auto ov = out.mutable_data();
  const int d = x.cols();
  for (int r = 0; r < x.rows(); ++r) {
    const float* xrow = xv.data() + static_cast<std::size_t>(r) * d;
    float* orow = ov.data() + static_cast<std::size_t>(r) * d;
    for (int c = 0; c < d; ++c) orow[c] = xrow[c] + bv[static_cast<std::size_t>(c)];
  }
  check_finite(out.data(), "add_bias");

  Node node;
  node.op = Op::kAddBias;
  node.inputs = {input_id(x), input_id(bias)};
  return finish(std::move(node), std::move(out));
}

Tensor Tape::scale(const Tensor& x, float factor) {
  Tensor out(x.rows(), x.cols());
  const auto xv = x.data();
  auto ov = out.mutable_data();
  for (std::size_t i = 0; i < xv.size(); ++i) ov[i] = xv[i] * factor;
  check_finite(out.data(), "scale");

  Node node;
  node.op = Op::kScale;
  node.inputs = {input_id(x)};
  node.factor = factor;
  return finish(std::move(node), std::move(out));
}

Tensor Tape::segment_max(const Tensor& x, std::span<const NodeId> segment_ids,
                         int num_segments) {
  const int n = x.rows(), d = x.cols();
  if (segment_ids.size() != static_cast<std::size_t>(n)) {
    throw std::runtime_error("segment_max: segment id count does not match rows");
  }
  if (num_segments < 1) throw std::runtime_error("segment_max: need at least one segment");

  Tensor out(num_segments, d);
  std::vector<NodeId> argmax(static_cast<std::size_t>(num_segments) * d, -1);
  const auto xv = x.data();
  auto ov = out.mutable_data();
  for (int v = 0; v < n; ++v) {
    const NodeId g = segment_ids[static_cast<std::size_t>(v)];
    if (g < 0 || g >= num_segments) {
      throw std::runtime_error("segment_max: segment id out of range");
    }
    const float* row = xv.data() + static_cast<std::size_t>(v) * d;
    float* orow = ov.data() + static_cast<std::size_t>(g) * d;
    NodeId* arow = argmax.data() + static_cast<std::size_t>(g) * d;
    if (arow[0] < 0) {
      for (int c = 0; c < d; ++c) {
        orow[c] = row[c];
        arow[c] = v;
      }
    } else {
      for (int c = 0; c < d; ++c) {
        if (row[c] > orow[c]) {
          orow[c] = row[c];
          arow[c] = v;
        }
      }
    }
  }
  for (int g = 0; g < num_segments; ++g) {
    if (argmax[static_cast<std::size_t>(g) * d] < 0 && d > 0) {
      throw std::runtime_error("segment_max: empty segment " + std::to_string(g));
    }
  }
  check_finite(out.data(), "segment_max");

  Node node;
  node.op = Op::kSegmentMax;
  node.inputs = {input_id(x)};
  node.ids = std::move(argmax);
  return finish(std::move(node), std::move(out));
}

Tensor Tape::softmax_cross_entropy(const Tensor& logits, std::span<const int> labels) {
  const int b = logits.rows(), c = logits.cols();
  if (labels.size() != static_cast<std::size_t>(b)) {
    throw std::runtime_error("softmax_cross_entropy: label count does not match batch");
  }
  std::vector<float> probs(static_cast<std::size_t>(b) * c);
  const auto lv = logits.data();
  double total = 0.0;
  for (int i = 0; i < b; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= c) {
      throw std::runtime_error("softmax_cross_entropy: label out of range: " +
                               std::to_string(y));
    }
    const float* row = lv.data() + static_cast<std::size_t>(i) * c;
    float row_max = row[0];
    for (int j = 1; j < c; ++j) row_max = std::max(row_max, row[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(static_cast<double>(row[j]) - row_max);
    for (int j = 0; j < c; ++j) {
      probs[static_cast<std::size_t>(i) * c + j] =
          static_cast<float>(std::exp(static_cast<double>(row[j]) - row_max) / z);
    }
    total += -(static_cast<double>(row[y]) - row_max - std::log(z));
  }

  Tensor out(1, 1);
  out.mutable_data()[0] = static_cast<float>(total / static_cast<double>(b));
  check_finite(out.data(), "softmax_cross_entropy");

  Node node;
  node.op = Op::kSoftmaxCrossEntropy;
  node.inputs = {input_id(logits)};
  node.ids.assign(labels.begin(), labels.end());
  node.softmax = std::move(probs);
  return finish(std::move(node), std::move(out));
}

void Tape::backward(const Tensor& loss) {
  if (loss.rows() != 1 || loss.cols() != 1) {
    throw std::runtime_error("backward: loss must be a 1x1 tensor");
  }
  const int loss_id = loss.node_;
  if (loss_id < 0 || static_cast<std::size_t>(loss_id) >= nodes_.size()) {
    throw std::runtime_error("backward: loss was not produced under this tape");
  }

  grads_.assign(nodes_.size(), {});
  grad_buffer(loss_id)[0] = 1.0f;

  for (int id = loss_id; id >= 0; --id) {
    const Node& node = nodes_[static_cast<std::size_t>(id)];
    const auto& gout = grads_[static_cast<std::size_t>(id)];
    if (gout.empty()) continue;

    switch (node.op) {
      case Op::kLeaf:
        break;
      case Op::kMatMul: {
        const Tensor& a = node.saved[0];
        const Tensor& b = node.saved[1];
        const int m = a.rows(), k = a.cols(), n = b.cols();
        if (node.inputs[0] >= 0) {
          auto& ga = grad_buffer(node.inputs[0]);
          const auto bv = b.data();
          for (int i = 0; i < m; ++i) {
            const float* grow = gout.data() + static_cast<std::size_t>(i) * n;
            for (int kk = 0; kk < k; ++kk) {
              const float* brow = bv.data() + static_cast<std::size_t>(kk) * n;
              double acc = 0.0;
              for (int j = 0; j < n; ++j) acc += static_cast<double>(grow[j]) * brow[j];
              ga[static_cast<std::size_t>(i) * k + kk] += static_cast<float>(acc);
            }
          }
        }
        if (node.inputs[1] >= 0) {
          auto& gb = grad_buffer(node.inputs[1]);
          const auto av = a.data();
          std::vector<double> scratch(static_cast<std::size_t>(k) * n, 0.0);
          for (int i = 0; i < m; ++i) {
            const float* grow = gout.data() + static_cast<std::size_t>(i) * n;
            for (int kk = 0; kk < k; ++kk) {
              const double aik = av[static_cast<std::size_t>(i) * k + kk];
              double* srow = scratch.data() + static_cast<std::size_t>(kk) * n;
              for (int j = 0; j < n; ++j) srow[j] += aik * grow[j];
            }
          }
          for (std::size_t i = 0; i < scratch.size(); ++i) {
            gb[i] += static_cast<float>(scratch[i]);
          }
        }
        break;
      }
      case Op::kSparseApply: {
        if (node.inputs[0] < 0) break;
        auto& gx = grad_buffer(node.inputs[0]);
        const int n = node.rows, d = node.cols;
        for (int v = 0; v < n; ++v) {
          const auto begin = node.adj.offsets[static_cast<std::size_t>(v)];
          const auto end = node.adj.offsets[static_cast<std::size_t>(v) + 1];
          if (begin == end) continue;
          const float coef = node.mode == Aggregate::kMean
                                 ? 1.0f / static_cast<float>(end - begin)
                                 : 1.0f;
          const float* grow = gout.data() + static_cast<std::size_t>(v) * d;
          for (auto e = begin; e < end; ++e) {
            const NodeId u = node.adj.targets[static_cast<std::size_t>(e)];
            float* xrow = gx.data() + static_cast<std::size_t>(u) * d;
            for (int c = 0; c < d; ++c) xrow[c] += coef * grow[c];
          }
        }
        break;
      }
      case Op::kSparseMax: {
        if (node.inputs[0] < 0) break;
        auto& gx = grad_buffer(node.inputs[0]);
        const int d = node.cols;
        for (std::size_t i = 0; i < node.ids.size(); ++i) {
          const NodeId u = node.ids[i];
          if (u < 0) continue;
          gx[static_cast<std::size_t>(u) * d + i % static_cast<std::size_t>(d)] +=
              gout[i];
        }
        break;
      }
      case Op::kRelu: {
        if (node.inputs[0] < 0) break;
        auto& gx = grad_buffer(node.inputs[0]);
        const auto xv = node.saved[0].data();
        for (std::size_t i = 0; i < gout.size(); ++i) {
          if (xv[i] > 0.0f) gx[i] += gout[i];
        }
        break;
      }
      case Op::kConcatCols: {
        const int total = node.cols;
        const int n = node.rows;
        int col = 0;
        for (std::size_t k = 0; k < node.inputs.size(); ++k) {
          const int w = node.saved[k].cols();
          if (node.inputs[k] >= 0) {
            auto& gx = grad_buffer(node.inputs[k]);
            for (int r = 0; r < n; ++r) {
              const float* grow = gout.data() + static_cast<std::size_t>(r) * total + col;
              float* xrow = gx.data() + static_cast<std::size_t>(r) * w;
              for (int c = 0; c < w; ++c) xrow[c] += grow[c];
            }
          }
          col += w;
        }
        break;
      }
      case Op::kAdd: {
        for (int side = 0; side < 2; ++side) {
          if (node.inputs[static_cast<std::size_t>(side)] < 0) continue;
          auto& g = grad_buffer(node.inputs[static_cast<std::size_t>(side)]);
          for (std::size_t i = 0; i < gout.size(); ++i) g[i] += gout[i];
        }
        break;
      }
      case Op::kAddBias: {
        if (node.inputs[0] >= 0) {
          auto& gx = grad_buffer(node.inputs[0]);
          for (std::size_t i = 0; i < gout.size(); ++i) gx[i] += gout[i];
        }
        if (node.inputs[1] >= 0) {
          auto& gb = grad_buffer(node.inputs[1]);
          const int d = node.cols;
          for (int c = 0; c < d; ++c) {
            double acc = 0.0;
            for (int r = 0; r < node.rows; ++r) {
              acc += gout[static_cast<std::size_t>(r) * d + c];
            }
            gb[static_cast<std::size_t>(c)] += static_cast<float>(acc);
          }
        }
        break;
      }
      case Op::kScale: {
        if (node.inputs[0] < 0) break;
        auto& gx = grad_buffer(node.inputs[0]);
        for (std::size_t i = 0; i < gout.size(); ++i) gx[i] += node.factor * gout[i];
        break;
      }
      case Op::kSegmentMax: {
        if (node.inputs[0] < 0) break;
        auto& gx = grad_buffer(node.inputs[0]);
        const int d = node.cols;
        for (std::size_t i = 0; i < node.ids.size(); ++i) {
          const NodeId v = node.ids[i];
          if (v < 0) continue;
          gx[static_cast<std::size_t>(v) * d + i % static_cast<std::size_t>(d)] +=
              gout[i];
        }
        break;
      }
      case Op::kSoftmaxCrossEntropy: {
        if (node.inputs[0] < 0) break;
        auto& gl = grad_buffer(node.inputs[0]);
        const float upstream = gout[0];
        const int b = static_cast<int>(node.ids.size());
        const int c = static_cast<int>(node.softmax.size()) / b;
        const float inv_b = 1.0f / static_cast<float>(b);
        for (int i = 0; i < b; ++i) {
          const int y = node.ids[static_cast<std::size_t>(i)];
          for (int j = 0; j < c; ++j) {
            float g = node.softmax[static_cast<std::size_t>(i) * c + j];
            if (j == y) g -= 1.0f;
            gl[static_cast<std::size_t>(i) * c + j] += upstream * inv_b * g;
          }
        }
        break;
      }
    }
  }
}

Tensor Tape::grad(const Tensor& t) const {
  const int id = resolve_id(t);
  Tensor out(t.rows(), t.cols());
  if (id < 0 || static_cast<std::size_t>(id) >= grads_.size()) return out;
  const auto& buf = grads_[static_cast<std::size_t>(id)];
  if (buf.empty()) return out;
  if (buf.size() != static_cast<std::size_t>(t.size())) {
    throw std::runtime_error("grad: shape mismatch with recorded node");
  }
  std::copy(buf.begin(), buf.end(), out.mutable_data().begin());
  return out;
}

void adam_step(std::span<Tensor* const> params, std::span<const Tensor> grads,
               AdamState& state, float lr) {
  if (params.size() != grads.size()) {
    throw std::runtime_error("adam_step: parameter/gradient count mismatch");
  }
  if (lr < 0.0f) throw std::runtime_error("adam_step: negative learning rate");

  if (state.first_moment.empty()) {
    state.first_moment.resize(params.size());
    state.second_moment.resize(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
      state.first_moment[p].assign(static_cast<std::size_t>(params[p]->size()), 0.0f);
      state.second_moment[p].assign(static_cast<std::size_t>(params[p]->size()), 0.0f);
    }
  }
  if (state.first_moment.size() != params.size()) {
    throw std::runtime_error("adam_step: state does not match parameter count");
  }

  state.step += 1;
  const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& param = *params[p];
    const Tensor& grad = grads[p];
    if (param.rows() != grad.rows() || param.cols() != grad.cols()) {
      throw std::runtime_error("adam_step: gradient shape mismatch");
    }
    auto& m = state.first_moment[p];
    auto& v = state.second_moment[p];
    if (m.size() != static_cast<std::size_t>(param.size())) {
      throw std::runtime_error("adam_step: state shape mismatch");
    }
    auto pv = param.mutable_data();
    const auto gv = grad.data();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double g = gv[i];
      const double mi = state.beta1 * m[i] + (1.0 - state.beta1) * g;
      const double vi = state.beta2 * v[i] + (1.0 - state.beta2) * g * g;
      m[i] = static_cast<float>(mi);
      v[i] = static_cast<float>(vi);
      const double m_hat = mi / bias1;
      const double v_hat = vi / bias2;
      pv[i] = static_cast<float>(pv[i] - lr * m_hat / (std::sqrt(v_hat) + state.epsilon));
    }
  }
}

}  // namespace fcggnn

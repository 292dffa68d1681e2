#include "fcggnn/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "fcggnn/parallel.hpp"
#include "fcggnn/tensor.hpp"

namespace fcggnn {

SelectionMetric selection_metric_from_string(const std::string& name) {
  if (name == "accuracy") return SelectionMetric::kAccuracy;
  if (name == "weighted_f1") return SelectionMetric::kWeightedF1;
  throw std::runtime_error("unknown selection metric: " + name);
}

std::string to_string(SelectionMetric metric) {
  return metric == SelectionMetric::kAccuracy ? "accuracy" : "weighted_f1";
}

namespace {

struct PreparedGraph {
  const DirectedGraph* graph = nullptr;
  int label = 0;
  Tensor features;  // standardized, N x 4
};

Tensor to_feature_tensor(const NodeFeatureMatrix& m) {
  std::vector<float> values(m.values().begin(), m.values().end());
  return Tensor::from_rows(m.node_count(), NodeFeatureMatrix::kColumns, values);
}

// Deterministic bounded draw + Fisher-Yates; avoids the
// implementation-defined std::shuffle/distribution internals.
std::uint32_t bounded(std::mt19937& rng, std::uint32_t n) {
  return static_cast<std::uint32_t>(
      (static_cast<std::uint64_t>(rng()) * static_cast<std::uint64_t>(n)) >> 32);
}

void shuffle_indices(std::vector<std::size_t>& order, std::mt19937& rng) {
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = bounded(rng, static_cast<std::uint32_t>(i));
    std::swap(order[i - 1], order[j]);
  }
}

int argmax_row(std::span<const float> row) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(row.size()); ++j) {
    if (row[static_cast<std::size_t>(j)] > row[static_cast<std::size_t>(best)]) best = j;
  }
  return best;
}

struct BatchInput {
  GraphBatch batch;
  Tensor features;
  std::vector<int> labels;
};

BatchInput assemble_batch(std::span<const PreparedGraph* const> graphs) {
  std::vector<const DirectedGraph*> ptrs;
  std::vector<int> labels;
  std::int64_t total_nodes = 0;
  for (const PreparedGraph* g : graphs) {
    ptrs.push_back(g->graph);
    labels.push_back(g->label);
    total_nodes += g->graph->node_count();
  }

  BatchInput input;
  input.batch = batch_graphs(ptrs, labels);
  input.labels = std::move(labels);
  input.features =
      Tensor(static_cast<int>(total_nodes), NodeFeatureMatrix::kColumns);
  auto out = input.features.mutable_data();
  std::size_t offset = 0;
  for (const PreparedGraph* g : graphs) {
    const auto src = g->features.data();
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
    offset += src.size();
  }
  return input;
}

std::vector<int> predict_batchwise(const ModelParams& params, const ModelConfig& cfg,
                                   std::span<const PreparedGraph> graphs,
                                   int batch_size) {
  std::vector<int> predictions;
  predictions.reserve(graphs.size());
  for (std::size_t start = 0; start < graphs.size();
       start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end =
        std::min(graphs.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const PreparedGraph*> chunk;
    for (std::size_t i = start; i < end; ++i) chunk.push_back(&graphs[i]);
    BatchInput input = assemble_batch(chunk);
    Tape tape;
    ForwardResult result =
        model_forward(tape, input.batch, input.features, params, cfg);
    const auto logits = result.logits.data();
    for (int g = 0; g < input.batch.graph_count; ++g) {
      predictions.push_back(argmax_row(
          logits.subspan(static_cast<std::size_t>(g) * cfg.num_classes,
                         static_cast<std::size_t>(cfg.num_classes))));
    }
  }
  return predictions;
}

double metric_value(const MetricsReport& report, SelectionMetric metric) {
  return metric == SelectionMetric::kAccuracy ? report.accuracy : report.weighted_f1;
}

}  // namespace

FitResult fit(const Corpus& corpus, ModelConfig model_cfg, const TrainConfig& train_cfg,
              const EpochCallback& on_epoch) {
  if (corpus.train.empty()) throw std::runtime_error("fit: empty train split");
  if (train_cfg.epochs < 1) throw std::runtime_error("fit: epochs must be >= 1");
  if (train_cfg.batch_size < 1) throw std::runtime_error("fit: batch size must be >= 1");
  if (train_cfg.lr < 0.0f) throw std::runtime_error("fit: negative learning rate");
  if (train_cfg.val_fraction <= 0.0 || train_cfg.val_fraction >= 1.0) {
    throw std::runtime_error("fit: val_fraction must be in (0,1)");
  }

  const int num_classes = static_cast<int>(corpus.class_names.size());
  model_cfg.num_classes = num_classes;
  model_cfg.input_dim = NodeFeatureMatrix::kColumns;
  model_cfg.validate();

  std::mt19937 rng(static_cast<std::mt19937::result_type>(train_cfg.seed));

  // Assemble train/val lists; carve a stratified validation set out of train
  // when the corpus does not provide one.
  std::vector<const LabeledGraph*> train_list, val_list;
  if (!corpus.val.empty()) {
    for (const auto& g : corpus.train) train_list.push_back(&g);
    for (const auto& g : corpus.val) val_list.push_back(&g);
  } else {
    std::vector<bool> to_val(corpus.train.size(), false);
    for (int c = 0; c < num_classes; ++c) {
      std::vector<std::size_t> members;
      for (std::size_t i = 0; i < corpus.train.size(); ++i) {
        if (corpus.train[i].label == c) members.push_back(i);
      }
      if (members.size() < 2) continue;
      shuffle_indices(members, rng);
      auto count = static_cast<std::size_t>(std::lround(
          static_cast<double>(members.size()) * train_cfg.val_fraction));
      count = std::clamp<std::size_t>(count, 1, members.size() - 1);
      for (std::size_t k = 0; k < count; ++k) to_val[members[k]] = true;
    }
    for (std::size_t i = 0; i < corpus.train.size(); ++i) {
      (to_val[i] ? val_list : train_list).push_back(&corpus.train[i]);
    }
  }
  if (train_list.empty()) throw std::runtime_error("fit: no train graphs left after split");

  // Labels in val/test must be covered by train.
  std::vector<bool> seen_in_train(static_cast<std::size_t>(num_classes), false);
  for (const LabeledGraph* g : train_list) {
    seen_in_train[static_cast<std::size_t>(g->label)] = true;
  }
  auto check_covered = [&](std::span<const LabeledGraph> split, const char* name) {
    for (const auto& g : split) {
      if (g.label < 0 || g.label >= num_classes ||
          !seen_in_train[static_cast<std::size_t>(g.label)]) {
        throw std::runtime_error(std::string("fit: ") + name +
                                 " split contains a class absent from train");
      }
    }
  };
  for (const LabeledGraph* g : val_list) {
    if (!seen_in_train[static_cast<std::size_t>(g->label)]) {
      throw std::runtime_error("fit: val split contains a class absent from train");
    }
  }
  check_covered(corpus.test, "test");

  // Featurize once, fit the standardizer on train nodes only, standardize.
  std::vector<NodeFeatureMatrix> train_raw(train_list.size());
  std::vector<NodeFeatureMatrix> val_raw(val_list.size());
  parallel_for(train_list.size() + val_list.size(), [&](std::size_t i) {
    if (i < train_list.size()) {
      train_raw[i] = build_feature_matrix(train_list[i]->graph);
    } else {
      val_raw[i - train_list.size()] =
          build_feature_matrix(val_list[i - train_list.size()]->graph);
    }
  });
  const StandardizationStats stats = fit_standardizer(train_raw);

  std::vector<PreparedGraph> train_set(train_list.size());
  std::vector<PreparedGraph> val_set(val_list.size());
  for (std::size_t i = 0; i < train_list.size(); ++i) {
    train_set[i] = {&train_list[i]->graph, train_list[i]->label,
                    to_feature_tensor(apply_standardizer(train_raw[i], stats))};
  }
  for (std::size_t i = 0; i < val_list.size(); ++i) {
    val_set[i] = {&val_list[i]->graph, val_list[i]->label,
                  to_feature_tensor(apply_standardizer(val_raw[i], stats))};
  }

  ModelParams params = init_params(model_cfg);
  AdamState adam;
  TrainHistory history;
  ModelParams best_params;
  double best_metric = -std::numeric_limits<double>::infinity();
  const bool no_val = val_set.empty();

  std::vector<std::size_t> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  std::vector<int> val_labels;
  for (const auto& g : val_set) val_labels.push_back(g.label);

  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    shuffle_indices(order, rng);

    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(train_cfg.batch_size)) {
      const std::size_t end = std::min(
          order.size(), start + static_cast<std::size_t>(train_cfg.batch_size));
      std::vector<const PreparedGraph*> chunk;
      for (std::size_t i = start; i < end; ++i) chunk.push_back(&train_set[order[i]]);

      try {
        BatchInput input = assemble_batch(chunk);
        Tape tape;
        ForwardResult result =
            model_forward(tape, input.batch, input.features, params, model_cfg);
        Tensor loss = tape.softmax_cross_entropy(result.logits, input.labels);
        loss_sum += static_cast<double>(loss.data()[0]) * static_cast<double>(chunk.size());
        tape.backward(loss);

        auto tensors = params.all();
        std::vector<Tensor> grads;
        grads.reserve(tensors.size());
        for (Tensor* t : tensors) grads.push_back(tape.grad(*t));
        adam_step(tensors, grads, adam, train_cfg.lr);
      } catch (const std::exception& e) {
        throw std::runtime_error("fit: aborted at epoch " + std::to_string(epoch) +
                                 ", batch starting at graph " + std::to_string(start) +
                                 ": " + e.what());
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(train_set.size());

    double val_value = 0.0;
    if (!no_val) {
      const std::vector<int> predictions =
          predict_batchwise(params, model_cfg, val_set, train_cfg.batch_size);
      const MetricsReport report =
          compute_metrics(val_labels, predictions, num_classes);
      val_value = metric_value(report, train_cfg.selection_metric);
    }

    const bool improved =
        no_val ? epoch == train_cfg.epochs - 1 : val_value > best_metric;
    if (improved) {
      best_metric = val_value;
      best_params = params.clone();
      history.best_epoch = epoch;
    }

    const auto epoch_end = std::chrono::steady_clock::now();
    history.train_loss.push_back(epoch_loss);
    history.val_metric.push_back(val_value);
    history.epoch_seconds.push_back(
        std::chrono::duration<double>(epoch_end - epoch_start).count());
    if (on_epoch) on_epoch(epoch, epoch_loss, val_value);
  }

  FitResult result;
  result.model.config = model_cfg;
  result.model.class_names = corpus.class_names;
  result.model.stats = stats;
  result.model.params = std::move(best_params);
  result.history = std::move(history);
  return result;
}

MetricsReport evaluate(const ModelContainer& model, std::span<const LabeledGraph> split) {
  if (split.empty()) throw std::runtime_error("evaluate: empty split");

  std::vector<PreparedGraph> prepared(split.size());
  parallel_for(split.size(), [&](std::size_t i) {
    prepared[i] = {&split[i].graph, split[i].label,
                   to_feature_tensor(apply_standardizer(
                       build_feature_matrix(split[i].graph), model.stats))};
  });

  std::vector<int> labels;
  for (const auto& g : prepared) labels.push_back(g.label);
  const std::vector<int> predictions =
      predict_batchwise(model.params, model.config, prepared, 64);
  return compute_metrics(labels, predictions, model.config.num_classes);
}

Prediction predict(const ModelContainer& model, const DirectedGraph& g) {
  const NodeFeatureMatrix standardized =
      apply_standardizer(build_feature_matrix(g), model.stats);
  const Tensor features = to_feature_tensor(standardized);

  const DirectedGraph* graphs[] = {&g};
  const int labels[] = {0};
  GraphBatch batch = batch_graphs(graphs, labels);

  Tape tape;
  ForwardResult result = model_forward(tape, batch, features, model.params, model.config);
  const auto logits = result.logits.data();

  Prediction prediction;
  const int c = model.config.num_classes;
  double row_max = logits[0];
  for (int j = 1; j < c; ++j) {
    row_max = std::max(row_max, static_cast<double>(logits[static_cast<std::size_t>(j)]));
  }
  double z = 0.0;
  std::vector<double> exps(static_cast<std::size_t>(c));
  for (int j = 0; j < c; ++j) {
    exps[static_cast<std::size_t>(j)] =
        std::exp(static_cast<double>(logits[static_cast<std::size_t>(j)]) - row_max);
    z += exps[static_cast<std::size_t>(j)];
  }
  prediction.probabilities.resize(static_cast<std::size_t>(c));
  for (int j = 0; j < c; ++j) {
    prediction.probabilities[static_cast<std::size_t>(j)] =
        static_cast<float>(exps[static_cast<std::size_t>(j)] / z);
  }
  prediction.class_id = argmax_row(logits.subspan(0, static_cast<std::size_t>(c)));
  const auto embedding = result.graph_embeddings.data();
  prediction.embedding.assign(embedding.begin(), embedding.end());
  return prediction;
}

}  // namespace fcggnn

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fcggnn/dataio.hpp"
#include "fcggnn/graph.hpp"
#include "fcggnn/metrics.hpp"
#include "fcggnn/model.hpp"

namespace fcggnn {

enum class SelectionMetric { kAccuracy, kWeightedF1 };

SelectionMetric selection_metric_from_string(const std::string& name);
std::string to_string(SelectionMetric metric);

struct TrainConfig {
  float lr = 0.001f;
  int epochs = 200;
  int batch_size = 64;
  std::uint64_t seed = 0;
  SelectionMetric selection_metric = SelectionMetric::kWeightedF1;
  double val_fraction = 0.1;  // used only when the corpus has no val split
};

struct TrainHistory {
  std::vector<double> train_loss;     // per epoch, mean over train graphs
  std::vector<double> val_metric;     // per epoch
  std::vector<double> epoch_seconds;  // wall clock, not part of determinism
  int best_epoch = -1;                // 0-based; epoch whose params were kept
};

struct FitResult {
  ModelContainer model;  // parameters of the best validation epoch
  TrainHistory history;
};

using EpochCallback = std::function<void(int epoch, double loss, double val_metric)>;

/// Supervised training: per epoch, seeded shuffle, mini-batches, softmax
/// cross-entropy, Adam. Standardization is fitted on the train split only.
/// When the corpus has no val split, a stratified val_fraction is carved out
/// of train (seeded). Returns the checkpoint of the best validation epoch
/// (ties resolved to the earliest).
FitResult fit(const Corpus& corpus, ModelConfig model_cfg, const TrainConfig& train_cfg,
              const EpochCallback& on_epoch = {});

/// Argmax predictions (ties to the lowest class id) over a split, reported
/// through compute_metrics. Throws on an empty split.
MetricsReport evaluate(const ModelContainer& model, std::span<const LabeledGraph> split);

struct Prediction {
  int class_id = 0;
  std::vector<float> probabilities;  // sums to 1
  std::vector<float> embedding;      // whole-graph embedding
};

/// Featurize, standardize with the stored stats, forward, softmax.
Prediction predict(const ModelContainer& model, const DirectedGraph& g);

}  // namespace fcggnn

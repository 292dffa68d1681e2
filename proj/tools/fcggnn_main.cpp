#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fcggnn/dataio.hpp"
#include "fcggnn/features.hpp"
#include "fcggnn/graph.hpp"
#include "fcggnn/metrics.hpp"
#include "fcggnn/model.hpp"
#include "fcggnn/train.hpp"

namespace {

using namespace fcggnn;

Corpus load_data(const std::string& data) {
  const CorpusManifest manifest = std::filesystem::is_directory(data)
                                      ? scan_directory(data)
                                      : read_manifest(data);
  return load_corpus(manifest);
}

LayerKind model_flag_to_kind(const std::string& name) {
  if (name == "gcn-jk") return LayerKind::kGcn;
  if (name == "sage-jk") return LayerKind::kSage;
  if (name == "gin-jk") return LayerKind::kGin;
  throw std::runtime_error("unknown model: " + name);
}

int run_featurize(const std::string& graph_path) {
  const DirectedGraph g = load_edge_list_file(graph_path);
  const NodeFeatureMatrix features = build_feature_matrix(g);
  char buf[64];
  for (NodeId v = 0; v < features.node_count(); ++v) {
    std::string line;
    for (int c = 0; c < NodeFeatureMatrix::kColumns; ++c) {
      std::snprintf(buf, sizeof(buf), "%g", features.at(v, c));
      if (c > 0) line += ' ';
      line += buf;
    }
    std::cout << line << '\n';
  }
  return 0;
}

struct TrainFlags {
  std::string data;
  std::string model = "sage-jk";
  int layers = 6;
  int hidden = 128;
  double lr = 0.001;
  int epochs = 200;
  int batch_size = 64;
  std::uint64_t seed = 0;
  std::string out = "model.bin";
  bool allow_any_lr = false;
  std::string selection = "weighted_f1";
  double val_fraction = 0.1;
};

int run_train(const TrainFlags& flags) {
  const Corpus corpus = load_data(flags.data);

  ModelConfig model_cfg;
  model_cfg.layer_kind = model_flag_to_kind(flags.model);
  model_cfg.num_layers = flags.layers;
  model_cfg.hidden = flags.hidden;
  model_cfg.seed = flags.seed;

  TrainConfig train_cfg;
  train_cfg.lr = static_cast<float>(flags.lr);
  train_cfg.epochs = flags.epochs;
  train_cfg.batch_size = flags.batch_size;
  train_cfg.seed = flags.seed;
  train_cfg.selection_metric = selection_metric_from_string(flags.selection);
  train_cfg.val_fraction = flags.val_fraction;

  const std::string metric_name = to_string(train_cfg.selection_metric);
  const auto start = std::chrono::steady_clock::now();
  char line[160];
  FitResult result = fit(corpus, model_cfg, train_cfg,
                         [&](int epoch, double loss, double val_metric) {
                           std::snprintf(line, sizeof(line),
                                         "epoch %4d/%d  loss %.6f  val_%s %.4f",
                                         epoch + 1, train_cfg.epochs, loss,
                                         metric_name.c_str(), val_metric);
                           std::cout << line << std::endl;
                         });
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  save_model(result.model.params, result.model.config, result.model.stats,
             result.model.class_names, flags.out);
  std::cout << "saved model to " << flags.out << " (best epoch "
            << result.history.best_epoch + 1 << ")" << std::endl;
  std::snprintf(line, sizeof(line), "trained in %.1f s", elapsed);
  std::cout << line << std::endl;
  return 0;
}

int run_eval(const std::string& model_path, const std::string& data,
             const std::string& split_token) {
  const ModelContainer model = load_model(model_path);
  const Corpus corpus = load_data(data);
  const Split split = split_from_string(split_token);
  const MetricsReport report = evaluate(model, corpus.split(split));
  std::cout << format_metrics_table(report, model.class_names);
  std::cout << format_metrics_machine(report);
  return 0;
}

int run_predict(const std::string& model_path, const std::string& graph_path) {
  const ModelContainer model = load_model(model_path);
  const DirectedGraph g = load_edge_list_file(graph_path);
  const Prediction prediction = predict(model, g);
  std::cout << "class " << model.class_names[static_cast<std::size_t>(prediction.class_id)]
            << '\n';
  std::cout << "probs";
  char buf[64];
  for (float p : prediction.probabilities) {
    std::snprintf(buf, sizeof(buf), " %.6f", static_cast<double>(p));
    std::cout << buf;
  }
  std::cout << '\n';
  return 0;
}

int run_export(const std::string& model_path, const std::string& data,
               const std::string& out) {
  const ModelContainer model = load_model(model_path);
  const Corpus corpus = load_data(data);
  export_embeddings(model, corpus, out);
  const std::size_t count = corpus.train.size() + corpus.val.size() + corpus.test.size();
  std::cout << "wrote " << count << " embeddings to " << out << std::endl;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Function-call-graph classification with JK graph neural networks"};
  app.require_subcommand(1);

  std::string featurize_graph;
  CLI::App* featurize = app.add_subcommand("featurize", "Print the raw node feature matrix");
  featurize->add_option("--graph", featurize_graph, "edge-list file")->required();

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train a model");
  train->add_option("--data", train_flags.data, "dataset directory or manifest.csv")
      ->required();
  train->add_option("--model", train_flags.model, "gcn-jk, sage-jk, or gin-jk")
      ->check(CLI::IsMember({"gcn-jk", "sage-jk", "gin-jk"}));
  train->add_option("--layers", train_flags.layers, "number of GNN layers");
  train->add_option("--hidden", train_flags.hidden, "hidden width");
  train->add_option("--lr", train_flags.lr, "learning rate (0.001 or 0.0001)");
  train->add_option("--epochs", train_flags.epochs, "training epochs");
  train->add_option("--batch-size", train_flags.batch_size, "graphs per batch");
  train->add_option("--seed", train_flags.seed, "random seed");
  train->add_option("--out", train_flags.out, "output model path");
  train->add_flag("--allow-any-lr", train_flags.allow_any_lr,
                  "lift the learning-rate grid restriction");
  train->add_option("--selection-metric", train_flags.selection,
                    "val metric for checkpoint selection")
      ->check(CLI::IsMember({"accuracy", "weighted_f1"}));
  train->add_option("--val-fraction", train_flags.val_fraction,
                    "val carve when the dataset has no val split");

  std::string eval_model, eval_data, eval_split = "test";
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a model on a split");
  eval->add_option("--model", eval_model, "model container")->required();
  eval->add_option("--data", eval_data, "dataset directory or manifest.csv")->required();
  eval->add_option("--split", eval_split, "train, val, or test")
      ->check(CLI::IsMember({"train", "val", "test"}));

  std::string predict_model, predict_graph;
  CLI::App* predict_cmd = app.add_subcommand("predict", "Classify one graph");
  predict_cmd->add_option("--model", predict_model, "model container")->required();
  predict_cmd->add_option("--graph", predict_graph, "edge-list file")->required();

  std::string export_model, export_data, export_out;
  CLI::App* export_cmd =
      app.add_subcommand("export-embeddings", "Write whole-graph embeddings as TSV");
  export_cmd->add_option("--model", export_model, "model container")->required();
  export_cmd->add_option("--data", export_data, "dataset directory or manifest.csv")
      ->required();
  export_cmd->add_option("--out", export_out, "output TSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(featurize)) return run_featurize(featurize_graph);
    if (app.got_subcommand(train)) {
      const bool on_grid = std::abs(train_flags.lr - 0.001) < 1e-12 ||
                           std::abs(train_flags.lr - 0.0001) < 1e-12;
      if (!on_grid && !train_flags.allow_any_lr) {
        std::cerr << "usage error: --lr must be 0.001 or 0.0001 "
                     "(pass --allow-any-lr to override)"
                  << std::endl;
        return 2;
      }
      return run_train(train_flags);
    }
    if (app.got_subcommand(eval)) return run_eval(eval_model, eval_data, eval_split);
    if (app.got_subcommand(predict_cmd)) return run_predict(predict_model, predict_graph);
    if (app.got_subcommand(export_cmd)) return run_export(export_model, export_data, export_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

#pragma once

#include <span>
#include <string>
#include <vector>

#include "fcggnn/features.hpp"
#include "fcggnn/graph.hpp"
#include "fcggnn/model.hpp"

namespace fcggnn {

enum class Split { kTrain, kVal, kTest };

Split split_from_string(const std::string& token);
std::string to_string(Split split);

struct ManifestEntry {
  std::string path;        // resolved to an absolute/joined path
  std::string class_name;
  Split split = Split::kTrain;
  int class_id = -1;       // index into CorpusManifest::class_names
};

/// Corpus description: one edge-list file per graph with class and split.
/// Class ids are assigned from the lexicographically sorted class names so
/// they are stable under row reordering.
struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> class_names;
};

/// Reads a "path,label,split" CSV. Relative paths resolve against the
/// manifest's directory. Throws on a missing file, duplicate path, unknown
/// split token, or an empty train/test split.
CorpusManifest read_manifest(const std::string& path);

/// Synthesizes a manifest from a root/<split>/<class>/<file>.edgelist tree.
CorpusManifest scan_directory(const std::string& root);

/// CSV re-serialization (same header the reader accepts).
std::string format_manifest(const CorpusManifest& manifest);

struct LabeledGraph {
  DirectedGraph graph;
  int label = 0;
  std::string path;
};

struct Corpus {
  std::vector<LabeledGraph> train, val, test;
  std::vector<std::string> class_names;

  std::span<const LabeledGraph> split(Split s) const {
    switch (s) {
      case Split::kTrain: return train;
      case Split::kVal: return val;
      case Split::kTest: return test;
    }
    return {};
  }
};

/// Loads every entry's edge list (in parallel) into memory.
Corpus load_corpus(const CorpusManifest& manifest);

/// Everything needed to run the trained model.
struct ModelContainer {
  ModelConfig config;
  std::vector<std::string> class_names;
  StandardizationStats stats;
  ModelParams params;
};

/// Single-file binary container: magic "FCGGNN", version byte, then
/// length-prefixed sections (config, class names, stats, parameters),
/// little-endian throughout. Written via temp file + atomic rename.
void save_model(const ModelParams& params, const ModelConfig& cfg,
                const StandardizationStats& stats,
                std::span<const std::string> class_names, const std::string& path);

/// Rejects bad magic, unknown versions, and dimension mismatches.
ModelContainer load_model(const std::string& path);

/// Tab-separated export of whole-graph embeddings: header row, then one row
/// per graph (path, class name, split, `hidden` values at 9 significant
/// digits).
void export_embeddings(const ModelContainer& model, const Corpus& corpus,
                       const std::string& out_path);

}  // namespace fcggnn

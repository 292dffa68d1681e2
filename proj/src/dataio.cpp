#include "fcggnn/dataio.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fcggnn/parallel.hpp"

namespace fs = std::filesystem;

namespace fcggnn {

Split split_from_string(const std::string& token) {
  if (token == "train") return Split::kTrain;
  if (token == "val") return Split::kVal;
  if (token == "test") return Split::kTest;
  throw std::runtime_error("unknown split token: '" + token +
                           "' (expected train, val, or test)");
}

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

namespace {

void assign_class_ids(CorpusManifest& manifest) {
  std::vector<std::string> names;
  for (const auto& e : manifest.entries) names.push_back(e.class_name);
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  manifest.class_names = names;
  for (auto& e : manifest.entries) {
    e.class_id = static_cast<int>(
        std::lower_bound(names.begin(), names.end(), e.class_name) - names.begin());
  }
}

void validate_manifest(const CorpusManifest& manifest) {
  std::vector<std::string> paths;
  bool has_train = false, has_test = false;
  for (const auto& e : manifest.entries) {
    paths.push_back(e.path);
    if (e.split == Split::kTrain) has_train = true;
    if (e.split == Split::kTest) has_test = true;
    if (!fs::exists(e.path)) {
      throw std::runtime_error("manifest: missing file: " + e.path);
    }
  }
  std::sort(paths.begin(), paths.end());
  auto dup = std::adjacent_find(paths.begin(), paths.end());
  if (dup != paths.end()) {
    throw std::runtime_error("manifest: duplicate path: " + *dup);
  }
  if (!has_train) throw std::runtime_error("manifest: empty train split");
  if (!has_test) throw std::runtime_error("manifest: empty test split");
}

}  // namespace

CorpusManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("manifest: empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "path,label,split") {
    throw std::runtime_error("manifest: expected header 'path,label,split', got '" +
                             line + "'");
  }

  CorpusManifest manifest;
  int line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw std::runtime_error("manifest: malformed row at line " +
                               std::to_string(line_number));
    }

    ManifestEntry entry;
    fs::path p(fields[0]);
    entry.path = (p.is_absolute() ? p : base / p).lexically_normal().string();
    entry.class_name = fields[1];
    entry.split = split_from_string(fields[2]);
    manifest.entries.push_back(std::move(entry));
  }

  assign_class_ids(manifest);
  validate_manifest(manifest);
  return manifest;
}

CorpusManifest scan_directory(const std::string& root) {
  if (!fs::is_directory(root)) {
    throw std::runtime_error("scan_directory: not a directory: " + root);
  }
  const fs::path base(root);
  CorpusManifest manifest;
  std::vector<std::string> offenders;

  for (const auto& item : fs::recursive_directory_iterator(base)) {
    if (!item.is_regular_file() || item.path().extension() != ".edgelist") continue;
    const fs::path rel = item.path().lexically_relative(base);
    std::vector<std::string> parts;
    for (const auto& part : rel) parts.push_back(part.string());
    if (parts.size() != 3) {
      offenders.push_back(item.path().string());
      continue;
    }
    ManifestEntry entry;
    try {
      entry.split = split_from_string(parts[0]);
    } catch (const std::exception&) {
      offenders.push_back(item.path().string());
      continue;
    }
    entry.path = item.path().string();
    entry.class_name = parts[1];
    manifest.entries.push_back(std::move(entry));
  }

  if (!offenders.empty()) {
    std::sort(offenders.begin(), offenders.end());
    std::string msg = "scan_directory: files outside <split>/<class>/<file>.edgelist layout:";
    for (const auto& p : offenders) msg += "\n  " + p;
    throw std::runtime_error(msg);
  }
  if (manifest.entries.empty()) {
    throw std::runtime_error("scan_directory: no .edgelist files under " + root);
  }

  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
  assign_class_ids(manifest);
  validate_manifest(manifest);
  return manifest;
}

std::string format_manifest(const CorpusManifest& manifest) {
  std::string out = "path,label,split\n";
  for (const auto& e : manifest.entries) {
    out += e.path + "," + e.class_name + "," + to_string(e.split) + "\n";
  }
  return out;
}

Corpus load_corpus(const CorpusManifest& manifest) {
  std::vector<LabeledGraph> loaded(manifest.entries.size());
  parallel_for(manifest.entries.size(), [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    loaded[i].graph = load_edge_list_file(e.path);
    loaded[i].label = e.class_id;
    loaded[i].path = e.path;
  });

  Corpus corpus;
  corpus.class_names = manifest.class_names;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    switch (manifest.entries[i].split) {
      case Split::kTrain: corpus.train.push_back(std::move(loaded[i])); break;
      case Split::kVal: corpus.val.push_back(std::move(loaded[i])); break;
      case Split::kTest: corpus.test.push_back(std::move(loaded[i])); break;
    }
  }
  return corpus;
}

namespace {

constexpr char kMagic[6] = {'F', 'C', 'G', 'G', 'N', 'N'};
constexpr std::uint8_t kVersion = 1;

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_i32(std::string& buf, std::int32_t v) {
  put_u32(buf, static_cast<std::uint32_t>(v));
}

void put_f32(std::string& buf, float v) { put_u32(buf, std::bit_cast<std::uint32_t>(v)); }
void put_f64(std::string& buf, double v) { put_u64(buf, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& data, std::size_t begin, std::size_t end)
      : data_(data), cur_(begin), end_(end) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[cur_ + i])) << (8 * i);
    }
    cur_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[cur_ + i])) << (8 * i);
    }
    cur_ += 8;
    return v;
  }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(data_[cur_++]);
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str(std::size_t len) {
    need(len);
    std::string s = data_.substr(cur_, len);
    cur_ += len;
    return s;
  }
  std::size_t remaining() const { return end_ - cur_; }
  std::size_t position() const { return cur_; }

 private:
  void need(std::size_t n) const {
    if (cur_ + n > end_) throw std::runtime_error("model file truncated");
  }
  const std::string& data_;
  std::size_t cur_;
  std::size_t end_;
};

}  // namespace

void save_model(const ModelParams& params, const ModelConfig& cfg,
                const StandardizationStats& stats,
                std::span<const std::string> class_names, const std::string& path) {
  std::string config_section;
  config_section.push_back(static_cast<char>(cfg.layer_kind));
  put_i32(config_section, cfg.num_layers);
  put_i32(config_section, cfg.hidden);
  put_i32(config_section, cfg.head_units);
  put_i32(config_section, cfg.num_classes);
  put_i32(config_section, cfg.input_dim);
  put_f32(config_section, cfg.gin_epsilon);
  put_u64(config_section, cfg.seed);

  std::string names_section;
  put_u32(names_section, static_cast<std::uint32_t>(class_names.size()));
  for (const auto& name : class_names) {
    put_u32(names_section, static_cast<std::uint32_t>(name.size()));
    names_section += name;
  }

  std::string stats_section;
  for (double m : stats.mean) put_f64(stats_section, m);
  for (double s : stats.stddev) put_f64(stats_section, s);
  put_f64(stats_section, stats.epsilon_guard);

  std::string params_section;
  const auto tensors = params.all();
  put_u32(params_section, static_cast<std::uint32_t>(tensors.size()));
  for (const Tensor* t : tensors) {
    put_u32(params_section, static_cast<std::uint32_t>(t->rows()));
    put_u32(params_section, static_cast<std::uint32_t>(t->cols()));
    for (float v : t->data()) put_f32(params_section, v);
  }

  std::string blob(kMagic, sizeof(kMagic));
  blob.push_back(static_cast<char>(kVersion));
  for (const std::string* section :
       {&config_section, &names_section, &stats_section, &params_section}) {
    put_u32(blob, static_cast<std::uint32_t>(section->size()));
    blob += *section;
  }

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file: " + tmp);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

ModelContainer load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string blob = buffer.str();

  if (blob.size() < sizeof(kMagic) + 1 ||
      blob.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("model file: bad magic");
  }
  const std::uint8_t version = static_cast<std::uint8_t>(blob[sizeof(kMagic)]);
  if (version != kVersion) {
    throw std::runtime_error("model file: unsupported version " + std::to_string(version));
  }

  Reader header(blob, sizeof(kMagic) + 1, blob.size());
  std::vector<Reader> sections;
  for (int s = 0; s < 4; ++s) {
    const std::uint32_t len = header.u32();
    if (header.remaining() < len) throw std::runtime_error("model file truncated");
    const std::size_t begin = header.position();
    sections.emplace_back(blob, begin, begin + len);
    header.str(len);  // advance
  }

  ModelContainer container;
  Reader& config = sections[0];
  const std::uint8_t kind = config.u8();
  if (kind > 2) throw std::runtime_error("model file: unknown layer kind");
  container.config.layer_kind = static_cast<LayerKind>(kind);
  container.config.num_layers = config.i32();
  container.config.hidden = config.i32();
  container.config.head_units = config.i32();
  container.config.num_classes = config.i32();
  container.config.input_dim = config.i32();
  container.config.gin_epsilon = config.f32();
  container.config.seed = config.u64();
  container.config.validate();

  Reader& names = sections[1];
  const std::uint32_t name_count = names.u32();
  for (std::uint32_t i = 0; i < name_count; ++i) {
    const std::uint32_t len = names.u32();
    container.class_names.push_back(names.str(len));
  }
  if (static_cast<int>(container.class_names.size()) != container.config.num_classes) {
    throw std::runtime_error("model file: class name count does not match config");
  }

  Reader& stats = sections[2];
  for (double& m : container.stats.mean) m = stats.f64();
  for (double& s : container.stats.stddev) s = stats.f64();
  container.stats.epsilon_guard = stats.f64();

  // Rebuild the parameter structure from the config, then overwrite values.
  container.params = init_params(container.config);
  auto tensors = container.params.all();
  Reader& params = sections[3];
  const std::uint32_t tensor_count = params.u32();
  if (tensor_count != tensors.size()) {
    throw std::runtime_error("model file: parameter count does not match config");
  }
  for (Tensor* t : tensors) {
    const std::uint32_t rows = params.u32();
    const std::uint32_t cols = params.u32();
    if (rows != static_cast<std::uint32_t>(t->rows()) ||
        cols != static_cast<std::uint32_t>(t->cols())) {
      throw std::runtime_error("model file: parameter dimension mismatch");
    }
    for (float& v : t->mutable_data()) v = params.f32();
  }
  return container;
}

void export_embeddings(const ModelContainer& model, const Corpus& corpus,
                       const std::string& out_path) {
  struct Row {
    const LabeledGraph* graph;
    Split split;
  };
  std::vector<Row> rows;
  for (const auto& g : corpus.train) rows.push_back({&g, Split::kTrain});
  for (const auto& g : corpus.val) rows.push_back({&g, Split::kVal});
  for (const auto& g : corpus.test) rows.push_back({&g, Split::kTest});

  std::vector<std::vector<float>> embeddings(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const DirectedGraph& graph = rows[i].graph->graph;
    const NodeFeatureMatrix standardized =
        apply_standardizer(build_feature_matrix(graph), model.stats);
    std::vector<float> values(standardized.values().begin(), standardized.values().end());
    const Tensor features = Tensor::from_rows(graph.node_count(),
                                              NodeFeatureMatrix::kColumns, values);
    const DirectedGraph* graphs[] = {&graph};
    const int labels[] = {rows[i].graph->label};
    GraphBatch batch = batch_graphs(graphs, labels);
    Tape tape;
    ForwardResult result = model_forward(tape, batch, features, model.params, model.config);
    const auto data = result.graph_embeddings.data();
    embeddings[i].assign(data.begin(), data.end());
  });

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot write embeddings: " + out_path);
  out << "graph\tlabel\tsplit";
  for (int c = 0; c < model.config.hidden; ++c) out << "\te" << c;
  out << '\n';
  char value[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out << rows[i].graph->path << '\t'
        << model.class_names[static_cast<std::size_t>(rows[i].graph->label)] << '\t'
        << to_string(rows[i].split);
    for (float v : embeddings[i]) {
      std::snprintf(value, sizeof(value), "%.9g", static_cast<double>(v));
      out << '\t' << value;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("embedding export failed: " + out_path);
}

}  // namespace fcggnn

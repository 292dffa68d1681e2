#include "fcggnn/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace fcggnn {

MetricsReport compute_metrics(std::span<const int> true_labels,
                              std::span<const int> predicted_labels, int num_classes) {
  if (true_labels.size() != predicted_labels.size()) {
    throw std::runtime_error("compute_metrics: label vector length mismatch");
  }
  if (true_labels.empty()) throw std::runtime_error("compute_metrics: empty input");
  if (num_classes < 1) throw std::runtime_error("compute_metrics: invalid class count");

  MetricsReport report;
  report.num_classes = num_classes;
  report.sample_count = static_cast<std::int64_t>(true_labels.size());
  report.confusion.assign(
      static_cast<std::size_t>(num_classes) * static_cast<std::size_t>(num_classes), 0);

  for (std::size_t i = 0; i < true_labels.size(); ++i) {
    const int t = true_labels[i];
    const int p = predicted_labels[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      throw std::runtime_error("compute_metrics: label out of range");
    }
    ++report.confusion[static_cast<std::size_t>(t) * num_classes +
                       static_cast<std::size_t>(p)];
  }

  std::int64_t correct = 0;
  for (int c = 0; c < num_classes; ++c) correct += report.confusion_at(c, c);
  report.accuracy = static_cast<double>(correct) / static_cast<double>(report.sample_count);

  report.per_class.resize(static_cast<std::size_t>(num_classes));
  for (int c = 0; c < num_classes; ++c) {
    std::int64_t tp = report.confusion_at(c, c);
    std::int64_t fn = 0, fp = 0;
    for (int other = 0; other < num_classes; ++other) {
      if (other == c) continue;
      fn += report.confusion_at(c, other);
      fp += report.confusion_at(other, c);
    }
    ClassMetrics& m = report.per_class[static_cast<std::size_t>(c)];
    m.support = tp + fn;
    m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    m.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
  }

  for (const ClassMetrics& m : report.per_class) {
    const double w = static_cast<double>(m.support) / static_cast<double>(report.sample_count);
    report.weighted_precision += w * m.precision;
    report.weighted_recall += w * m.recall;
    report.weighted_f1 += w * m.f1;
    report.macro_precision += m.precision / num_classes;
    report.macro_recall += m.recall / num_classes;
    report.macro_f1 += m.f1 / num_classes;
  }
  return report;
}

std::string format_metrics_table(const MetricsReport& report,
                                 std::span<const std::string> class_names) {
  std::ostringstream out;
  char line[256];
  out << "class                precision   recall       f1  support\n";
  for (int c = 0; c < report.num_classes; ++c) {
    const ClassMetrics& m = report.per_class[static_cast<std::size_t>(c)];
    const std::string name = c < static_cast<int>(class_names.size())
                                 ? class_names[static_cast<std::size_t>(c)]
                                 : std::to_string(c);
    std::snprintf(line, sizeof(line), "%-20s    %6.4f   %6.4f   %6.4f  %7lld\n",
                  name.c_str(), m.precision, m.recall, m.f1,
                  static_cast<long long>(m.support));
    out << line;
  }
  std::snprintf(line, sizeof(line), "%-20s    %6.4f   %6.4f   %6.4f  %7lld\n",
                "weighted avg", report.weighted_precision, report.weighted_recall,
                report.weighted_f1, static_cast<long long>(report.sample_count));
  out << line;
  std::snprintf(line, sizeof(line), "%-20s    %6.4f   %6.4f   %6.4f  %7lld\n",
                "macro avg", report.macro_precision, report.macro_recall,
                report.macro_f1, static_cast<long long>(report.sample_count));
  out << line;
  std::snprintf(line, sizeof(line), "accuracy %.4f on %lld graphs\n", report.accuracy,
                static_cast<long long>(report.sample_count));
  out << line;
  return out.str();
}

std::string format_metrics_machine(const MetricsReport& report) {
  std::ostringstream out;
  char line[128];
  out << "---\n";
  auto emit = [&](const char* key, double value) {
    std::snprintf(line, sizeof(line), "%s\t%.9g\n", key, value);
    out << line;
  };
  emit("accuracy", report.accuracy);
  emit("weighted_precision", report.weighted_precision);
  emit("weighted_recall", report.weighted_recall);
  emit("weighted_f1", report.weighted_f1);
  emit("macro_precision", report.macro_precision);
  emit("macro_recall", report.macro_recall);
  emit("macro_f1", report.macro_f1);
  out << "samples\t" << report.sample_count << "\n";
  return out.str();
}

}  // namespace fcggnn

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace fcggnn {

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;  // true-class sample count
};

struct MetricsReport {
  int num_classes = 0;
  std::int64_t sample_count = 0;
  std::vector<std::int64_t> confusion;  // C x C row-major, rows = true class
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;

  std::int64_t confusion_at(int true_class, int predicted_class) const {
    return confusion[static_cast<std::size_t>(true_class) * num_classes +
                     static_cast<std::size_t>(predicted_class)];
  }
};

/// One-vs-rest precision/recall/F1 per class from the confusion matrix, with
/// support-weighted and macro averages. Zero denominators yield 0, never NaN.
MetricsReport compute_metrics(std::span<const int> true_labels,
                              std::span<const int> predicted_labels, int num_classes);

/// Human-readable table; class_names may be empty (numeric ids are used).
std::string format_metrics_table(const MetricsReport& report,
                                 std::span<const std::string> class_names);

/// Machine block: "---" separator then key<TAB>value lines.
std::string format_metrics_machine(const MetricsReport& report);

}  // namespace fcggnn

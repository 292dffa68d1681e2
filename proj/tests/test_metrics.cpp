#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "fcggnn/metrics.hpp"

using namespace fcggnn;

TEST_CASE("perfect predictions score 1.0 everywhere") {
  const std::vector<int> labels = {0, 1, 2, 1, 0, 2, 2};
  const MetricsReport report = compute_metrics(labels, labels, 3);
  CHECK(report.accuracy == 1.0);
  for (const auto& m : report.per_class) {
    CHECK(m.precision == 1.0);
    CHECK(m.recall == 1.0);
    CHECK(m.f1 == 1.0);
  }
  CHECK(report.weighted_f1 == 1.0);
  CHECK(report.macro_f1 == 1.0);
}

TEST_CASE("two-class worked example: precision 0.5, recall 1.0, F1 0.6667") {
  // Class 0 one-vs-rest: TP=1, FP=1, FN=0, TN=0.
  const std::vector<int> truth = {0, 1};
  const std::vector<int> predicted = {0, 0};
  const MetricsReport report = compute_metrics(truth, predicted, 2);
  CHECK(report.per_class[0].precision == doctest::Approx(0.5));
  CHECK(report.per_class[0].recall == doctest::Approx(1.0));
  CHECK(report.per_class[0].f1 == doctest::Approx(0.6667).epsilon(1e-4));
}

TEST_CASE("three-class hand-computed confusion matrix") {
  const std::vector<int> truth = {0, 0, 1, 1, 1, 2, 2, 2, 2, 2};
  const std::vector<int> predicted = {0, 1, 1, 1, 0, 2, 2, 2, 0, 1};
  const MetricsReport report = compute_metrics(truth, predicted, 3);

  CHECK(report.confusion_at(0, 0) == 1);
  CHECK(report.confusion_at(0, 1) == 1);
  CHECK(report.confusion_at(1, 1) == 2);
  CHECK(report.confusion_at(1, 0) == 1);
  CHECK(report.confusion_at(2, 2) == 3);
  CHECK(report.confusion_at(2, 0) == 1);
  CHECK(report.confusion_at(2, 1) == 1);

  CHECK(report.accuracy == doctest::Approx(0.6));
  CHECK(report.per_class[0].f1 == doctest::Approx(0.4));
  CHECK(report.per_class[1].f1 == doctest::Approx(4.0 / 7.0));
  CHECK(report.per_class[2].f1 == doctest::Approx(0.75));
  CHECK(report.per_class[0].support == 2);
  CHECK(report.per_class[1].support == 3);
  CHECK(report.per_class[2].support == 5);

  CHECK(report.weighted_precision == doctest::Approx(0.71666667).epsilon(1e-7));
  CHECK(report.weighted_recall == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(report.weighted_f1 == doctest::Approx(0.62642857).epsilon(1e-7));
  CHECK(report.macro_f1 == doctest::Approx(0.57380952).epsilon(1e-7));
}

TEST_CASE("zero denominators yield 0, never NaN") {
  // Class 2 never appears as truth or prediction.
  const std::vector<int> truth = {0, 1, 0};
  const std::vector<int> predicted = {0, 0, 0};
  const MetricsReport report = compute_metrics(truth, predicted, 3);
  CHECK(report.per_class[2].precision == 0.0);
  CHECK(report.per_class[2].recall == 0.0);
  CHECK(report.per_class[2].f1 == 0.0);
  // Class 1 is never predicted: precision denominator is zero.
  CHECK(report.per_class[1].precision == 0.0);
  CHECK(report.per_class[1].f1 == 0.0);
}

TEST_CASE("micro recall over all classes equals accuracy") {
  std::mt19937 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 30);
    const int c = 2 + static_cast<int>(rng() % 4);
    std::vector<int> truth, predicted;
    for (int i = 0; i < n; ++i) {
      truth.push_back(static_cast<int>(rng() % static_cast<unsigned>(c)));
      predicted.push_back(static_cast<int>(rng() % static_cast<unsigned>(c)));
    }
    const MetricsReport report = compute_metrics(truth, predicted, c);
    std::int64_t tp_total = 0, support_total = 0;
    for (const auto& m : report.per_class) support_total += m.support;
    for (int k = 0; k < c; ++k) tp_total += report.confusion_at(k, k);
    CHECK(report.accuracy ==
          doctest::Approx(static_cast<double>(tp_total) /
                          static_cast<double>(support_total)));
  }
}

TEST_CASE("jointly permuting samples leaves the report unchanged") {
  std::mt19937 rng(67);
  std::vector<int> truth = {0, 1, 2, 0, 1, 2, 2, 0};
  std::vector<int> predicted = {0, 2, 2, 1, 1, 0, 2, 0};
  const MetricsReport base = compute_metrics(truth, predicted, 3);

  std::vector<std::size_t> order(truth.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> truth2, predicted2;
  for (std::size_t i : order) {
    truth2.push_back(truth[i]);
    predicted2.push_back(predicted[i]);
  }
  const MetricsReport shuffled = compute_metrics(truth2, predicted2, 3);
  CHECK(base.confusion == shuffled.confusion);
  CHECK(base.weighted_f1 == shuffled.weighted_f1);
}

TEST_CASE("relabeling classes permutes rows and keeps aggregates") {
  const std::vector<int> truth = {0, 0, 1, 1, 1, 2, 2, 2, 2, 2};
  const std::vector<int> predicted = {0, 1, 1, 1, 0, 2, 2, 2, 0, 1};
  const MetricsReport base = compute_metrics(truth, predicted, 3);

  const int relabel[] = {2, 0, 1};  // class c -> relabel[c]
  std::vector<int> truth2, predicted2;
  for (int t : truth) truth2.push_back(relabel[t]);
  for (int p : predicted) predicted2.push_back(relabel[p]);
  const MetricsReport mapped = compute_metrics(truth2, predicted2, 3);

  CHECK(mapped.accuracy == doctest::Approx(base.accuracy));
  CHECK(mapped.weighted_f1 == doctest::Approx(base.weighted_f1));
  CHECK(mapped.weighted_precision == doctest::Approx(base.weighted_precision));
  CHECK(mapped.macro_f1 == doctest::Approx(base.macro_f1));
  for (int c = 0; c < 3; ++c) {
    CHECK(mapped.per_class[static_cast<std::size_t>(relabel[c])].f1 ==
          doctest::Approx(base.per_class[static_cast<std::size_t>(c)].f1));
    CHECK(mapped.per_class[static_cast<std::size_t>(relabel[c])].support ==
          base.per_class[static_cast<std::size_t>(c)].support);
  }
}

TEST_CASE("input validation") {
  const std::vector<int> a = {0, 1};
  const std::vector<int> b = {0};
  CHECK_THROWS_AS(compute_metrics(a, b, 2), std::runtime_error);
  CHECK_THROWS_AS(compute_metrics({}, {}, 2), std::runtime_error);
  const std::vector<int> bad = {0, 5};
  CHECK_THROWS_AS(compute_metrics(a, bad, 2), std::runtime_error);
}

TEST_CASE("machine block carries the contract keys") {
  const std::vector<int> labels = {0, 1, 0, 1};
  const MetricsReport report = compute_metrics(labels, labels, 2);
  const std::string block = format_metrics_machine(report);
  CHECK(block.find("---\n") == 0);
  for (const char* key : {"accuracy\t", "weighted_precision\t", "weighted_recall\t",
                          "weighted_f1\t", "macro_precision\t", "macro_f1\t"}) {
    CHECK(block.find(key) != std::string::npos);
  }
  const std::string table = format_metrics_table(report, {});
  CHECK(table.find("accuracy") != std::string::npos);
}

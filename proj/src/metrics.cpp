#include "fusekit/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "fusekit/kernels.hpp"

namespace fusekit {
namespace {

double ratio(std::int64_t num, std::int64_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double precision, double recall) {
  const double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, int c) {
  const std::int64_t tp = cm.counts[c][c];
  const std::int64_t predicted = cm.counts[0][c] + cm.counts[1][c];
  const std::int64_t support = cm.row_sum(c);
  ClassMetrics m;
  m.precision = ratio(tp, predicted);
  m.recall = ratio(tp, support);
  m.f1 = harmonic(m.precision, m.recall);
  m.support = support;
  return m;
}

// Decisions as 0/1 bytes in label order; throws on coverage mismatch.
std::vector<std::uint8_t> aligned_decisions(const LabelSet& labels, const DecisionSet& decisions) {
  const auto truth = labels.entries();
  const auto pred = decisions.entries();
  if (truth.size() != pred.size()) {
    throw Error(ErrorKind::alignment, "decisions of " + decisions.model_id() + " cover " +
                                          std::to_string(pred.size()) + " samples, labels cover " +
                                          std::to_string(truth.size()));
  }
  std::vector<std::uint8_t> out(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (!(pred[i].id == truth[i].id)) {
      throw Error(ErrorKind::alignment, "decisions of " + decisions.model_id() +
                                            " do not cover the labeled samples (first mismatch at " +
                                            truth[i].id.str() + ")");
    }
    out[i] = static_cast<std::uint8_t>(pred[i].label.value());
  }
  return out;
}

std::vector<std::uint8_t> truth_bytes(const LabelSet& labels) {
  std::vector<std::uint8_t> out;
  out.reserve(labels.size());
  for (const auto& e : labels.entries()) out.push_back(static_cast<std::uint8_t>(e.label.value()));
  return out;
}

}  // namespace

void check_threshold(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::domain, "threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
}

ClassLabel decide(double score, double threshold) {
  check_threshold(threshold);
  if (!(score >= 0.0 && score <= 1.0)) {
    throw Error(ErrorKind::domain, "score must lie in [0, 1], got " + std::to_string(score));
  }
  return score < threshold ? ClassLabel::benign() : ClassLabel::malignant();
}

DecisionSet decide_all(const PredictionSet& predictions, double threshold) {
  check_threshold(threshold);
  std::vector<LabelEntry> entries;
  entries.reserve(predictions.size());
  for (const auto& e : predictions.entries()) entries.push_back(LabelEntry{e.id, decide(e.score, threshold)});
  return DecisionSet::from_entries(predictions.model_id(), std::move(entries));
}

ConfusionMatrix confusion(const LabelSet& labels, const DecisionSet& decisions) {
  const auto pred = aligned_decisions(labels, decisions);
  const auto truth = truth_bytes(labels);
  return ConfusionMatrix{kernels::count_confusion(truth, pred)};
}

ClassificationReport report(const ConfusionMatrix& cm) {
  for (const auto& row : cm.counts) {
    for (auto v : row) {
      if (v < 0) throw Error(ErrorKind::domain, "confusion matrix has a negative cell");
    }
  }
  const std::int64_t total = cm.total();
  if (total < 1) throw Error(ErrorKind::domain, "confusion matrix is empty");

  ClassificationReport r;
  r.class0 = class_metrics(cm, 0);
  r.class1 = class_metrics(cm, 1);

  r.macro_avg.precision = (r.class0.precision + r.class1.precision) / 2.0;
  r.macro_avg.recall = (r.class0.recall + r.class1.recall) / 2.0;
  r.macro_avg.f1 = (r.class0.f1 + r.class1.f1) / 2.0;
  r.macro_avg.support = total;

  const double s0 = static_cast<double>(r.class0.support);
  const double s1 = static_cast<double>(r.class1.support);
  const double n = static_cast<double>(total);
  r.weighted_avg.precision = (s0 * r.class0.precision + s1 * r.class1.precision) / n;
  r.weighted_avg.recall = (s0 * r.class0.recall + s1 * r.class1.recall) / n;
  r.weighted_avg.f1 = (s0 * r.class0.f1 + s1 * r.class1.f1) / n;
  r.weighted_avg.support = total;

  r.accuracy = ratio(cm.counts[0][0] + cm.counts[1][1], total);
  return r;
}

double accuracy(const LabelSet& labels, const DecisionSet& decisions) {
  const auto pred = aligned_decisions(labels, decisions);
  std::int64_t correct = 0;
  const auto truth = labels.entries();
  for (std::size_t i = 0; i < pred.size(); ++i) correct += truth[i].label.value() == pred[i];
  return ratio(correct, static_cast<std::int64_t>(pred.size()));
}

}  // namespace fusekit

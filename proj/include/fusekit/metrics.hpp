#pragma once

#include <array>
#include <cstdint>

#include "fusekit/prediction_model.hpp"

namespace fusekit {

inline constexpr double kDefaultThreshold = 0.5;

/// 0 if score < threshold, else 1. A score exactly at the threshold is
/// class 1. Requires 0 <= score <= 1 and 0 < threshold < 1.
ClassLabel decide(double score, double threshold = kDefaultThreshold);

/// Throws Error(domain) unless 0 < threshold < 1.
void check_threshold(double threshold);

/// Thresholds every score of `predictions`.
DecisionSet decide_all(const PredictionSet& predictions, double threshold = kDefaultThreshold);

/// counts[t][p]: samples of true class t predicted as p.
struct ConfusionMatrix {
  std::array<std::array<std::int64_t, 2>, 2> counts{};

  std::int64_t at(int truth, int predicted) const { return counts.at(truth).at(predicted); }
  std::int64_t total() const noexcept { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
  std::int64_t row_sum(int truth) const { return counts.at(truth)[0] + counts.at(truth)[1]; }
  /// Benign predicted malignant.
  std::int64_t false_positives() const noexcept { return counts[0][1]; }
  /// Malignant predicted benign.
  std::int64_t false_negatives() const noexcept { return counts[1][0]; }

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

/// Per-class rows, macro and support-weighted averages, and accuracy.
/// Averaged rows carry the total sample count as support.
struct ClassificationReport {
  ClassMetrics class0;
  ClassMetrics class1;
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  double accuracy = 0.0;

  const ClassMetrics& for_class(ClassLabel c) const noexcept { return c.value() == 0 ? class0 : class1; }

  friend bool operator==(const ClassificationReport&, const ClassificationReport&) = default;
};

/// `decisions` must cover exactly the labeled samples (Error(alignment)).
ConfusionMatrix confusion(const LabelSet& labels, const DecisionSet& decisions);

/// Zero-denominator precision or recall is defined as 0, as is F1 when
/// precision + recall == 0. Throws Error(domain) for an empty matrix.
ClassificationReport report(const ConfusionMatrix& cm);

/// Fraction of samples whose decision matches the label.
double accuracy(const LabelSet& labels, const DecisionSet& decisions);

}  // namespace fusekit

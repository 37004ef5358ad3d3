#pragma once

// Text, JSON and CSV renderings of classification reports. All three are
// produced from the same in-memory ClassificationReport.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fusekit/metrics.hpp"

namespace fusekit {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Fixed-point text with round-half-to-even on `value · 10^decimals`.
std::string format_fixed(double value, int decimals);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::optional<std::string> strategy;
  double threshold = kDefaultThreshold;
  std::optional<std::vector<double>> weights;
  std::string weight_source;  // "explicit", "accuracy:<files>", or empty
  std::string tool_version = std::string(kToolVersion);
  std::string provenance;

  nlohmann::json to_json() const;
  /// `key: value` lines, without the comment marker.
  std::vector<std::string> to_lines() const;
};

/// Layout:
///
///                   precision    recall  f1-score   support
///
///              0         0.96      0.96      0.96       372
///              1         0.98      0.98      0.98       815
///
///      macro avg         0.97      0.97      0.97      1187
///   weighted avg         0.97      0.97      0.97      1187
///
///       accuracy                             0.97      1187
std::string render_report_text(const ClassificationReport& report, int decimals = 2);

nlohmann::json report_to_json(const ClassificationReport& report);
nlohmann::json confusion_to_json(const ConfusionMatrix& cm);

/// "true\pred,0,1" header then one row per true class.
std::string render_confusion_csv(const ConfusionMatrix& cm);

/// Confusion matrix as an aligned text block.
std::string render_confusion_text(const ConfusionMatrix& cm);

struct ComparisonRow {
  std::string model_id;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  std::int64_t false_positives = 0;
  std::int64_t false_negatives = 0;
};

/// Accuracy descending, ties by model id ascending.
void sort_comparison(std::vector<ComparisonRow>& rows);

std::string render_comparison_text(const std::vector<ComparisonRow>& rows, int decimals = 2);
std::string render_comparison_csv(const std::vector<ComparisonRow>& rows);
nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows);

}  // namespace fusekit

#pragma once

// Deterministic synthetic predictions with exact per-class error counts,
// and a compiled-in reconstruction of the published BreakHis results.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusekit/prediction_model.hpp"

namespace fusekit {

/// Written into every simulated file. Changing how scores are drawn is a
/// format break and must bump this.
inline constexpr std::string_view kGeneratorId = "fusekit-sim/mt19937_64/v1";

struct ModelSimSpec {
  std::string model_id;
  double recall0 = 1.0;
  double recall1 = 1.0;
  /// > 0. Larger values push scores away from 0.5.
  double confidence_sharpness = 4.0;
};

struct SimSpec {
  std::int64_t n_class0 = 0;
  std::int64_t n_class1 = 0;
  std::vector<ModelSimSpec> models;
  /// Fraction of the largest per-class error count that every model
  /// shares on a common pool of hard samples.
  double error_overlap = 0.0;
  std::uint64_t seed = 0;

  /// Throws Error(simulation) on out-of-range fields.
  void validate() const;
};

struct FixtureBundle {
  LabelSet labels;
  std::vector<PredictionSet> models;
  std::string provenance;
};

/// For class t, model m gets exactly round(recall_t · n_t) correct
/// decisions. Errors go first to a shared pool of
/// round(error_overlap · max_m e_mt) samples, then to disjoint samples.
/// Correct decisions get scores on the right side of 0.5, errors on the
/// wrong side. Bit-for-bit reproducible from `spec`.
///
/// Throws Error(simulation) when the shared pool exceeds some model's
/// error count.
FixtureBundle simulate(const SimSpec& spec);

/// Expected per-class error counts of a simulated model.
struct ErrorCounts {
  std::int64_t class0 = 0;  // false positives
  std::int64_t class1 = 0;  // false negatives

  friend bool operator==(const ErrorCounts&, const ErrorCounts&) = default;
};
ErrorCounts expected_errors(const SimSpec& spec, std::size_t model);

// Published reference results (BreakHis test split, 372 benign / 815
// malignant). Cells are the rounded two-decimal values as published.

struct PublishedRow {
  double precision;
  double recall;
  double f1;
  std::int64_t support;
};

struct PublishedTable {
  std::string_view model_id;
  PublishedRow class0;
  PublishedRow class1;
  PublishedRow macro_avg;
  PublishedRow weighted_avg;
  /// Accuracy stated in the text (fraction).
  double accuracy;
};

inline constexpr std::int64_t kReferenceSupport0 = 372;
inline constexpr std::int64_t kReferenceSupport1 = 815;

/// resnet50, inceptionv3, densenet201 (the order of published_weights()).
std::span<const PublishedTable> published_tables();
const PublishedTable& published_ensemble_table();
/// Accuracy weights used for the published ensemble, in model order.
std::span<const double> published_weights();

struct CountFit {
  ErrorCounts errors;
  /// Largest |cell - published| over class precision/recall cells.
  double max_deviation = 0.0;
};

/// Exhaustive search over all integer (FP, FN) pairs minimizing the max
/// deviation of the four class precision/recall cells from `table`; ties
/// go to the pair whose accuracy is closest to `table.accuracy`, then to
/// the smaller (FP, FN). `max_errors` bounds the search (inclusive).
CountFit fit_error_counts(const PublishedTable& table, std::int64_t n0, std::int64_t n1,
                          std::optional<ErrorCounts> max_errors = std::nullopt);

/// 1187 samples, three models whose confusion counts are fitted to the
/// published per-model tables, with errors laid out so the accuracy-
/// weighted ensemble lands on the published ensemble table.
FixtureBundle reference_fixture();

}  // namespace fusekit

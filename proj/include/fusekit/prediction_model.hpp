#pragma once

// Labels, per-model probability outputs, and their alignment into a
// dense sample-major panel.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusekit/error.hpp"

namespace fusekit {

/// Opaque sample identifier. Non-empty, no commas, no whitespace.
class SampleId {
 public:
  explicit SampleId(std::string id);

  const std::string& str() const noexcept { return id_; }

  friend auto operator<=>(const SampleId&, const SampleId&) = default;

 private:
  std::string id_;
};

/// Binary class label: 0 = benign, 1 = malignant.
class ClassLabel {
 public:
  static constexpr ClassLabel benign() noexcept { return ClassLabel{0}; }
  static constexpr ClassLabel malignant() noexcept { return ClassLabel{1}; }

  /// Throws Error(domain) unless `value` is 0 or 1.
  static ClassLabel from_int(int value);

  constexpr int value() const noexcept { return value_; }
  constexpr ClassLabel flipped() const noexcept { return ClassLabel(static_cast<std::uint8_t>(1 - value_)); }

  friend constexpr bool operator==(ClassLabel, ClassLabel) = default;

 private:
  constexpr explicit ClassLabel(std::uint8_t v) noexcept : value_(v) {}
  std::uint8_t value_;
};

struct LabelEntry {
  SampleId id;
  ClassLabel label;

  friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

struct ScoreEntry {
  SampleId id;
  double score;

  friend bool operator==(const ScoreEntry&, const ScoreEntry&) = default;
};

/// Ground truth for every sample. Entries are kept sorted by id, so two
/// sets built from permuted rows compare equal.
class LabelSet {
 public:
  /// Throws Error(ingest) on duplicate ids or an empty entry list.
  static LabelSet from_entries(std::vector<LabelEntry> entries);

  std::span<const LabelEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::int64_t support0() const noexcept { return support0_; }
  std::int64_t support1() const noexcept { return support1_; }
  std::int64_t support(ClassLabel c) const noexcept { return c.value() == 0 ? support0_ : support1_; }
  std::optional<ClassLabel> find(const SampleId& id) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<LabelEntry> entries_;
  std::int64_t support0_ = 0;
  std::int64_t support1_ = 0;
};

/// One model's probability of class 1 per sample, sorted by id.
class PredictionSet {
 public:
  /// Throws Error(ingest) on an empty model id, duplicate ids, or a
  /// score outside [0, 1].
  static PredictionSet from_entries(std::string model_id, std::vector<ScoreEntry> entries);

  const std::string& model_id() const noexcept { return model_id_; }
  std::span<const ScoreEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::optional<double> find(const SampleId& id) const;

  friend bool operator==(const PredictionSet&, const PredictionSet&) = default;

 private:
  std::string model_id_;
  std::vector<ScoreEntry> entries_;
};

/// Hard decisions per sample, sorted by id. Shares the label-file format.
class DecisionSet {
 public:
  static DecisionSet from_entries(std::string model_id, std::vector<LabelEntry> entries);

  const std::string& model_id() const noexcept { return model_id_; }
  std::span<const LabelEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  friend bool operator==(const DecisionSet&, const DecisionSet&) = default;

 private:
  std::string model_id_;
  std::vector<LabelEntry> entries_;
};

/// A label set plus M >= 1 prediction sets covering exactly the same
/// samples. Scores are also stored sample-major (row i = the M scores of
/// sample i, models in ingestion order) for the fusion kernels.
class AlignedPanel {
 public:
  const LabelSet& labels() const noexcept { return labels_; }
  std::span<const PredictionSet> models() const noexcept { return models_; }
  std::size_t model_count() const noexcept { return models_.size(); }
  std::size_t sample_count() const noexcept { return labels_.size(); }

  std::span<const double> score_matrix() const noexcept { return matrix_; }
  std::span<const double> sample_scores(std::size_t sample) const noexcept {
    return std::span<const double>(matrix_).subspan(sample * models_.size(), models_.size());
  }
  /// Ground truth as 0/1 bytes in sample order.
  std::span<const std::uint8_t> truth() const noexcept { return truth_; }
  /// Scores of one model in sample order.
  std::vector<double> model_scores(std::size_t model) const;

 private:
  friend AlignedPanel align(LabelSet labels, std::vector<PredictionSet> models);

  LabelSet labels_;
  std::vector<PredictionSet> models_;
  std::vector<double> matrix_;
  std::vector<std::uint8_t> truth_;
};

/// Strict alignment: every model must cover exactly the labeled samples.
/// Throws Error(alignment) listing up to 10 missing ids, on any unlabeled
/// id, on duplicate model ids, or when `models` is empty.
AlignedPanel align(LabelSet labels, std::vector<PredictionSet> models);

// File formats. Lines starting with '#' are comments; a `# model: <id>`
// comment names the model in a prediction file. LF or CRLF, optional BOM.
//
//   label file:       sample_id,label     (label in {0,1})
//   prediction file:  sample_id,score     (score in [0,1])

/// `source` is used only to prefix error messages.
LabelSet load_labels(std::string_view content, std::string_view source = "<labels>");

/// `model_id` overrides any `# model:` line. Throws Error(ingest) if
/// neither is present.
PredictionSet load_predictions(std::string_view content,
                               std::optional<std::string> model_id = std::nullopt,
                               std::string_view source = "<predictions>");

/// The id named by a `# model:` comment line, if any.
std::optional<std::string> declared_model_id(std::string_view content);

/// Rows are written in id order. Each entry of `comments` becomes a
/// leading `# ` line.
std::string serialize_labels(const LabelSet& labels, std::span<const std::string> comments = {});
std::string serialize_predictions(const PredictionSet& predictions, std::span<const std::string> comments = {});
std::string serialize_decisions(const DecisionSet& decisions, std::span<const std::string> comments = {});

/// Shortest decimal text that parses back to exactly `value`.
std::string format_score(double value);

}  // namespace fusekit

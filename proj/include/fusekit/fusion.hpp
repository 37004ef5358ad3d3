#pragma once

// Accuracy-weighted average ensemble of independently trained binary
// classifiers, plus the unweighted-average and majority-vote baselines.
//
// The weighted ensemble fuses per-sample scores as
//
//     f = Σ s_i·w_i / Σ w_i
//
// where s_i is model i's probability of class 1 and w_i its weight
// (normally its measured accuracy). Weights are never normalized up front;
// the denominator does it.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fusekit/metrics.hpp"
#include "fusekit/prediction_model.hpp"

namespace fusekit {

/// Non-negative finite per-model weights with a strictly positive sum.
class WeightVector {
 public:
  /// Throws Error(fusion) if empty, any weight is negative or non-finite,
  /// or the sum is not strictly positive and finite.
  static WeightVector from(std::vector<double> weights);

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double sum() const noexcept;

  friend bool operator==(const WeightVector&, const WeightVector&) = default;

 private:
  std::vector<double> weights_;
};

enum class Strategy { weighted_average, plain_average, majority_vote };

std::string_view to_string(Strategy strategy) noexcept;
/// Throws Error(usage) on an unknown name.
Strategy parse_strategy(std::string_view name);

struct FusionConfig {
  Strategy strategy = Strategy::weighted_average;
  double threshold = kDefaultThreshold;
  std::optional<WeightVector> weights;

  /// Throws Error(fusion) if weighted_average lacks weights or their
  /// count differs from `model_count`; Error(domain) for a bad threshold.
  void validate(std::size_t model_count) const;
};

enum class Execution { parallel, serial };

/// w_i = accuracy of model i's thresholded decisions on the panel.
/// Throws Error(fusion) "degenerate weights" when every accuracy is 0.
WeightVector weights_from_accuracy(const AlignedPanel& panel, double threshold = kDefaultThreshold);

/// Weighted average of one sample's scores. The result always lies in
/// [min(scores), max(scores)].
double fuse_weighted(std::span<const double> scores, const WeightVector& weights);

/// Arithmetic mean; bitwise equal to fuse_weighted with all-ones weights.
double fuse_plain(std::span<const double> scores);

/// Majority of thresholded votes. Ties (even M) fall back to
/// decide(fuse_plain(scores), threshold).
ClassLabel fuse_majority(std::span<const double> scores, double threshold = kDefaultThreshold);

/// Averaging strategies produce a PredictionSet; majority_vote produces a
/// DecisionSet. Output model id is "ensemble:<strategy>".
using FusionOutput = std::variant<PredictionSet, DecisionSet>;

FusionOutput fuse_panel(const AlignedPanel& panel, const FusionConfig& config,
                        Execution execution = Execution::parallel);

std::string ensemble_model_id(Strategy strategy);

/// Hard decisions of a fusion output (thresholds averaged scores).
DecisionSet decisions_of(const FusionOutput& output, double threshold = kDefaultThreshold);

}  // namespace fusekit

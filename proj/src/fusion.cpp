#include "fusekit/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fusekit/kernels.hpp"

namespace fusekit {
namespace {

void check_scores(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::fusion, "no scores to fuse");
  for (double s : scores) {
    if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorKind::domain, "score must lie in [0, 1], got " + std::to_string(s));
  }
}

std::vector<ScoreEntry> with_ids(const LabelSet& labels, std::span<const double> scores) {
  std::vector<ScoreEntry> out;
  out.reserve(scores.size());
  const auto entries = labels.entries();
  for (std::size_t i = 0; i < scores.size(); ++i) out.push_back(ScoreEntry{entries[i].id, scores[i]});
  return out;
}

}  // namespace

WeightVector WeightVector::from(std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorKind::fusion, "weight vector is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!std::isfinite(w) || w < 0.0) {
      throw Error(ErrorKind::fusion, "weight " + std::to_string(i + 1) + " must be finite and non-negative");
    }
    sum += w;
  }
  if (!(sum > 0.0) || !std::isfinite(sum)) throw Error(ErrorKind::fusion, "degenerate weights: sum must be > 0");
  WeightVector v;
  v.weights_ = std::move(weights);
  return v;
}

double WeightVector::sum() const noexcept { return std::accumulate(weights_.begin(), weights_.end(), 0.0); }

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::weighted_average: return "weighted_average";
    case Strategy::plain_average: return "plain_average";
    case Strategy::majority_vote: return "majority_vote";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::weighted_average, Strategy::plain_average, Strategy::majority_vote}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::usage, "unknown strategy '" + std::string(name) +
                                    "' (expected weighted_average, plain_average or majority_vote)");
}

std::string ensemble_model_id(Strategy strategy) { return "ensemble:" + std::string(to_string(strategy)); }

void FusionConfig::validate(std::size_t model_count) const {
  check_threshold(threshold);
  if (strategy != Strategy::weighted_average) return;
  if (!weights) throw Error(ErrorKind::fusion, "weighted_average requires a weight vector");
  if (weights->size() != model_count) {
    throw Error(ErrorKind::fusion, "weight count " + std::to_string(weights->size()) +
                                       " does not match model count " + std::to_string(model_count));
  }
}

WeightVector weights_from_accuracy(const AlignedPanel& panel, double threshold) {
  check_threshold(threshold);
  const std::size_t n = panel.sample_count();
  const std::size_t m = panel.model_count();
  std::vector<double> weights(m);
  std::vector<std::uint8_t> decisions(n);
  for (std::size_t k = 0; k < m; ++k) {
    kernels::threshold_column(panel.score_matrix(), m, k, threshold, decisions);
    const auto cm = kernels::count_confusion(panel.truth(), decisions);
    weights[k] = static_cast<double>(cm[0][0] + cm[1][1]) / static_cast<double>(n);
  }
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; })) {
    throw Error(ErrorKind::fusion, "degenerate weights: every model has zero accuracy");
  }
  return WeightVector::from(std::move(weights));
}

double fuse_weighted(std::span<const double> scores, const WeightVector& weights) {
  check_scores(scores);
  if (scores.size() != weights.size()) {
    throw Error(ErrorKind::fusion, "got " + std::to_string(scores.size()) + " scores for " +
                                       std::to_string(weights.size()) + " weights");
  }
  return kernels::weighted_row(scores, weights.values());
}

double fuse_plain(std::span<const double> scores) {
  check_scores(scores);
  return kernels::mean_row(scores);
}

ClassLabel fuse_majority(std::span<const double> scores, double threshold) {
  check_threshold(threshold);
  check_scores(scores);
  return ClassLabel::from_int(kernels::majority_row(scores, threshold));
}

FusionOutput fuse_panel(const AlignedPanel& panel, const FusionConfig& config, Execution execution) {
  config.validate(panel.model_count());
  const bool par = execution == Execution::parallel;
  const auto matrix = panel.score_matrix();
  const std::size_t m = panel.model_count();
  const std::size_t n = panel.sample_count();
  const auto id = ensemble_model_id(config.strategy);

  switch (config.strategy) {
    case Strategy::weighted_average:
    case Strategy::plain_average: {
      std::vector<double> fused(n);
      if (config.strategy == Strategy::weighted_average) {
        const auto w = config.weights->values();
        par ? kernels::weighted_rows(matrix, m, w, fused) : kernels::serial::weighted_rows(matrix, m, w, fused);
      } else {
        par ? kernels::mean_rows(matrix, m, fused) : kernels::serial::mean_rows(matrix, m, fused);
      }
      return PredictionSet::from_entries(id, with_ids(panel.labels(), fused));
    }
    case Strategy::majority_vote: {
      std::vector<std::uint8_t> votes(n);
      par ? kernels::majority_rows(matrix, m, config.threshold, votes)
          : kernels::serial::majority_rows(matrix, m, config.threshold, votes);
      std::vector<LabelEntry> entries;
      entries.reserve(n);
      const auto labels = panel.labels().entries();
      for (std::size_t i = 0; i < n; ++i) entries.push_back(LabelEntry{labels[i].id, ClassLabel::from_int(votes[i])});
      return DecisionSet::from_entries(id, std::move(entries));
    }
  }
  throw Error(ErrorKind::fusion, "unhandled strategy");
}

DecisionSet decisions_of(const FusionOutput& output, double threshold) {
  if (const auto* decisions = std::get_if<DecisionSet>(&output)) return *decisions;
  return decide_all(std::get<PredictionSet>(output), threshold);
}

}  // namespace fusekit

#pragma once

// Data-parallel per-sample loops behind fusion and metrics.
//
// Every kernel has an OpenMP version in `fusekit::kernels` and a plain
// loop in `fusekit::kernels::serial`. Both evaluate the same per-row
// function, so their outputs are bitwise identical; the serial versions
// are kept as the test reference and the benchmark baseline.
//
// Score matrices are sample-major: row i holds the `models` scores of
// sample i. Decisions are 0/1 bytes. Callers validate inputs; kernels do
// not throw.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace fusekit::kernels {

/// counts[t][p] = number of samples with truth t decided as p.
using ConfusionCounts = std::array<std::array<std::int64_t, 2>, 2>;

inline std::uint8_t threshold_score(double score, double threshold) noexcept {
  return score < threshold ? 0 : 1;
}

/// Σ s_i·w_i / Σ w_i, clamped to [min s, max s].
inline double weighted_row(std::span<const double> scores, std::span<const double> weights) noexcept {
  double num = 0.0;
  double den = 0.0;
  double lo = scores[0];
  double hi = scores[0];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    num += scores[i] * weights[i];
    den += weights[i];
    lo = scores[i] < lo ? scores[i] : lo;
    hi = scores[i] > hi ? scores[i] : hi;
  }
  const double f = num / den;
  return f < lo ? lo : (f > hi ? hi : f);
}

inline double mean_row(std::span<const double> scores) noexcept {
  double sum = 0.0;
  double count = 0.0;
  for (double s : scores) {
    sum += s;
    count += 1.0;
  }
  return sum / count;
}

/// Majority of thresholded votes; a tie falls back to the thresholded mean.
inline std::uint8_t majority_row(std::span<const double> scores, double threshold) noexcept {
  std::size_t ones = 0;
  for (double s : scores) ones += threshold_score(s, threshold);
  const std::size_t zeros = scores.size() - ones;
  if (ones != zeros) return ones > zeros ? 1 : 0;
  return threshold_score(mean_row(scores), threshold);
}

void weighted_rows(std::span<const double> matrix, std::size_t models,
                   std::span<const double> weights, std::span<double> out);
void mean_rows(std::span<const double> matrix, std::size_t models, std::span<double> out);
void majority_rows(std::span<const double> matrix, std::size_t models, double threshold,
                   std::span<std::uint8_t> out);
void threshold_all(std::span<const double> scores, double threshold, std::span<std::uint8_t> out);
/// Decisions of one matrix column.
void threshold_column(std::span<const double> matrix, std::size_t models, std::size_t column,
                      double threshold, std::span<std::uint8_t> out);
ConfusionCounts count_confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted);

namespace serial {

void weighted_rows(std::span<const double> matrix, std::size_t models,
                   std::span<const double> weights, std::span<double> out);
void mean_rows(std::span<const double> matrix, std::size_t models, std::span<double> out);
void majority_rows(std::span<const double> matrix, std::size_t models, double threshold,
                   std::span<std::uint8_t> out);
void threshold_all(std::span<const double> scores, double threshold, std::span<std::uint8_t> out);
void threshold_column(std::span<const double> matrix, std::size_t models, std::size_t column,
                      double threshold, std::span<std::uint8_t> out);
ConfusionCounts count_confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted);

}  // namespace serial

}  // namespace fusekit::kernels

#include "fusekit/kernels.hpp"

#include <cstdint>

namespace fusekit::kernels {

// OpenMP loop indices must be signed.
using index_t = std::int64_t;

void weighted_rows(std::span<const double> matrix, std::size_t models,
                   std::span<const double> weights, std::span<double> out) {
  const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    out[i] = weighted_row(matrix.subspan(static_cast<std::size_t>(i) * models, models), weights);
  }
}

void mean_rows(std::span<const double> matrix, std::size_t models, std::span<double> out) {
  const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    out[i] = mean_row(matrix.subspan(static_cast<std::size_t>(i) * models, models));
  }
}

void majority_rows(std::span<const double> matrix, std::size_t models, double threshold,
                   std::span<std::uint8_t> out) {
  const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    out[i] = majority_row(matrix.subspan(static_cast<std::size_t>(i) * models, models), threshold);
  }
}

void threshold_all(std::span<const double> scores, double threshold, std::span<std::uint8_t> out) {
  const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) out[i] = threshold_score(scores[i], threshold);
}

void threshold_column(std::span<const double> matrix, std::size_t models, std::size_t column,
                      double threshold, std::span<std::uint8_t> out) {
  const auto n = static_cast<index_t>(out.size());
#pragma omp parallel for schedule(static)
  for (index_t i = 0; i < n; ++i) {
    out[i] = threshold_score(matrix[static_cast<std::size_t>(i) * models + column], threshold);
  }
}

ConfusionCounts count_confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted) {
  std::int64_t c00 = 0, c01 = 0, c10 = 0, c11 = 0;
  const auto n = static_cast<index_t>(truth.size());
#pragma omp parallel for schedule(static) reduction(+ : c00, c01, c10, c11)
  for (index_t i = 0; i < n; ++i) {
    const unsigned cell = (truth[i] << 1u) | predicted[i];
    c00 += cell == 0;
    c01 += cell == 1;
    c10 += cell == 2;
    c11 += cell == 3;
  }
  return {{{c00, c01}, {c10, c11}}};
}

namespace serial {

void weighted_rows(std::span<const double> matrix, std::size_t models,
                   std::span<const double> weights, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = weighted_row(matrix.subspan(i * models, models), weights);
}

void mean_rows(std::span<const double> matrix, std::size_t models, std::span<double> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mean_row(matrix.subspan(i * models, models));
}

void majority_rows(std::span<const double> matrix, std::size_t models, double threshold,
                   std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = majority_row(matrix.subspan(i * models, models), threshold);
}

void threshold_all(std::span<const double> scores, double threshold, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = threshold_score(scores[i], threshold);
}

void threshold_column(std::span<const double> matrix, std::size_t models, std::size_t column,
                      double threshold, std::span<std::uint8_t> out) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = threshold_score(matrix[i * models + column], threshold);
}

ConfusionCounts count_confusion(std::span<const std::uint8_t> truth, std::span<const std::uint8_t> predicted) {
  ConfusionCounts counts{};
  for (std::size_t i = 0; i < truth.size(); ++i) ++counts[truth[i]][predicted[i]];
  return counts;
}

}  // namespace serial

}  // namespace fusekit::kernels

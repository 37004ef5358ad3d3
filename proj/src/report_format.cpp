#include "fusekit/report_format.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "fusekit/prediction_model.hpp"

namespace fusekit {
namespace {

std::string printf_string(const char* fmt, auto... args) {
  const int len = std::snprintf(nullptr, 0, fmt, args...);
  std::string out(static_cast<std::size_t>(len) + 1, '\0');
  std::snprintf(out.data(), out.size(), fmt, args...);
  out.pop_back();
  return out;
}

std::string report_row(const char* name, const ClassMetrics& m, int decimals) {
  return printf_string("%12s %9s %9s %9s %9lld\n", name, format_fixed(m.precision, decimals).c_str(),
                       format_fixed(m.recall, decimals).c_str(), format_fixed(m.f1, decimals).c_str(),
                       static_cast<long long>(m.support));
}

nlohmann::json metrics_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

std::string join_scores(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_score(values[i]);
  }
  return out;
}

}  // namespace

std::string format_fixed(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // The default floating-point environment rounds to nearest-even.
  const double rounded = std::nearbyint(value * scale) / scale;
  return printf_string("%.*f", decimals, rounded == 0.0 ? 0.0 : rounded);
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  j["inputs"] = inputs;
  if (strategy) j["strategy"] = *strategy;
  j["threshold"] = threshold;
  if (weights) {
    j["weights"] = *weights;
    j["weight_source"] = weight_source;
  }
  j["tool_version"] = tool_version;
  if (!provenance.empty()) j["provenance"] = provenance;
  return j;
}

std::vector<std::string> RunManifest::to_lines() const {
  std::vector<std::string> lines;
  lines.push_back("command: " + command);
  for (const auto& in : inputs) lines.push_back("input: " + in);
  if (strategy) lines.push_back("strategy: " + *strategy);
  lines.push_back("threshold: " + format_score(threshold));
  if (weights) {
    lines.push_back("weights: " + join_scores(*weights));
    lines.push_back("weight_source: " + weight_source);
  }
  lines.push_back("tool_version: " + tool_version);
  if (!provenance.empty()) {
    std::istringstream in(provenance);
    for (std::string line; std::getline(in, line);) lines.push_back("provenance: " + line);
  }
  return lines;
}

std::string render_report_text(const ClassificationReport& r, int decimals) {
  std::string out = printf_string("%12s %9s %9s %9s %9s\n\n", "", "precision", "recall", "f1-score", "support");
  out += report_row("0", r.class0, decimals);
  out += report_row("1", r.class1, decimals);
  out += '\n';
  out += report_row("macro avg", r.macro_avg, decimals);
  out += report_row("weighted avg", r.weighted_avg, decimals);
  out += '\n';
  out += printf_string("%12s %9s %9s %9s %9lld\n", "accuracy", "", "", format_fixed(r.accuracy, decimals).c_str(),
                       static_cast<long long>(r.macro_avg.support));
  return out;
}

nlohmann::json report_to_json(const ClassificationReport& r) {
  return {{"class0", metrics_json(r.class0)},
          {"class1", metrics_json(r.class1)},
          {"macro_avg", metrics_json(r.macro_avg)},
          {"weighted_avg", metrics_json(r.weighted_avg)},
          {"accuracy", r.accuracy}};
}

nlohmann::json confusion_to_json(const ConfusionMatrix& cm) {
  return {{"labels", {0, 1}},
          {"counts", {{cm.counts[0][0], cm.counts[0][1]}, {cm.counts[1][0], cm.counts[1][1]}}},
          {"total", cm.total()},
          {"false_positives", cm.false_positives()},
          {"false_negatives", cm.false_negatives()}};
}

std::string render_confusion_csv(const ConfusionMatrix& cm) {
  std::string out = "true\\pred,0,1\n";
  for (int t = 0; t < 2; ++t) {
    out += printf_string("%d,%lld,%lld\n", t, static_cast<long long>(cm.counts[t][0]),
                         static_cast<long long>(cm.counts[t][1]));
  }
  return out;
}

std::string render_confusion_text(const ConfusionMatrix& cm) {
  std::string out = printf_string("%12s %9s %9s\n", "true\\pred", "0", "1");
  for (int t = 0; t < 2; ++t) {
    out += printf_string("%12d %9lld %9lld\n", t, static_cast<long long>(cm.counts[t][0]),
                         static_cast<long long>(cm.counts[t][1]));
  }
  return out;
}

void sort_comparison(std::vector<ComparisonRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.accuracy != b.accuracy) return a.accuracy > b.accuracy;
    return a.model_id < b.model_id;
  });
}

std::string render_comparison_text(const std::vector<ComparisonRow>& rows, int decimals) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model_id.size());
  const int w = static_cast<int>(width);
  std::string out = printf_string("%-*s %9s %9s %12s %6s %6s\n", w, "model", "accuracy", "macro_f1", "weighted_f1",
                                  "FP", "FN");
  for (const auto& r : rows) {
    out += printf_string("%-*s %9s %9s %12s %6lld %6lld\n", w, r.model_id.c_str(),
                         format_fixed(r.accuracy, decimals).c_str(), format_fixed(r.macro_f1, decimals).c_str(),
                         format_fixed(r.weighted_f1, decimals).c_str(), static_cast<long long>(r.false_positives),
                         static_cast<long long>(r.false_negatives));
  }
  return out;
}

std::string render_comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::string out = "model,accuracy,macro_f1,weighted_f1,false_positives,false_negatives\n";
  for (const auto& r : rows) {
    out += r.model_id + ',' + format_score(r.accuracy) + ',' + format_score(r.macro_f1) + ',' +
           format_score(r.weighted_f1) + ',' + std::to_string(r.false_positives) + ',' +
           std::to_string(r.false_negatives) + '\n';
  }
  return out;
}

nlohmann::json comparison_to_json(const std::vector<ComparisonRow>& rows) {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"model", r.model_id},
                   {"accuracy", r.accuracy},
                   {"macro_f1", r.macro_f1},
                   {"weighted_f1", r.weighted_f1},
                   {"false_positives", r.false_positives},
                   {"false_negatives", r.false_negatives}});
  }
  return arr;
}

}  // namespace fusekit

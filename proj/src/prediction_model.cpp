#include "fusekit/prediction_model.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <system_error>

namespace fusekit {
namespace {

[[noreturn]] void ingest_error(std::string_view source, std::size_t line, const std::string& reason) {
  std::ostringstream msg;
  msg << source;
  if (line > 0) msg << ':' << line;
  msg << ": " << reason;
  throw Error(ErrorKind::ingest, msg.str());
}

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

struct Row {
  std::size_t line;
  std::string_view key;
  std::string_view value;
};

struct ParsedFile {
  std::optional<std::string> model_id;
  std::vector<Row> rows;
};

// Splits content into comment metadata and two-column data rows, checking
// the header line.
ParsedFile parse_table(std::string_view content, std::string_view header, std::string_view source) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);

  ParsedFile parsed;
  bool seen_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    const auto line = trim(content.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;

    if (line.empty()) continue;
    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      if (body.starts_with("model:")) {
        auto id = trim(body.substr(6));
        if (id.empty()) ingest_error(source, line_no, "empty model id in '# model:' line");
        parsed.model_id = std::string(id);
      }
      continue;
    }
    if (!seen_header) {
      if (line != header) {
        ingest_error(source, line_no, "expected header '" + std::string(header) + "', got '" + std::string(line) + "'");
      }
      seen_header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) ingest_error(source, line_no, "expected 2 comma-separated fields");
    const auto key = trim(line.substr(0, comma));
    const auto value = trim(line.substr(comma + 1));
    if (value.find(',') != std::string_view::npos) ingest_error(source, line_no, "expected 2 comma-separated fields");
    if (key.empty()) ingest_error(source, line_no, "empty sample id");
    parsed.rows.push_back(Row{line_no, key, value});
  }
  if (!seen_header) ingest_error(source, 0, "empty file (no header)");
  if (parsed.rows.empty()) ingest_error(source, 0, "no data rows");
  return parsed;
}

SampleId parse_id(const Row& row, std::string_view source) {
  try {
    return SampleId(std::string(row.key));
  } catch (const Error& e) {
    ingest_error(source, row.line, e.what());
  }
}

template <typename Entry>
void sort_and_check_unique(std::vector<Entry>& entries, const char* what) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.id < b.id; });
  const auto dup = std::adjacent_find(entries.begin(), entries.end(),
                                      [](const Entry& a, const Entry& b) { return a.id == b.id; });
  if (dup != entries.end()) {
    throw Error(ErrorKind::ingest, std::string("duplicate sample id ") + dup->id.str() + " in " + what);
  }
}

template <typename Entry>
const Entry* find_entry(std::span<const Entry> entries, const SampleId& id) {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const Entry& e, const SampleId& key) { return e.id < key; });
  return (it != entries.end() && it->id == id) ? &*it : nullptr;
}

void check_model_id(const std::string& model_id) {
  if (model_id.empty()) throw Error(ErrorKind::ingest, "empty model id");
  if (model_id.find_first_of("\r\n") != std::string::npos) {
    throw Error(ErrorKind::ingest, "model id contains a line break");
  }
}

void append_comments(std::string& out, std::span<const std::string> comments) {
  for (const auto& c : comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
}

}  // namespace

SampleId::SampleId(std::string id) : id_(std::move(id)) {
  if (id_.empty()) throw Error(ErrorKind::domain, "sample id must be non-empty");
  if (id_.find_first_of(", \t\r\n") != std::string::npos) {
    throw Error(ErrorKind::domain, "sample id '" + id_ + "' contains a separator or whitespace");
  }
}

ClassLabel ClassLabel::from_int(int value) {
  if (value != 0 && value != 1) {
    throw Error(ErrorKind::domain, "label outside {0,1}: " + std::to_string(value));
  }
  return ClassLabel(static_cast<std::uint8_t>(value));
}

LabelSet LabelSet::from_entries(std::vector<LabelEntry> entries) {
  if (entries.empty()) throw Error(ErrorKind::ingest, "label set is empty");
  sort_and_check_unique(entries, "labels");
  LabelSet set;
  set.support1_ = std::count_if(entries.begin(), entries.end(),
                                [](const LabelEntry& e) { return e.label == ClassLabel::malignant(); });
  set.support0_ = static_cast<std::int64_t>(entries.size()) - set.support1_;
  set.entries_ = std::move(entries);
  return set;
}

std::optional<ClassLabel> LabelSet::find(const SampleId& id) const {
  const auto* it = find_entry<LabelEntry>(entries_, id);
  if (!it) return std::nullopt;
  return it->label;
}

PredictionSet PredictionSet::from_entries(std::string model_id, std::vector<ScoreEntry> entries) {
  check_model_id(model_id);
  for (const auto& e : entries) {
    if (!(e.score >= 0.0 && e.score <= 1.0)) {
      throw Error(ErrorKind::ingest, "score out of range for sample " + e.id.str() + ": " + format_score(e.score));
    }
  }
  sort_and_check_unique(entries, ("predictions of model " + model_id).c_str());
  PredictionSet set;
  set.model_id_ = std::move(model_id);
  set.entries_ = std::move(entries);
  return set;
}

std::optional<double> PredictionSet::find(const SampleId& id) const {
  const auto* it = find_entry<ScoreEntry>(entries_, id);
  if (!it) return std::nullopt;
  return it->score;
}

DecisionSet DecisionSet::from_entries(std::string model_id, std::vector<LabelEntry> entries) {
  check_model_id(model_id);
  sort_and_check_unique(entries, ("decisions of model " + model_id).c_str());
  DecisionSet set;
  set.model_id_ = std::move(model_id);
  set.entries_ = std::move(entries);
  return set;
}

std::vector<double> AlignedPanel::model_scores(std::size_t model) const {
  std::vector<double> out(sample_count());
  const auto m = model_count();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = matrix_[i * m + model];
  return out;
}

AlignedPanel align(LabelSet labels, std::vector<PredictionSet> models) {
  if (models.empty()) throw Error(ErrorKind::alignment, "at least one prediction set is required");

  for (std::size_t a = 0; a < models.size(); ++a) {
    for (std::size_t b = a + 1; b < models.size(); ++b) {
      if (models[a].model_id() == models[b].model_id()) {
        throw Error(ErrorKind::alignment, "duplicate model id " + models[a].model_id());
      }
    }
  }

  const auto label_entries = labels.entries();
  for (const auto& model : models) {
    const auto scores = model.entries();
    const bool same = scores.size() == label_entries.size() &&
                      std::equal(scores.begin(), scores.end(), label_entries.begin(),
                                 [](const ScoreEntry& s, const LabelEntry& l) { return s.id == l.id; });
    if (same) continue;

    // Both sides are sorted by id, so a single merge pass finds the gaps.
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < label_entries.size() || j < scores.size()) {
      if (j == scores.size() || (i < label_entries.size() && label_entries[i].id < scores[j].id)) {
        missing.push_back(label_entries[i++].id.str());
      } else if (i == label_entries.size() || scores[j].id < label_entries[i].id) {
        extra.push_back(scores[j++].id.str());
      } else {
        ++i;
        ++j;
      }
    }
    std::ostringstream msg;
    msg << "model " << model.model_id() << ": ";
    const auto& list = missing.empty() ? extra : missing;
    if (!missing.empty()) {
      msg << (missing.size() == 1 ? "missing sample " : "missing samples ");
    } else {
      msg << (extra.size() == 1 ? "unlabeled sample " : "unlabeled samples ");
    }
    const std::size_t shown = std::min<std::size_t>(list.size(), 10);
    for (std::size_t k = 0; k < shown; ++k) msg << (k ? ", " : "") << list[k];
    if (list.size() > shown) msg << ", ... (" << list.size() << " total)";
    if (!missing.empty() && !extra.empty()) msg << "; also " << extra.size() << " unlabeled";
    throw Error(ErrorKind::alignment, msg.str());
  }

  AlignedPanel panel;
  const std::size_t n = label_entries.size();
  const std::size_t m = models.size();
  panel.matrix_.resize(n * m);
  panel.truth_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    panel.truth_[i] = static_cast<std::uint8_t>(label_entries[i].label.value());
    for (std::size_t k = 0; k < m; ++k) panel.matrix_[i * m + k] = models[k].entries()[i].score;
  }
  panel.labels_ = std::move(labels);
  panel.models_ = std::move(models);
  return panel;
}

LabelSet load_labels(std::string_view content, std::string_view source) {
  const auto parsed = parse_table(content, "sample_id,label", source);
  std::vector<LabelEntry> entries;
  entries.reserve(parsed.rows.size());
  for (const auto& row : parsed.rows) {
    int value = -1;
    const auto [ptr, ec] = std::from_chars(row.value.data(), row.value.data() + row.value.size(), value);
    if (ec != std::errc{} || ptr != row.value.data() + row.value.size() || (value != 0 && value != 1)) {
      ingest_error(source, row.line, "label outside {0,1}: '" + std::string(row.value) + "'");
    }
    entries.push_back(LabelEntry{parse_id(row, source), ClassLabel::from_int(value)});
  }
  try {
    return LabelSet::from_entries(std::move(entries));
  } catch (const Error& e) {
    ingest_error(source, 0, e.what());
  }
}

PredictionSet load_predictions(std::string_view content, std::optional<std::string> model_id,
                               std::string_view source) {
  auto parsed = parse_table(content, "sample_id,score", source);
  if (!model_id) model_id = parsed.model_id;
  if (!model_id) ingest_error(source, 0, "no model id (pass one explicitly or add a '# model: <id>' line)");

  std::vector<ScoreEntry> entries;
  entries.reserve(parsed.rows.size());
  for (const auto& row : parsed.rows) {
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(row.value.data(), row.value.data() + row.value.size(), score);
    if (ec != std::errc{} || ptr != row.value.data() + row.value.size()) {
      ingest_error(source, row.line, "non-numeric score '" + std::string(row.value) + "'");
    }
    if (!(score >= 0.0 && score <= 1.0)) {
      ingest_error(source, row.line, "score out of range [0,1]: " + std::string(row.value));
    }
    entries.push_back(ScoreEntry{parse_id(row, source), score});
  }
  try {
    return PredictionSet::from_entries(std::move(*model_id), std::move(entries));
  } catch (const Error& e) {
    ingest_error(source, 0, e.what());
  }
}

std::optional<std::string> declared_model_id(std::string_view content) {
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    auto line = trim(content.substr(pos, end - pos));
    pos = end + 1;
    if (line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    if (line.front() != '#') break;
    auto body = trim(line.substr(1));
    if (body.starts_with("model:")) {
      auto id = trim(body.substr(6));
      if (!id.empty()) return std::string(id);
    }
  }
  return std::nullopt;
}

std::string format_score(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string serialize_labels(const LabelSet& labels, std::span<const std::string> comments) {
  std::string out;
  append_comments(out, comments);
  out += "sample_id,label\n";
  for (const auto& e : labels.entries()) {
    out += e.id.str();
    out += e.label.value() == 0 ? ",0\n" : ",1\n";
  }
  return out;
}

std::string serialize_predictions(const PredictionSet& predictions, std::span<const std::string> comments) {
  std::string out = "# model: " + predictions.model_id() + "\n";
  append_comments(out, comments);
  out += "sample_id,score\n";
  for (const auto& e : predictions.entries()) {
    out += e.id.str();
    out += ',';
    out += format_score(e.score);
    out += '\n';
  }
  return out;
}

std::string serialize_decisions(const DecisionSet& decisions, std::span<const std::string> comments) {
  std::string out = "# model: " + decisions.model_id() + "\n";
  append_comments(out, comments);
  out += "sample_id,label\n";
  for (const auto& e : decisions.entries()) {
    out += e.id.str();
    out += e.label.value() == 0 ? ",0\n" : ",1\n";
  }
  return out;
}

}  // namespace fusekit

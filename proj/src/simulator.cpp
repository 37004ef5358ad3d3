#include "fusekit/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <sstream>

namespace fusekit {
namespace {

// mt19937_64's output sequence is fixed by the standard; the std
// distributions are not, so draws are derived from raw bits here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1].
  double unit() { return static_cast<double>((engine_() >> 11) + 1) * 0x1p-53; }

  /// Uniform on [0, n), n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t reject_under = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= reject_under) return r % n;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

// Monotone map of u in (0,1] onto (0,1]; sharpness k > 1 pushes towards 1.
// Uses only correctly-rounded arithmetic so results are portable.
double confidence(double u, double k) {
  const double c = k * u / (1.0 + (k - 1.0) * u);
  return std::max(c, 1e-9);
}

double score_for(std::uint8_t predicted, double conf) {
  return predicted ? 0.5 + 0.5 * conf : 0.5 - 0.5 * conf;
}

std::string sample_id(std::string_view prefix, std::size_t index, std::size_t width) {
  auto digits = std::to_string(index);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return std::string(prefix) + digits;
}

std::size_t id_width(std::size_t n) { return std::max<std::size_t>(4, std::to_string(n).size()); }

std::vector<std::uint8_t> shuffled_classes(std::int64_t n0, std::int64_t n1, Rng& rng) {
  std::vector<std::uint8_t> classes(static_cast<std::size_t>(n0), 0);
  classes.insert(classes.end(), static_cast<std::size_t>(n1), 1);
  rng.shuffle(classes);
  return classes;
}

LabelSet make_labels(const std::vector<std::string>& ids, const std::vector<std::uint8_t>& classes) {
  std::vector<LabelEntry> entries;
  entries.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) entries.push_back({SampleId(ids[i]), ClassLabel::from_int(classes[i])});
  return LabelSet::from_entries(std::move(entries));
}

PredictionSet make_predictions(std::string model_id, const std::vector<std::string>& ids,
                               const std::vector<double>& scores) {
  std::vector<ScoreEntry> entries;
  entries.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) entries.push_back({SampleId(ids[i]), scores[i]});
  return PredictionSet::from_entries(std::move(model_id), std::move(entries));
}

std::int64_t correct_count(double recall, std::int64_t n) {
  return std::llround(recall * static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Reference fixture layout
// ---------------------------------------------------------------------------

// Model order: resnet50, inceptionv3, densenet201 (descending accuracy,
// matching the published weight order).
constexpr std::size_t kModels = 3;

struct ScoreRule {
  bool wrong;
  double conf_lo;  // exclusive unless equal to conf_hi
  double conf_hi;
};

struct Group {
  std::string_view role;
  std::array<std::int64_t, 2> count;  // per true class
  std::array<ScoreRule, kModels> rules;
};

constexpr ScoreRule right(double lo, double hi) { return {false, lo, hi}; }
constexpr ScoreRule wrong(double lo, double hi) { return {true, lo, hi}; }

// Every group's fused outcome is fixed by its confidence ranges, whatever
// the draws:
//  - one model wrong with low confidence, two right with high confidence:
//    every fusion strategy is right;
//  - resnet50 + densenet201 wrong weakly, inceptionv3 right strongly:
//    averages are right, the majority vote is wrong;
//  - inceptionv3 + densenet201 wrong strongly, resnet50 right weakly:
//    everything is wrong;
//  - knife-edge: the plain mean lands 0.0017 on the wrong side of 0.5,
//    the accuracy-weighted mean 0.0032 on the right side.
constexpr std::array<Group, 8> kLayout = {{
    {"all correct", {340, 768}, {right(0.70, 1.0), right(0.60, 1.0), right(0.40, 1.0)}},
    {"resnet50 alone wrong", {6, 4}, {wrong(0.02, 0.50), right(0.70, 1.0), right(0.70, 1.0)}},
    {"inceptionv3 alone wrong", {3, 1}, {right(0.70, 1.0), wrong(0.02, 0.50), right(0.70, 1.0)}},
    {"densenet201 alone wrong", {7, 18}, {right(0.70, 1.0), right(0.70, 1.0), wrong(0.02, 0.50)}},
    {"resnet50+densenet201 wrong, averages recover", {4, 2},
     {wrong(0.02, 0.20), right(0.94, 1.0), wrong(0.02, 0.20)}},
    {"inceptionv3+densenet201 wrong, unrecoverable", {3, 5},
     {right(0.02, 0.20), wrong(0.80, 1.0), wrong(0.80, 1.0)}},
    {"all wrong", {5, 9}, {wrong(0.10, 1.0), wrong(0.10, 1.0), wrong(0.10, 1.0)}},
    {"knife-edge, only weighting recovers", {4, 8},
     {right(0.94, 0.94), wrong(0.01, 0.01), wrong(0.94, 0.94)}},
}};

constexpr std::uint64_t kReferenceSeed = 1187;

constexpr std::array<PublishedTable, 4> kPublished = {{
    {"resnet50", {0.96, 0.96, 0.96, 372}, {0.98, 0.98, 0.98, 815}, {0.97, 0.97, 0.97, 1187},
     {0.98, 0.98, 0.98, 1187}, 0.9755},
    {"inceptionv3", {0.94, 0.96, 0.95, 372}, {0.98, 0.97, 0.98, 815}, {0.96, 0.96, 0.96, 1187},
     {0.97, 0.97, 0.97, 1187}, 0.9663},
    {"densenet201", {0.89, 0.94, 0.91, 372}, {0.97, 0.95, 0.96, 815}, {0.93, 0.94, 0.94, 1187},
     {0.95, 0.95, 0.95, 1187}, 0.9455},
    {"ensemble:weighted_average", {0.96, 0.98, 0.97, 372}, {0.99, 0.98, 0.99, 815}, {0.98, 0.98, 0.98, 1187},
     {0.98, 0.98, 0.98, 1187}, 0.98},
}};

constexpr std::array<double, 3> kPublishedWeights = {0.9755, 0.9663, 0.9455};

}  // namespace

void SimSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::simulation, why); };
  if (n_class0 < 0 || n_class1 < 0) fail("class counts must be non-negative");
  if (n_class0 + n_class1 < 1) fail("at least one sample is required");
  if (models.empty()) fail("at least one model is required");
  if (!(error_overlap >= 0.0 && error_overlap <= 1.0)) fail("error_overlap must lie in [0, 1]");
  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    const auto name = model.model_id.empty() ? "model " + std::to_string(m + 1) : model.model_id;
    if (!(model.recall0 >= 0.0 && model.recall0 <= 1.0)) fail(name + ": recall0 must lie in [0, 1]");
    if (!(model.recall1 >= 0.0 && model.recall1 <= 1.0)) fail(name + ": recall1 must lie in [0, 1]");
    if (!(model.confidence_sharpness > 0.0) || !std::isfinite(model.confidence_sharpness)) {
      fail(name + ": confidence_sharpness must be positive and finite");
    }
  }
}

ErrorCounts expected_errors(const SimSpec& spec, std::size_t model) {
  const auto& m = spec.models.at(model);
  return {spec.n_class0 - correct_count(m.recall0, spec.n_class0),
          spec.n_class1 - correct_count(m.recall1, spec.n_class1)};
}

FixtureBundle simulate(const SimSpec& spec) {
  spec.validate();
  const std::size_t n = static_cast<std::size_t>(spec.n_class0 + spec.n_class1);
  const std::size_t models = spec.models.size();

  std::vector<std::string> model_ids(models);
  for (std::size_t m = 0; m < models; ++m) {
    model_ids[m] = spec.models[m].model_id.empty() ? "model" + std::to_string(m + 1) : spec.models[m].model_id;
  }

  Rng rng(spec.seed);
  const auto classes = shuffled_classes(spec.n_class0, spec.n_class1, rng);
  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = sample_id("s", i + 1, id_width(n));

  // wrong[m * n + i]: model m misclassifies sample i.
  std::vector<std::uint8_t> wrong(models * n, 0);
  for (std::uint8_t t = 0; t < 2; ++t) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (classes[i] == t) members.push_back(i);
    }
    std::vector<std::int64_t> errors(models);
    for (std::size_t m = 0; m < models; ++m) {
      const auto e = expected_errors(spec, m);
      errors[m] = t == 0 ? e.class0 : e.class1;
    }
    const auto [min_err, max_err] = std::minmax_element(errors.begin(), errors.end());
    const auto pool = std::llround(spec.error_overlap * static_cast<double>(*max_err));
    if (pool > *min_err) {
      throw Error(ErrorKind::simulation, "infeasible overlap: shared pool of " + std::to_string(pool) +
                                             " class-" + std::to_string(t) + " samples exceeds the smallest error count " +
                                             std::to_string(*min_err));
    }
    const auto shared = static_cast<std::size_t>(pool);
    const std::size_t free = members.size() - shared;
    std::size_t offset = 0;
    for (std::size_t m = 0; m < models; ++m) {
      for (std::size_t j = 0; j < shared; ++j) wrong[m * n + members[j]] = 1;
      const auto rest = static_cast<std::size_t>(errors[m]) - shared;
      for (std::size_t j = 0; j < rest; ++j) wrong[m * n + members[shared + (offset + j) % free]] = 1;
      if (free > 0) offset = (offset + rest) % free;
    }
  }

  std::vector<std::vector<double>> scores(models, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < models; ++m) {
      const auto predicted = static_cast<std::uint8_t>(classes[i] ^ wrong[m * n + i]);
      scores[m][i] = score_for(predicted, confidence(rng.unit(), spec.models[m].confidence_sharpness));
    }
  }

  FixtureBundle bundle{make_labels(ids, classes), {}, {}};
  for (std::size_t m = 0; m < models; ++m) bundle.models.push_back(make_predictions(model_ids[m], ids, scores[m]));

  std::ostringstream prov;
  prov << "simulated: n_class0=" << spec.n_class0 << " n_class1=" << spec.n_class1
       << " error_overlap=" << spec.error_overlap << " seed=" << spec.seed << " generator=" << kGeneratorId;
  for (std::size_t m = 0; m < models; ++m) {
    const auto e = expected_errors(spec, m);
    prov << "\n  " << model_ids[m] << ": recall0=" << spec.models[m].recall0 << " recall1=" << spec.models[m].recall1
         << " sharpness=" << spec.models[m].confidence_sharpness << " -> FP=" << e.class0 << " FN=" << e.class1;
  }
  bundle.provenance = prov.str();
  return bundle;
}

std::span<const PublishedTable> published_tables() { return std::span(kPublished).first(3); }
const PublishedTable& published_ensemble_table() { return kPublished[3]; }
std::span<const double> published_weights() { return kPublishedWeights; }

CountFit fit_error_counts(const PublishedTable& table, std::int64_t n0, std::int64_t n1,
                          std::optional<ErrorCounts> max_errors) {
  const std::int64_t cap0 = max_errors ? std::min(n0, max_errors->class0) : n0;
  const std::int64_t cap1 = max_errors ? std::min(n1, max_errors->class1) : n1;
  auto frac = [](std::int64_t a, std::int64_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };

  CountFit best;
  double best_acc_gap = 0.0;
  bool have = false;
  for (std::int64_t e0 = 0; e0 <= cap0; ++e0) {
    for (std::int64_t e1 = 0; e1 <= cap1; ++e1) {
      const std::int64_t tn = n0 - e0;
      const std::int64_t tp = n1 - e1;
      const double dev = std::max({std::abs(frac(tn, tn + e1) - table.class0.precision),
                                   std::abs(frac(tn, n0) - table.class0.recall),
                                   std::abs(frac(tp, tp + e0) - table.class1.precision),
                                   std::abs(frac(tp, n1) - table.class1.recall)});
      const double acc_gap = std::abs(frac(tn + tp, n0 + n1) - table.accuracy);
      // Strict comparisons keep the smallest (e0, e1) among exact ties.
      if (!have || dev < best.max_deviation || (dev == best.max_deviation && acc_gap < best_acc_gap)) {
        best = CountFit{{e0, e1}, dev};
        best_acc_gap = acc_gap;
        have = true;
      }
    }
  }
  return best;
}

FixtureBundle reference_fixture() {
  Rng rng(kReferenceSeed);
  const auto classes = shuffled_classes(kReferenceSupport0, kReferenceSupport1, rng);
  const std::size_t n = classes.size();

  // Assign a layout group to every sample, shuffled within each class.
  std::vector<std::size_t> group_of(n);
  for (std::uint8_t t = 0; t < 2; ++t) {
    std::vector<std::size_t> slots;
    for (std::size_t g = 0; g < kLayout.size(); ++g) slots.insert(slots.end(), static_cast<std::size_t>(kLayout[g].count[t]), g);
    rng.shuffle(slots);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (classes[i] == t) group_of[i] = slots[next++];
    }
  }

  std::vector<std::string> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = sample_id("bh", i + 1, id_width(n));

  std::array<std::vector<double>, kModels> scores;
  for (auto& s : scores) s.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& group = kLayout[group_of[i]];
    for (std::size_t m = 0; m < kModels; ++m) {
      const auto& rule = group.rules[m];
      const double conf = rule.conf_lo == rule.conf_hi ? rule.conf_lo
                                                       : rule.conf_lo + (rule.conf_hi - rule.conf_lo) * rng.unit();
      const auto predicted = static_cast<std::uint8_t>(classes[i] ^ static_cast<std::uint8_t>(rule.wrong));
      scores[m][i] = score_for(predicted, conf);
    }
  }

  FixtureBundle bundle{make_labels(ids, classes), {}, {}};
  for (std::size_t m = 0; m < kModels; ++m) {
    bundle.models.push_back(make_predictions(std::string(kPublished[m].model_id), ids, scores[m]));
  }

  std::ostringstream prov;
  prov << "reference fixture: BreakHis test-split dimensions (372 benign / 815 malignant), generator="
       << kGeneratorId << " seed=" << kReferenceSeed
       << "\nPer-model confusion counts are integer fits to the published per-model tables"
          " (minimax over class precision/recall cells):";
  for (std::size_t m = 0; m < kModels; ++m) {
    std::int64_t fp = 0, fn = 0;
    for (const auto& g : kLayout) {
      fp += g.rules[m].wrong ? g.count[0] : 0;
      fn += g.rules[m].wrong ? g.count[1] : 0;
    }
    prov << "\n  " << kPublished[m].model_id << ": FP=" << fp << " FN=" << fn;
  }
  prov << "\nError overlap is laid out so the accuracy-weighted ensemble (weights 0.9755, 0.9663, 0.9455)"
          " reproduces the published ensemble table. Counts only; per-image predictions are synthetic."
       << "\nLayout groups (class0/class1):";
  for (const auto& g : kLayout) prov << "\n  " << g.role << ": " << g.count[0] << "/" << g.count[1];
  bundle.provenance = prov.str();
  return bundle;
}

}  // namespace fusekit

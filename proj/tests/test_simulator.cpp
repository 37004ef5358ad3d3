#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fusekit/fusion.hpp"
#include "fusekit/metrics.hpp"
#include "fusekit/simulator.hpp"

using namespace fusekit;

namespace {

ConfusionMatrix confusion_of(const FixtureBundle& b, std::size_t m) {
  return confusion(b.labels, decide_all(b.models[m]));
}

SimSpec three_model_spec(std::uint64_t seed) {
  SimSpec spec;
  spec.n_class0 = 120;
  spec.n_class1 = 250;
  spec.models = {{"a", 0.9, 0.95, 4.0}, {"b", 0.85, 0.9, 2.0}, {"c", 0.95, 0.8, 6.0}};
  spec.error_overlap = 0.2;
  spec.seed = seed;
  return spec;
}

std::string serialize_all(const FixtureBundle& b) {
  std::string out = serialize_labels(b.labels);
  for (const auto& m : b.models) out += serialize_predictions(m);
  return out;
}

}  // namespace

TEST_CASE("perfect recalls give a diagonal confusion matrix") {
  SimSpec spec;
  spec.n_class0 = 40;
  spec.n_class1 = 60;
  spec.models = {{"m", 1.0, 1.0, 4.0}};
  const auto b = simulate(spec);
  CHECK(confusion_of(b, 0) == ConfusionMatrix{{{{40, 0}, {0, 60}}}});
}

TEST_CASE("recall 0.5 over 10 samples gives exactly 5 errors") {
  SimSpec spec;
  spec.n_class0 = 10;
  spec.n_class1 = 10;
  spec.models = {{"m", 0.5, 1.0, 4.0}};
  spec.seed = 3;
  const auto b = simulate(spec);
  const auto cm = confusion_of(b, 0);
  CHECK(cm.false_positives() == 5);
  CHECK(cm.false_negatives() == 0);
}

TEST_CASE("simulated counts match expected_errors") {
  for (std::uint64_t seed : {0u, 1u, 77u}) {
    const auto spec = three_model_spec(seed);
    const auto b = simulate(spec);
    CHECK(b.labels.support0() == 120);
    CHECK(b.labels.support1() == 250);
    const auto panel = align(b.labels, b.models);
    CHECK(panel.model_count() == 3);
    for (std::size_t m = 0; m < 3; ++m) {
      const auto cm = confusion_of(b, m);
      const auto e = expected_errors(spec, m);
      CHECK(cm.false_positives() == e.class0);
      CHECK(cm.false_negatives() == e.class1);
    }
  }
  CHECK(expected_errors(three_model_spec(0), 1) == ErrorCounts{18, 25});
}

TEST_CASE("overlap puts a shared pool of errors on every model") {
  auto spec = three_model_spec(5);
  spec.error_overlap = 1.0;
  spec.models = {{"a", 0.9, 0.9, 4.0}, {"b", 0.9, 0.9, 4.0}};
  const auto b = simulate(spec);
  const auto da = decide_all(b.models[0]);
  const auto db = decide_all(b.models[1]);
  CHECK(std::ranges::equal(da.entries(), db.entries()));
}

TEST_CASE("infeasible overlap is rejected") {
  auto spec = three_model_spec(0);
  spec.models = {{"a", 0.5, 0.9, 4.0}, {"b", 0.99, 0.9, 4.0}};
  spec.error_overlap = 0.9;
  CHECK_THROWS_AS(simulate(spec), Error);
}

TEST_CASE("spec validation") {
  auto spec = three_model_spec(0);
  spec.models[0].recall0 = 1.1;
  CHECK_THROWS_AS(simulate(spec), Error);
  spec = three_model_spec(0);
  spec.models[1].confidence_sharpness = 0.0;
  CHECK_THROWS_AS(simulate(spec), Error);
  spec = three_model_spec(0);
  spec.models.clear();
  CHECK_THROWS_AS(simulate(spec), Error);
  spec = three_model_spec(0);
  spec.n_class0 = 0;
  spec.n_class1 = 0;
  CHECK_THROWS_AS(simulate(spec), Error);
}

TEST_CASE("simulation is deterministic in the seed") {
  const auto a = serialize_all(simulate(three_model_spec(42)));
  CHECK(a == serialize_all(simulate(three_model_spec(42))));
  CHECK(a != serialize_all(simulate(three_model_spec(43))));
}

TEST_CASE("default model ids") {
  SimSpec spec;
  spec.n_class0 = 2;
  spec.n_class1 = 2;
  spec.models = {{"", 1.0, 1.0, 4.0}, {"", 1.0, 1.0, 4.0}};
  const auto b = simulate(spec);
  CHECK(b.models[0].model_id() == "model1");
  CHECK(b.models[1].model_id() == "model2");
  CHECK(b.labels.entries()[0].id.str() == "s0001");
}

TEST_CASE("count fitting against the published tables") {
  const auto tables = published_tables();
  REQUIRE(tables.size() == 3);
  const ErrorCounts want[3] = {{15, 15}, {15, 23}, {23, 42}};
  for (std::size_t m = 0; m < 3; ++m) {
    const auto fit = fit_error_counts(tables[m], kReferenceSupport0, kReferenceSupport1);
    CHECK(fit.errors == want[m]);
    CHECK(fit.max_deviation <= 0.01);
  }
  const auto ens = fit_error_counts(published_ensemble_table(), kReferenceSupport0, kReferenceSupport1,
                                    ErrorCounts{14, 14});
  CHECK(ens.errors == ErrorCounts{8, 14});
}

TEST_CASE("reference fixture") {
  const auto b = reference_fixture();
  CHECK(b.labels.support0() == kReferenceSupport0);
  CHECK(b.labels.support1() == kReferenceSupport1);
  REQUIRE(b.models.size() == 3);
  const ErrorCounts want[3] = {{15, 15}, {15, 23}, {23, 42}};
  const auto tables = published_tables();
  double best_single = 0.0;
  std::int64_t best_errors = 1 << 30;
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(b.models[m].model_id() == tables[m].model_id);
    const auto cm = confusion_of(b, m);
    CHECK(ErrorCounts{cm.false_positives(), cm.false_negatives()} == want[m]);
    const auto r = report(cm);
    CHECK(std::abs(r.accuracy - published_weights()[m]) <= 0.01);
    best_single = std::max(best_single, r.accuracy);
    best_errors = std::min(best_errors, cm.false_positives() + cm.false_negatives());
  }

  const auto panel = align(b.labels, b.models);
  const auto weights = WeightVector::from({published_weights().begin(), published_weights().end()});
  const auto fused = fuse_panel(panel, FusionConfig{Strategy::weighted_average, 0.5, weights});
  const auto cm = confusion(b.labels, decisions_of(fused));
  CHECK(cm.false_positives() == 8);
  CHECK(cm.false_negatives() == 14);
  const auto r = report(cm);
  CHECK(r.accuracy >= 0.975);
  CHECK(r.accuracy > best_single);
  CHECK(cm.false_positives() + cm.false_negatives() < best_errors);

  CHECK(serialize_predictions(reference_fixture().models[2]) == serialize_predictions(b.models[2]));
  CHECK(b.provenance.find("resnet50: FP=15 FN=15") != std::string::npos);
}

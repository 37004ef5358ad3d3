#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "fusekit/prediction_model.hpp"

using namespace fusekit;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected fusekit::Error");
  return ErrorKind::io;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected fusekit::Error");
  return {};
}

PredictionSet preds(std::string id, std::vector<std::pair<std::string, double>> rows) {
  std::vector<ScoreEntry> entries;
  for (auto& [k, v] : rows) entries.push_back({SampleId(k), v});
  return PredictionSet::from_entries(std::move(id), std::move(entries));
}

LabelSet labels(std::vector<std::pair<std::string, int>> rows) {
  std::vector<LabelEntry> entries;
  for (auto& [k, v] : rows) entries.push_back({SampleId(k), ClassLabel::from_int(v)});
  return LabelSet::from_entries(std::move(entries));
}

}  // namespace

TEST_CASE("ClassLabel accepts only 0 and 1") {
  CHECK(ClassLabel::from_int(0) == ClassLabel::benign());
  CHECK(ClassLabel::from_int(1) == ClassLabel::malignant());
  CHECK(ClassLabel::benign().flipped() == ClassLabel::malignant());
  CHECK(kind_of([] { ClassLabel::from_int(2); }) == ErrorKind::domain);
  CHECK(kind_of([] { ClassLabel::from_int(-1); }) == ErrorKind::domain);
}

TEST_CASE("SampleId rejects empty ids and separators") {
  CHECK(SampleId("SOB_B_A-14-22549AB-40-001").str() == "SOB_B_A-14-22549AB-40-001");
  CHECK_THROWS_AS(SampleId(""), Error);
  CHECK_THROWS_AS(SampleId("a,b"), Error);
  CHECK_THROWS_AS(SampleId("a b"), Error);
}

TEST_CASE("load_labels counts supports") {
  const auto set = load_labels("sample_id,label\na,0\nb,1\nc,1\n");
  CHECK(set.size() == 3);
  CHECK(set.support0() == 1);
  CHECK(set.support1() == 2);
  CHECK(set.find(SampleId("b")) == ClassLabel::malignant());
  CHECK_FALSE(set.find(SampleId("z")).has_value());
}

TEST_CASE("load_labels errors") {
  SUBCASE("duplicate id is named") {
    const auto msg = message_of([] { load_labels("sample_id,label\na,0\na,1\n"); });
    CHECK(msg.find("duplicate sample id a") != std::string::npos);
  }
  SUBCASE("label outside {0,1} reports the row") {
    const auto msg = message_of([] { load_labels("sample_id,label\na,0\nb,2\n", "lab.csv"); });
    CHECK(msg.find("lab.csv:3") != std::string::npos);
    CHECK(msg.find("label outside {0,1}") != std::string::npos);
  }
  SUBCASE("empty file") {
    CHECK(kind_of([] { load_labels(""); }) == ErrorKind::ingest);
    CHECK(kind_of([] { load_labels("sample_id,label\n"); }) == ErrorKind::ingest);
  }
  SUBCASE("wrong header") { CHECK(kind_of([] { load_labels("id,label\na,0\n"); }) == ErrorKind::ingest); }
  SUBCASE("extra column") { CHECK(kind_of([] { load_labels("sample_id,label\na,0,1\n"); }) == ErrorKind::ingest); }
}

TEST_CASE("load_labels accepts CRLF, BOM, comments and blank lines") {
  const auto a = load_labels("\xEF\xBB\xBF# a comment\r\nsample_id,label\r\n\r\nx,1\r\ny,0\r\n");
  const auto b = load_labels("sample_id,label\ny,0\nx,1");
  CHECK(a == b);
}

TEST_CASE("load_predictions") {
  SUBCASE("basic rows") {
    const auto p = load_predictions("# model: resnet50\nsample_id,score\na,0.9\nb,0.2\n");
    CHECK(p.model_id() == "resnet50");
    CHECK(p.size() == 2);
    CHECK(p.find(SampleId("a")) == 0.9);
  }
  SUBCASE("closed interval endpoints are valid") {
    const auto p = load_predictions("sample_id,score\na,0.0\nb,1.0\n", "m");
    CHECK(p.find(SampleId("a")) == 0.0);
    CHECK(p.find(SampleId("b")) == 1.0);
  }
  SUBCASE("explicit id wins over the comment") {
    const auto p = load_predictions("# model: fromfile\nsample_id,score\na,0.5\n", "fromflag");
    CHECK(p.model_id() == "fromflag");
  }
  SUBCASE("out of range score") {
    const auto msg = message_of([] { load_predictions("sample_id,score\na,1.3\n", "m", "p.csv"); });
    CHECK(msg.find("score out of range") != std::string::npos);
    CHECK(msg.find("p.csv:2") != std::string::npos);
    CHECK(msg.find("1.3") != std::string::npos);
    CHECK(kind_of([] { load_predictions("sample_id,score\na,-0.01\n", "m"); }) == ErrorKind::ingest);
    CHECK(kind_of([] { load_predictions("sample_id,score\na,nan\n", "m"); }) == ErrorKind::ingest);
  }
  SUBCASE("non-numeric score") {
    const auto msg = message_of([] { load_predictions("sample_id,score\na,high\n", "m"); });
    CHECK(msg.find("non-numeric") != std::string::npos);
    CHECK(kind_of([] { load_predictions("sample_id,score\na,0.5x\n", "m"); }) == ErrorKind::ingest);
  }
  SUBCASE("duplicate id") {
    CHECK(kind_of([] { load_predictions("sample_id,score\na,0.5\na,0.6\n", "m"); }) == ErrorKind::ingest);
  }
  SUBCASE("missing model id") {
    CHECK(kind_of([] { load_predictions("sample_id,score\na,0.5\n"); }) == ErrorKind::ingest);
  }
  SUBCASE("declared_model_id reads the comment header") {
    CHECK(declared_model_id("# generator: x\n# model: m1\nsample_id,score\n") == "m1");
    CHECK_FALSE(declared_model_id("sample_id,score\n# model: late\n").has_value());
  }
}

TEST_CASE("align") {
  const auto lab = labels({{"a", 0}, {"b", 1}});

  SUBCASE("exact cover gives a panel") {
    const auto panel = align(lab, {preds("m", {{"b", 0.7}, {"a", 0.1}})});
    CHECK(panel.model_count() == 1);
    CHECK(panel.sample_count() == 2);
    CHECK(panel.sample_scores(0)[0] == 0.1);
    CHECK(panel.sample_scores(1)[0] == 0.7);
    CHECK(panel.truth()[0] == 0);
    CHECK(panel.truth()[1] == 1);
  }
  SUBCASE("missing sample is named") {
    const auto msg = message_of([&] { align(lab, {preds("m", {{"a", 0.1}})}); });
    CHECK(msg.find("missing sample b") != std::string::npos);
  }
  SUBCASE("unlabeled sample") {
    CHECK(kind_of([&] { align(lab, {preds("m", {{"a", 0.1}, {"b", 0.2}, {"c", 0.3}})}); }) ==
          ErrorKind::alignment);
  }
  SUBCASE("missing list is capped at 10 ids") {
    std::vector<std::pair<std::string, int>> many;
    for (int i = 0; i < 30; ++i) many.push_back({"s" + std::to_string(100 + i), 1});
    const auto msg = message_of([&] { align(labels(many), {preds("m", {{"s100", 0.5}})}); });
    CHECK(msg.find("(29 total)") != std::string::npos);
    CHECK(msg.find("s111") == std::string::npos);
  }
  SUBCASE("two models keep input order") {
    const auto panel = align(lab, {preds("resnet50", {{"a", 0.1}, {"b", 0.9}}),
                                   preds("inceptionv3", {{"a", 0.3}, {"b", 0.6}})});
    REQUIRE(panel.model_count() == 2);
    CHECK(panel.models()[0].model_id() == "resnet50");
    CHECK(panel.models()[1].model_id() == "inceptionv3");
    // Enumerate every cell against the inputs.
    const double expected[2][2] = {{0.1, 0.3}, {0.9, 0.6}};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t m = 0; m < 2; ++m) CHECK(panel.sample_scores(i)[m] == expected[i][m]);
    }
    CHECK(panel.model_scores(1) == std::vector<double>{0.3, 0.6});
  }
  SUBCASE("duplicate model id") {
    CHECK(kind_of([&] { align(lab, {preds("m", {{"a", 0.1}, {"b", 0.9}}), preds("m", {{"a", 0.1}, {"b", 0.9}})}); }) ==
          ErrorKind::alignment);
  }
  SUBCASE("no models") { CHECK(kind_of([&] { align(lab, {}); }) == ErrorKind::alignment); }
}

TEST_CASE("property: align succeeds iff id sets are equal") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<std::pair<std::string, int>> lab_rows;
    std::vector<std::pair<std::string, double>> pred_rows;
    std::set<std::string> ids;
    while (static_cast<int>(ids.size()) < n) ids.insert("id" + std::to_string(rng() % 1000));
    for (const auto& id : ids) {
      lab_rows.push_back({id, static_cast<int>(rng() % 2)});
      pred_rows.push_back({id, static_cast<double>(rng() % 1001) / 1000.0});
    }
    const int mutation = static_cast<int>(rng() % 3);  // 0 none, 1 delete, 2 insert
    if (mutation == 1) pred_rows.erase(pred_rows.begin() + static_cast<long>(rng() % pred_rows.size()));
    if (mutation == 2) pred_rows.push_back({"extra" + std::to_string(trial), 0.5});

    const auto lab = labels(lab_rows);
    auto p = preds("m", pred_rows);
    std::set<std::string> pred_ids;
    for (const auto& e : p.entries()) pred_ids.insert(e.id.str());
    const bool equal_sets = pred_ids == ids;
    bool aligned = true;
    try {
      align(lab, {p});
    } catch (const Error&) {
      aligned = false;
    }
    CHECK(aligned == equal_sets);
    CHECK(equal_sets == (mutation == 0));
  }
}

TEST_CASE("property: ingestion ignores row order and round-trips") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<std::string> label_rows, score_rows;
    for (int i = 0; i < n; ++i) {
      const auto id = "x" + std::to_string(i);
      label_rows.push_back(id + "," + std::to_string(rng() % 2));
      // Arbitrary doubles in [0,1], including ones without a short decimal form.
      const double s = static_cast<double>(rng() >> 11) * 0x1p-53;
      score_rows.push_back(id + "," + format_score(s));
    }
    auto text = [](const char* header, const std::vector<std::string>& rows) {
      std::string out = std::string(header) + "\n";
      for (const auto& r : rows) out += r + "\n";
      return out;
    };
    const auto lab = load_labels(text("sample_id,label", label_rows));
    const auto pred = load_predictions(text("sample_id,score", score_rows), "m");

    std::shuffle(label_rows.begin(), label_rows.end(), rng);
    std::shuffle(score_rows.begin(), score_rows.end(), rng);
    CHECK(load_labels(text("sample_id,label", label_rows)) == lab);
    CHECK(load_predictions(text("sample_id,score", score_rows), "m") == pred);

    CHECK(load_labels(serialize_labels(lab)) == lab);
    CHECK(load_predictions(serialize_predictions(pred)) == pred);
    const std::vector<std::string> comments = {"generator: test"};
    CHECK(serialize_predictions(load_predictions(serialize_predictions(pred, comments))) == serialize_predictions(pred));
  }
}

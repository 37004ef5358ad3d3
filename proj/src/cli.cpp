#include "fusekit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "fusekit/kernels.hpp"
#include "fusekit/simulator.hpp"

namespace fusekit::cli {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void usage_error(const std::string& why) { throw Error(ErrorKind::usage, why); }

std::vector<std::string> split_commas(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = text.find(',', pos);
    out.emplace_back(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> parse_number_list(std::string_view text, const char* flag) {
  std::vector<double> values;
  for (const auto& item : split_commas(text)) {
    double v = 0.0;
    const auto* first = item.data();
    const auto* last = item.data() + item.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (item.empty() || ec != std::errc{} || ptr != last) {
      usage_error(std::string(flag) + ": '" + item + "' is not a number");
    }
    values.push_back(v);
  }
  return values;
}

PredictionSet load_prediction_file(const std::string& path, const std::optional<std::string>& model_id) {
  const auto content = read_file(path);
  auto id = model_id ? model_id : declared_model_id(content);
  if (!id) id = fs::path(path).stem().string();
  return load_predictions(content, id, path);
}

struct PanelInputs {
  std::string labels_path;
  std::vector<std::string> prediction_paths;
  std::vector<std::string> model_ids;
};

AlignedPanel load_panel(const PanelInputs& in) {
  if (!in.model_ids.empty() && in.model_ids.size() != in.prediction_paths.size()) {
    usage_error("--model-id given " + std::to_string(in.model_ids.size()) + " times for " +
                std::to_string(in.prediction_paths.size()) + " prediction files");
  }
  auto labels = load_labels(read_file(in.labels_path), in.labels_path);
  std::vector<PredictionSet> models;
  for (std::size_t i = 0; i < in.prediction_paths.size(); ++i) {
    const auto id = in.model_ids.empty() ? std::nullopt : std::optional<std::string>(in.model_ids[i]);
    models.push_back(load_prediction_file(in.prediction_paths[i], id));
  }
  return align(std::move(labels), std::move(models));
}

struct WeightFlags {
  std::string explicit_list;
  std::string source_list;
};

struct ResolvedWeights {
  WeightVector weights;
  std::string source;
};

// Weights for `panel`'s models, from either flag. Weight-source models are
// matched to the panel by model id.
std::optional<ResolvedWeights> resolve_weights(const WeightFlags& flags, const AlignedPanel& panel,
                                               double threshold) {
  if (!flags.explicit_list.empty() && !flags.source_list.empty()) {
    usage_error("--weights and --weights-from are mutually exclusive");
  }
  if (!flags.explicit_list.empty()) {
    auto values = parse_number_list(flags.explicit_list, "--weights");
    if (values.size() != panel.model_count()) {
      usage_error("--weights has " + std::to_string(values.size()) + " values for " +
                  std::to_string(panel.model_count()) + " models");
    }
    return ResolvedWeights{WeightVector::from(std::move(values)), "explicit"};
  }
  if (!flags.source_list.empty()) {
    const auto files = split_commas(flags.source_list);
    if (files.size() < 2) usage_error("--weights-from needs a label file followed by prediction files");
    const auto source_panel = load_panel({files[0], {files.begin() + 1, files.end()}, {}});
    const auto source_weights = weights_from_accuracy(source_panel, threshold);
    std::vector<double> values;
    for (const auto& model : panel.models()) {
      const auto models = source_panel.models();
      const auto it = std::find_if(models.begin(), models.end(),
                                   [&](const PredictionSet& p) { return p.model_id() == model.model_id(); });
      if (it == models.end()) usage_error("--weights-from has no predictions for model " + model.model_id());
      values.push_back(source_weights.values()[static_cast<std::size_t>(it - models.begin())]);
    }
    return ResolvedWeights{WeightVector::from(std::move(values)), "accuracy:" + flags.source_list};
  }
  return std::nullopt;
}

enum class Format { text, json, csv };

Format parse_format(const std::string& name) {
  if (name == "text") return Format::text;
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  usage_error("--format must be text, json or csv");
}

std::string comment_block(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += "# " + l + "\n";
  return out;
}

// One model's (or one ensemble's) evaluation in the requested format.
std::string render_evaluation(const std::string& model_id, const ClassificationReport& rep,
                              const ConfusionMatrix& cm, const RunManifest& manifest, Format format, int decimals) {
  switch (format) {
    case Format::json: {
      nlohmann::json j;
      j["manifest"] = manifest.to_json();
      j["model"] = model_id;
      j["report"] = report_to_json(rep);
      j["confusion_matrix"] = confusion_to_json(cm);
      return j.dump(2) + "\n";
    }
    case Format::csv:
      return comment_block(manifest.to_lines()) + "# model: " + model_id + "\n" + render_confusion_csv(cm);
    case Format::text:
      break;
  }
  return comment_block(manifest.to_lines()) + "\nmodel: " + model_id + "\n\n" + render_report_text(rep, decimals) +
         "\nconfusion matrix (rows = true class, columns = predicted)\n" + render_confusion_text(cm);
}

void emit(const std::string& content, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << content;
  } else {
    write_file_atomic(out_path, content);
  }
}

ConfusionMatrix panel_confusion(const AlignedPanel& panel, std::span<const std::uint8_t> decisions) {
  return ConfusionMatrix{kernels::count_confusion(panel.truth(), decisions)};
}

ComparisonRow comparison_row(std::string model_id, const ConfusionMatrix& cm) {
  const auto rep = report(cm);
  return ComparisonRow{std::move(model_id), rep.accuracy, rep.macro_avg.f1, rep.weighted_avg.f1,
                       cm.false_positives(), cm.false_negatives()};
}

ModelSimSpec model_spec(std::size_t m, const std::vector<double>& r0, const std::vector<double>& r1,
                        const std::vector<double>& sharp) {
  auto pick = [m](const std::vector<double>& v, double fallback, const char* flag) {
    if (v.empty()) return fallback;
    if (v.size() == 1) return v[0];
    if (m >= v.size()) usage_error(std::string(flag) + " needs one value or one per model");
    return v[m];
  };
  return ModelSimSpec{"model" + std::to_string(m + 1), pick(r0, 1.0, "--recall0"), pick(r1, 1.0, "--recall1"),
                      pick(sharp, 4.0, "--sharpness")};
}

SimSpec spec_from_json(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    usage_error(path + ": invalid simulation spec: " + e.what());
  }
  SimSpec spec;
  try {
    spec.n_class0 = j.at("n_class0").get<std::int64_t>();
    spec.n_class1 = j.at("n_class1").get<std::int64_t>();
    spec.error_overlap = j.value("error_overlap", 0.0);
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& m : j.at("models")) {
      spec.models.push_back(ModelSimSpec{m.value("model_id", std::string{}), m.at("recall0").get<double>(),
                                         m.at("recall1").get<double>(), m.value("confidence_sharpness", 4.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    usage_error(path + ": invalid simulation spec: " + e.what());
  }
  return spec;
}

nlohmann::json spec_to_json(const SimSpec& spec) {
  nlohmann::json models = nlohmann::json::array();
  for (const auto& m : spec.models) {
    models.push_back({{"model_id", m.model_id},
                      {"recall0", m.recall0},
                      {"recall1", m.recall1},
                      {"confidence_sharpness", m.confidence_sharpness}});
  }
  return {{"n_class0", spec.n_class0},
          {"n_class1", spec.n_class1},
          {"error_overlap", spec.error_overlap},
          {"seed", spec.seed},
          {"models", models}};
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

struct CommonFlags {
  double threshold = kDefaultThreshold;
  std::string format = "text";
  std::string out;
  int decimals = 2;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--threshold", flags.threshold, "Decision threshold in (0,1); score >= threshold is class 1")
      ->capture_default_str();
  cmd->add_option("--format", flags.format, "Report format: text, json or csv")->capture_default_str();
  cmd->add_option("--decimals", flags.decimals, "Decimals in text reports")->capture_default_str()->check(
      CLI::Range(0, 12));
}

int cmd_evaluate(const PanelInputs& in, const CommonFlags& flags, std::ostream& out) {
  const auto format = parse_format(flags.format);
  check_threshold(flags.threshold);
  const auto panel = load_panel(in);
  std::vector<std::uint8_t> decisions(panel.sample_count());
  kernels::threshold_column(panel.score_matrix(), 1, 0, flags.threshold, decisions);
  const auto cm = panel_confusion(panel, decisions);
  const auto rep = report(cm);

  RunManifest manifest;
  manifest.command = "evaluate";
  manifest.inputs = {in.labels_path, in.prediction_paths.front()};
  manifest.threshold = flags.threshold;
  emit(render_evaluation(panel.models()[0].model_id(), rep, cm, manifest, format, flags.decimals), flags.out, out);
  return 0;
}

int cmd_fuse(const PanelInputs& in, const CommonFlags& flags, const WeightFlags& weight_flags,
             const std::string& strategy_name, const std::string& report_path, std::ostream& out) {
  const auto format = parse_format(flags.format);
  check_threshold(flags.threshold);
  if (flags.out.empty()) usage_error("fuse requires --out <fused predictions file>");
  const auto strategy = parse_strategy(strategy_name);
  const auto panel = load_panel(in);

  FusionConfig config;
  config.strategy = strategy;
  config.threshold = flags.threshold;
  const auto resolved = resolve_weights(weight_flags, panel, flags.threshold);
  if (resolved) config.weights = resolved->weights;
  if (strategy == Strategy::weighted_average && !resolved) {
    usage_error("unresolvable weights: weighted_average needs --weights or --weights-from");
  }

  const auto fused = fuse_panel(panel, config);
  const auto decisions = decisions_of(fused, flags.threshold);
  const auto cm = confusion(panel.labels(), decisions);
  const auto rep = report(cm);

  RunManifest manifest;
  manifest.command = "fuse";
  manifest.inputs.push_back(in.labels_path);
  manifest.inputs.insert(manifest.inputs.end(), in.prediction_paths.begin(), in.prediction_paths.end());
  manifest.strategy = std::string(to_string(strategy));
  manifest.threshold = flags.threshold;
  if (resolved) {
    manifest.weights = std::vector<double>(resolved->weights.values().begin(), resolved->weights.values().end());
    manifest.weight_source = resolved->source;
  }

  const auto manifest_lines = manifest.to_lines();
  const auto file = std::holds_alternative<PredictionSet>(fused)
                        ? serialize_predictions(std::get<PredictionSet>(fused), manifest_lines)
                        : serialize_decisions(std::get<DecisionSet>(fused), manifest_lines);
  write_file_atomic(flags.out, file);

  emit(render_evaluation(ensemble_model_id(strategy), rep, cm, manifest, format, flags.decimals), report_path, out);
  return 0;
}

int cmd_compare(const PanelInputs& in, const CommonFlags& flags, const WeightFlags& weight_flags, std::ostream& out) {
  const auto format = parse_format(flags.format);
  check_threshold(flags.threshold);
  if (in.prediction_paths.size() < 2) usage_error("compare needs at least 2 prediction files");
  const auto panel = load_panel(in);
  const auto resolved = resolve_weights(weight_flags, panel, flags.threshold);
  if (!resolved) usage_error("unresolvable weights: compare needs --weights or --weights-from");
  const auto rows = build_comparison(panel, resolved->weights, flags.threshold);

  RunManifest manifest;
  manifest.command = "compare";
  manifest.inputs.push_back(in.labels_path);
  manifest.inputs.insert(manifest.inputs.end(), in.prediction_paths.begin(), in.prediction_paths.end());
  manifest.threshold = flags.threshold;
  manifest.weights = std::vector<double>(resolved->weights.values().begin(), resolved->weights.values().end());
  manifest.weight_source = resolved->source;

  std::string content;
  switch (format) {
    case Format::json: {
      nlohmann::json j;
      j["manifest"] = manifest.to_json();
      j["rows"] = comparison_to_json(rows);
      content = j.dump(2) + "\n";
      break;
    }
    case Format::csv:
      content = comment_block(manifest.to_lines()) + render_comparison_csv(rows);
      break;
    case Format::text:
      content = comment_block(manifest.to_lines()) + "\n" + render_comparison_text(rows, flags.decimals);
      break;
  }
  emit(content, flags.out, out);
  return 0;
}

struct SimFlags {
  bool paper = false;
  std::string spec_file;
  std::size_t models = 1;
  std::int64_t n0 = kReferenceSupport0;
  std::int64_t n1 = kReferenceSupport1;
  std::string recall0;
  std::string recall1;
  std::string sharpness;
  double overlap = 0.0;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

int cmd_simulate(const SimFlags& flags, const std::string& out_dir, std::ostream& out) {
  if (out_dir.empty()) usage_error("simulate requires --out <directory>");
  FixtureBundle bundle;
  nlohmann::json spec_json;
  std::string seed_text;
  if (flags.paper) {
    bundle = reference_fixture();
    spec_json = "paper";
  } else {
    SimSpec spec;
    if (!flags.spec_file.empty()) {
      spec = spec_from_json(flags.spec_file);
      if (flags.seed_set) spec.seed = flags.seed;
    } else {
      spec.n_class0 = flags.n0;
      spec.n_class1 = flags.n1;
      spec.error_overlap = flags.overlap;
      spec.seed = flags.seed;
      const auto r0 = flags.recall0.empty() ? std::vector<double>{} : parse_number_list(flags.recall0, "--recall0");
      const auto r1 = flags.recall1.empty() ? std::vector<double>{} : parse_number_list(flags.recall1, "--recall1");
      const auto sh = flags.sharpness.empty() ? std::vector<double>{} : parse_number_list(flags.sharpness, "--sharpness");
      if (flags.models < 1) usage_error("--models must be >= 1");
      for (std::size_t m = 0; m < flags.models; ++m) spec.models.push_back(model_spec(m, r0, r1, sh));
    }
    try {
      bundle = simulate(spec);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::simulation) usage_error(e.what());
      throw;
    }
    spec_json = spec_to_json(spec);
    seed_text = " seed=" + std::to_string(spec.seed);
  }

  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create directory " + out_dir + ": " + ec.message());

  const std::vector<std::string> comments = {"generator: " + std::string(kGeneratorId) + seed_text};
  std::vector<std::string> files = {"labels.csv"};
  write_file_atomic(dir / "labels.csv", serialize_labels(bundle.labels, comments));
  for (const auto& model : bundle.models) {
    auto name = model.model_id() + ".csv";
    std::replace(name.begin(), name.end(), ':', '_');
    write_file_atomic(dir / name, serialize_predictions(model, comments));
    files.push_back(name);
  }
  const nlohmann::json sidecar = {{"generator", kGeneratorId},
                                  {"spec", spec_json},
                                  {"provenance", bundle.provenance},
                                  {"files", files},
                                  {"tool_version", kToolVersion}};
  write_file_atomic(dir / "provenance.json", sidecar.dump(2) + "\n");
  out << "wrote " << files.size() << " files and provenance.json to " << out_dir << "\n";
  return 0;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(ErrorKind::io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot rename onto " + path.string());
  }
}

std::vector<ComparisonRow> build_comparison(const AlignedPanel& panel, const WeightVector& weights, double threshold) {
  check_threshold(threshold);
  const std::size_t n = panel.sample_count();
  const std::size_t m = panel.model_count();
  std::vector<ComparisonRow> rows;
  std::vector<std::uint8_t> decisions(n);
  for (std::size_t k = 0; k < m; ++k) {
    kernels::threshold_column(panel.score_matrix(), m, k, threshold, decisions);
    rows.push_back(comparison_row(panel.models()[k].model_id(), panel_confusion(panel, decisions)));
  }
  for (auto strategy : {Strategy::plain_average, Strategy::weighted_average, Strategy::majority_vote}) {
    FusionConfig config{strategy, threshold, weights};
    const auto fused = decisions_of(fuse_panel(panel, config), threshold);
    rows.push_back(comparison_row(ensemble_model_id(strategy), confusion(panel.labels(), fused)));
  }
  sort_comparison(rows);
  return rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fuse and evaluate binary classifier probability outputs", "fusekit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  PanelInputs eval_in, fuse_in, cmp_in;
  CommonFlags eval_flags, fuse_flags, cmp_flags;
  WeightFlags fuse_weights, cmp_weights;
  std::string eval_model_id;
  std::string strategy = "weighted_average";
  std::string report_path;

  auto* evaluate = app.add_subcommand("evaluate", "Classification report and confusion matrix for one model");
  evaluate->add_option("labels", eval_in.labels_path, "Label file (sample_id,label)")->required();
  evaluate->add_option("predictions", eval_in.prediction_paths, "Prediction file (sample_id,score)")
      ->required()
      ->expected(1);
  evaluate->add_option("--model-id", eval_model_id, "Model id (overrides a '# model:' line)");
  add_common(evaluate, eval_flags);
  evaluate->add_option("--out", eval_flags.out, "Write the report here instead of stdout");

  auto* fuse = app.add_subcommand("fuse", "Fuse several models' predictions and evaluate the ensemble");
  fuse->add_option("labels", fuse_in.labels_path, "Label file")->required();
  fuse->add_option("predictions", fuse_in.prediction_paths, "Prediction files")->required();
  fuse->add_option("--model-id", fuse_in.model_ids, "Model id per prediction file, in order");
  fuse->add_option("--strategy", strategy, "weighted_average, plain_average or majority_vote")->capture_default_str();
  fuse->add_option("--weights", fuse_weights.explicit_list, "Explicit weights w1,w2,...");
  fuse->add_option("--weights-from", fuse_weights.source_list,
                   "Derive weights as accuracies on labels,preds1,preds2,...");
  add_common(fuse, fuse_flags);
  fuse->add_option("--out", fuse_flags.out, "Fused prediction (or decision) file to write")->required();
  fuse->add_option("--report", report_path, "Write the report here instead of stdout");

  auto* compare = app.add_subcommand("compare", "Compare single models against every fusion strategy");
  compare->add_option("labels", cmp_in.labels_path, "Label file")->required();
  compare->add_option("predictions", cmp_in.prediction_paths, "Prediction files (at least 2)")->required();
  compare->add_option("--model-id", cmp_in.model_ids, "Model id per prediction file, in order");
  compare->add_option("--weights", cmp_weights.explicit_list, "Explicit weights w1,w2,...");
  compare->add_option("--weights-from", cmp_weights.source_list,
                      "Derive weights as accuracies on labels,preds1,preds2,...");
  add_common(compare, cmp_flags);
  compare->add_option("--out", cmp_flags.out, "Write the table here instead of stdout");

  SimFlags sim;
  std::string sim_out;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write a synthetic or reference fixture");
  simulate_cmd->add_option("--out", sim_out, "Output directory")->required();
  simulate_cmd->add_flag("--paper", sim.paper, "Reference fixture reconstructed from the published BreakHis tables");
  simulate_cmd->add_option("--spec", sim.spec_file, "JSON simulation spec");
  simulate_cmd->add_option("--models", sim.models, "Number of models")->capture_default_str();
  simulate_cmd->add_option("--n0", sim.n0, "Class-0 samples")->capture_default_str();
  simulate_cmd->add_option("--n1", sim.n1, "Class-1 samples")->capture_default_str();
  simulate_cmd->add_option("--recall0", sim.recall0, "Class-0 recall, one value or one per model");
  simulate_cmd->add_option("--recall1", sim.recall1, "Class-1 recall, one value or one per model");
  simulate_cmd->add_option("--sharpness", sim.sharpness, "Confidence sharpness, one value or one per model");
  simulate_cmd->add_option("--overlap", sim.overlap, "Shared error fraction in [0,1]")->capture_default_str();
  auto* seed_opt = simulate_cmd->add_option("--seed", sim.seed, "Generator seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << (dynamic_cast<const CLI::CallForVersion*>(&e) ? e.what() + std::string("\n") : app.help());
      return 0;
    }
    err << "fusekit: error[usage]: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*evaluate) {
      if (!eval_model_id.empty()) eval_in.model_ids = {eval_model_id};
      return cmd_evaluate(eval_in, eval_flags, out);
    }
    if (*fuse) return cmd_fuse(fuse_in, fuse_flags, fuse_weights, strategy, report_path, out);
    if (*compare) return cmd_compare(cmp_in, cmp_flags, cmp_weights, out);
    if (*simulate_cmd) {
      sim.seed_set = seed_opt->count() > 0;
      return cmd_simulate(sim, sim_out, out);
    }
  } catch (const Error& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "fusekit: error[" << to_string(e.kind()) << "]: " << msg << "\n";
    return e.kind() == ErrorKind::usage ? 2 : 1;
  } catch (const std::exception& e) {
    err << "fusekit: error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace fusekit::cli

#include "daelstm/cli/commands.hpp"

#include <array>

#include "daelstm/data/csv.hpp"
#include "daelstm/errors.hpp"
#include "daelstm/io/checkpoint.hpp"

namespace daelstm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<const char*, 3> kSplits{"train", "validation", "test"};

fs::path work_path(const RunConfig& c, const std::string& file) { return fs::path(c.work_dir) / file; }

std::string zero_pad(std::size_t v, int width) {
  std::string s = std::to_string(v);
  return std::string(s.size() < static_cast<std::size_t>(width) ? width - s.size() : 0, '0') + s;
}

json read_json(const fs::path& path) {
  json doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return doc;
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

std::vector<MotionSequence> normalized_all(const std::vector<MotionSequence>& raw, const NormalizationStats& stats) {
  std::vector<MotionSequence> out;
  out.reserve(raw.size());
  for (const auto& s : raw) out.push_back(normalize(s, stats));
  return out;
}

std::vector<MotionSequence> load_dir(const fs::path& dir, std::size_t dims) {
  std::vector<MotionSequence> out;
  for (const auto& f : list_csv_files(dir)) {
    MotionSequence s = load_csv(f);
    require_shape(s.dims() == dims, f.string() + ": " + std::to_string(s.dims()) + " columns, expected " +
                                        std::to_string(dims));
    out.push_back(std::move(s));
  }
  return out;
}

void require_checkpoint(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path) || !fs::exists(sidecar_path(path))) {
    throw StagingError("missing checkpoint " + path.string() + "; run `" + producer + "` first");
  }
}

NormalizationStats stats_from(const json& metadata) {
  if (!metadata.contains("normalization")) throw DataError("checkpoint metadata lacks normalization statistics");
  return NormalizationStats::from_json(metadata.at("normalization"));
}

json stage_metadata(const RunConfig& config, const Dataset& data, std::string_view tag, const json& settings) {
  return {{"seed", config.seed},
          {"stage", tag},
          {"stage_seed", config.stage_seed(tag)},
          {"fps", data.fps},
          {"normalization", data.stats.to_json()},
          {"settings", settings}};
}

MotionSequence normalized_seed(const RunConfig& config, const fs::path& csv, const NormalizationStats& stats) {
  const MotionSequence raw = load_csv(csv);
  if (raw.length() < config.eval.protocol.seed_frames) {
    throw DataError("seed file " + csv.string() + " has " + std::to_string(raw.length()) + " frames, need " +
                    std::to_string(config.eval.protocol.seed_frames));
  }
  require_shape(raw.dims() == stats.dims(), "seed file width differs from the model");
  MotionSequence s = normalize(raw, stats);
  s.frames = s.frames.slice_rows(0, config.eval.protocol.seed_frames);
  return s;
}

}  // namespace

NormalizationStats fit_split_stats(const DatasetSplit& split) { return fit_normalization(split.train); }

std::size_t cmd_gen_data(const RunConfig& config) {
  config.validate();
  const auto& ds = config.dataset;
  Rng rng(config.stage_seed("gen-data"));

  std::vector<MotionSequence> sequences;
  std::vector<std::string> names;
  SkeletonSpec skeleton;
  json roster_doc = nullptr;
  if (ds.source == "synthetic") {
    const SyntheticRoster roster = ds.roster.empty()
                                       ? default_roster(config.stage_seed("roster"))
                                       : SyntheticRoster::from_json(read_json(ds.roster));
    skeleton = roster.skeleton;
    roster_doc = roster.to_json();
    for (const auto& cls : roster.classes) {
      for (std::size_t k = 0; k < ds.sequences_per_class; ++k) {
        sequences.push_back(downsample(generate_synthetic(cls, ds.duration_s, ds.source_fps, rng), ds.downsample));
        names.push_back(cls.name + "_" + zero_pad(k, 3));
      }
    }
  } else {
    skeleton = SkeletonSpec::from_json(read_json(ds.skeleton));
    for (const auto& f : list_csv_files(ds.csv_dir)) {
      MotionSequence s = load_csv(f);
      require_shape(s.dims() == skeleton.total_dims(), f.string() + ": width differs from the skeleton");
      sequences.push_back(downsample(s, ds.downsample));
      names.push_back(f.stem().string());
    }
  }
  if (sequences.empty()) throw ConfigError("dataset: no sequences requested");

  std::vector<std::optional<int>> labels;
  for (const auto& s : sequences) labels.push_back(s.label);
  const SplitIndices idx = split_indices(labels, ds.validation_fraction, ds.test_fraction, rng);
  const std::array<const std::vector<std::size_t>*, 3> parts{&idx.train, &idx.validation, &idx.test};
  if (idx.train.empty()) throw ConfigError("dataset: the training split is empty");

  DatasetSplit split;
  for (std::size_t i : idx.train) split.train.push_back(sequences[i]);
  const NormalizationStats stats = fit_split_stats(split);

  const fs::path root(ds.dir);
  std::error_code ec;
  for (const char* part : kSplits) {
    fs::remove_all(root / part, ec);
    fs::create_directories(root / part, ec);
    if (ec) throw DataError("cannot create " + (root / part).string() + ": " + ec.message());
  }
  json files = json::object();
  const auto header = skeleton.feature_names();
  for (std::size_t p = 0; p < kSplits.size(); ++p) {
    json list = json::array();
    for (std::size_t i : *parts[p]) {
      const fs::path rel = fs::path(kSplits[p]) / (names[i] + ".csv");
      save_csv(root / rel, sequences[i], header);
      list.push_back(rel.generic_string());
    }
    files[kSplits[p]] = list;
  }
  write_json(root / "dataset.json", {{"seed", config.seed},
                                     {"source", ds.source},
                                     {"fps", sequences.front().fps},
                                     {"skeleton", skeleton.to_json()},
                                     {"roster", roster_doc},
                                     {"normalization", stats.to_json()},
                                     {"files", files}});
  return sequences.size();
}

Dataset load_dataset(const RunConfig& config) {
  const fs::path root(config.dataset.dir);
  if (!fs::exists(root / "dataset.json")) {
    throw StagingError("no dataset at " + root.string() + "; run `gen-data` first");
  }
  const json doc = read_json(root / "dataset.json");
  Dataset data;
  data.skeleton = SkeletonSpec::from_json(doc.at("skeleton"));
  data.stats = NormalizationStats::from_json(doc.at("normalization"));
  data.fps = doc.at("fps").get<double>();
  const std::array<std::vector<MotionSequence>*, 3> targets{&data.train, &data.validation, &data.test};
  for (std::size_t p = 0; p < kSplits.size(); ++p) {
    for (const auto& rel : doc.at("files").at(kSplits[p])) {
      const MotionSequence raw = load_csv(root / rel.get<std::string>());
      require_shape(raw.dims() == data.skeleton.total_dims(), rel.get<std::string>() + ": width differs");
      targets[p]->push_back(normalize(raw, data.stats));
    }
  }
  if (data.train.empty()) throw DataError("dataset has no training sequences");
  return data;
}

Stage stage_from_name(std::string_view name) {
  if (name == "dae") return Stage::Dae;
  if (name == "lstm") return Stage::Lstm;
  if (name == "finetune") return Stage::Finetune;
  throw ConfigError("unknown training stage '" + std::string(name) + "'");
}

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::Dae: return "dae";
    case Stage::Lstm: return "lstm";
    case Stage::Finetune: return "finetune";
  }
  return "";
}

TrainingReport cmd_train(const RunConfig& config, Stage stage) {
  config.validate();
  const json cfg = config.to_json();
  if (stage == Stage::Finetune) {
    require_checkpoint(work_path(config, "dae.ckpt"), "train dae");
    require_checkpoint(work_path(config, "lstm.ckpt"), "train lstm");
  }
  const Dataset data = load_dataset(config);
  const std::string tag(stage_name(stage));
  Rng rng(config.stage_seed(tag));
  TrainingReport report;
  if (stage == Stage::Dae) {
    DaeModel model = DaeModel::create(data.skeleton, config.dae.width, config.dae.hidden_layers, rng);
    report = train_dae(model, data.train, data.validation, config.dae.train, rng);
    save_dae(work_path(config, "dae.ckpt"), model, stage_metadata(config, data, tag, cfg.at("dae")));
  } else if (stage == Stage::Lstm) {
    Lstm3Model model = Lstm3Model::create(data.skeleton.total_dims(), config.lstm.hidden, rng);
    report = train_lstm(model, data.train, data.validation, config.lstm.train, rng);
    save_lstm(work_path(config, "lstm.ckpt"), model, stage_metadata(config, data, tag, cfg.at("lstm")));
  } else {
    json dae_meta, lstm_meta;
    StackedModel model{load_lstm(work_path(config, "lstm.ckpt"), &lstm_meta),
                       load_dae(work_path(config, "dae.ckpt"), &dae_meta)};
    model.validate();
    report = finetune(model, data.train, data.validation, config.finetune, rng);
    json meta = stage_metadata(config, data, tag, cfg.at("finetune"));
    meta["lineage"] = {{"dae", dae_meta}, {"lstm", lstm_meta}};
    save_stacked(work_path(config, "stacked.ckpt"), model, meta);
  }
  write_json(work_path(config, tag + "_report.json"), report.to_json());
  return report;
}

ClassifierResult cmd_train_classifier(const RunConfig& config) {
  config.validate();
  const Dataset data = load_dataset(config);
  std::vector<MotionSequence> held_out = data.validation;
  held_out.insert(held_out.end(), data.test.begin(), data.test.end());
  int max_label = -1;
  for (const auto& s : data.train) {
    if (!s.label) throw DataError("classifier training needs labelled sequences");
    max_label = std::max(max_label, *s.label);
  }
  Rng rng(config.stage_seed("classifier"));
  ClassifierModel model = ClassifierModel::create(data.skeleton.total_dims(), config.classifier.hidden,
                                                  static_cast<std::size_t>(std::max(max_label + 1, 2)), rng);
  ClassifierResult result = train_classifier(model, data.train, held_out, config.classifier, rng);
  json meta = stage_metadata(config, data, "classifier", config.to_json().at("classifier"));
  meta["held_out_accuracy"] = result.held_out_accuracy;
  save_classifier(work_path(config, "classifier.ckpt"), model, meta);
  json doc = result.report.to_json();
  doc["held_out_accuracy"] = result.held_out_accuracy;
  write_json(work_path(config, "classifier_report.json"), doc);
  return result;
}

fs::path cmd_predict(const RunConfig& config, const PredictOptions& options) {
  config.validate();
  const fs::path ckpt = options.checkpoint.empty() ? work_path(config, "stacked.ckpt") : options.checkpoint;
  require_checkpoint(ckpt, "train finetune");
  if (options.seed_csv.empty()) throw ConfigError("predict needs a seed CSV");
  const std::string kind = read_checkpoint_info(ckpt).kind;
  json meta;
  std::optional<StackedModel> stacked;
  std::optional<Lstm3Model> lstm;
  if (kind == "stacked") {
    stacked = load_stacked(ckpt, &meta);
  } else if (kind == "lstm") {
    if (options.filtered) throw ConfigError("an lstm checkpoint has no filter; pass --unfiltered");
    lstm = load_lstm(ckpt, &meta);
  } else {
    throw ConfigError("predict needs a stacked or lstm checkpoint, got '" + kind + "'");
  }
  const NormalizationStats stats = stats_from(meta);
  const MotionSequence seed = normalized_seed(config, options.seed_csv, stats);
  const std::size_t horizon = config.eval.protocol.rollout_frames;
  MotionSequence out = stacked && options.filtered
                           ? rollout_filtered(*stacked, seed.frames, horizon, seed.fps)
                           : rollout_unfiltered(stacked ? stacked->lstm : *lstm, seed.frames, horizon, seed.fps);
  out = denormalize(out, stats);
  out.label = seed.label;
  const fs::path path = options.output.empty() ? work_path(config, "prediction.csv") : options.output;
  std::vector<std::string> names;
  if (stacked) names = stacked->dae.skeleton().feature_names();
  save_csv(path, out, names);
  return path;
}

EvaluationResult cmd_evaluate(const RunConfig& config, const EvaluateOptions& options) {
  config.validate();
  const fs::path ckpt = options.checkpoint.empty() ? work_path(config, "stacked.ckpt") : options.checkpoint;
  const fs::path cls_path = options.classifier.empty() ? work_path(config, "classifier.ckpt") : options.classifier;
  require_checkpoint(ckpt, "train finetune");
  require_checkpoint(cls_path, "train-classifier");
  const fs::path test_dir = options.test_dir.empty() ? fs::path(config.dataset.dir) / "test" : options.test_dir;
  if (!fs::is_directory(test_dir)) throw ConfigError("test directory " + test_dir.string() + " does not exist");

  json meta;
  const StackedModel model = load_stacked(ckpt, &meta);
  const ClassifierModel classifier = load_classifier(cls_path);
  const NormalizationStats stats = stats_from(meta);
  std::optional<Lstm3Model> baseline;
  fs::path baseline_path;
  if (options.baseline) {
    baseline_path = *options.baseline;
    require_checkpoint(baseline_path, "train lstm");
    baseline = load_lstm(baseline_path);
  } else if (fs::exists(work_path(config, "lstm.ckpt"))) {
    baseline_path = work_path(config, "lstm.ckpt");
    baseline = load_lstm(baseline_path);
  }

  const std::vector<MotionSequence> test = normalized_all(load_dir(test_dir, stats.dims()), stats);
  if (test.empty()) throw DataError("test directory " + test_dir.string() + " holds no CSV files");

  const Lstm3Model* base = baseline ? &*baseline : nullptr;
  EvaluationResult r;
  r.ablation = ablation_report(model, test, config.eval.protocol, &stats, base);
  r.longevity = longevity_report(model, classifier, test, config.eval.protocol, config.eval.longevity_threshold,
                                 config.eval.warmup_s, base);

  const auto per_class = r.longevity.per_class();
  json headline = nullptr;
  if (const auto it = per_class.find(config.eval.periodic_class); it != per_class.end()) {
    headline = {{"class", it->first},
                {"filtered_s", it->second.filtered},
                {"unfiltered_s", it->second.unfiltered},
                {"baseline_s", it->second.baseline ? json(*it->second.baseline) : json(nullptr)}};
  }
  r.document = {{"format", "daelstm-evaluation"},
                {"version", 1},
                {"checkpoint", ckpt.generic_string()},
                {"classifier", cls_path.generic_string()},
                {"baseline", baseline ? json(baseline_path.generic_string()) : json(nullptr)},
                {"protocol", config.to_json().at("eval")},
                {"ablation", r.ablation.to_json()},
                {"longevity", r.longevity.to_json()},
                {"periodic_longevity", headline}};
  const fs::path out = options.output_dir.empty() ? work_path(config, "eval") : options.output_dir;
  write_file(out / "metrics.csv", r.ablation.to_csv());
  write_json(out / "report.json", r.document);
  return r;
}

int exit_code_for(const std::exception& error) {
  if (dynamic_cast<const ConfigError*>(&error) != nullptr) return 2;
  if (dynamic_cast<const StagingError*>(&error) != nullptr) return 3;
  if (dynamic_cast<const DivergenceError*>(&error) != nullptr) return 4;
  return 1;
}

}  // namespace daelstm::cli

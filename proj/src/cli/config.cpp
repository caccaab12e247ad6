#include "daelstm/cli/config.hpp"

#include <fstream>

#include "daelstm/errors.hpp"
#include "daelstm/nn/rng.hpp"

namespace daelstm::cli {

namespace {

using nlohmann::json;

void merge_strict(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("config section '" + path + "' must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object() && !slot.empty()) {
      merge_strict(slot, it.value(), key);
    } else {
      slot = it.value();
    }
  }
}

template <typename T>
T get(const json& doc, const char* key, const std::string& section) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + section + "." + key + "' has the wrong type");
  }
}

json optimizer_json(const OptimizerConfig& o) {
  return {{"method", optimizer_method_name(o.method)},
          {"learning_rate", o.learning_rate},
          {"patience", o.patience},
          {"l2", o.l2}};
}

OptimizerConfig optimizer_from(const json& doc, const std::string& section) {
  OptimizerConfig o;
  o.method = optimizer_method_from_name(get<std::string>(doc, "method", section));
  o.learning_rate = get<double>(doc, "learning_rate", section);
  o.patience = get<std::size_t>(doc, "patience", section);
  o.l2 = get<double>(doc, "l2", section);
  return o;
}

CurriculumSchedule schedule_from(const json& doc, const std::string& section) {
  try {
    return CurriculumSchedule::from_json(doc);
  } catch (const json::exception&) {
    throw ConfigError("config section '" + section + "' is malformed");
  }
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

json RunConfig::to_json() const {
  const auto& d = dataset;
  const auto& c = classifier;
  const auto& p = eval.protocol;
  return {
      {"seed", seed},
      {"work_dir", work_dir},
      {"dataset",
       {{"dir", d.dir},
        {"source", d.source},
        {"csv_dir", d.csv_dir},
        {"roster", d.roster},
        {"skeleton", d.skeleton},
        {"sequences_per_class", d.sequences_per_class},
        {"duration_s", d.duration_s},
        {"source_fps", d.source_fps},
        {"downsample", d.downsample},
        {"validation_fraction", d.validation_fraction},
        {"test_fraction", d.test_fraction}}},
      {"dae",
       {{"width", dae.width},
        {"hidden_layers", dae.hidden_layers},
        {"epochs", dae.train.epochs},
        {"batch_size", dae.train.batch_size},
        {"internal_dropout", dae.train.internal_dropout},
        {"dropout_anneal", dae.train.dropout_anneal},
        {"schedule", dae.train.schedule.to_json()},
        {"optimizer", optimizer_json(dae.train.optimizer)}}},
      {"lstm",
       {{"hidden", lstm.hidden},
        {"epochs", lstm.train.epochs},
        {"window", lstm.train.window},
        {"clip_norm", lstm.train.clip_norm},
        {"schedule", lstm.train.schedule.to_json()},
        {"optimizer", optimizer_json(lstm.train.optimizer)}}},
      {"finetune",
       {{"method", optimizer_method_name(finetune.method)},
        {"learning_rate", finetune.learning_rate},
        {"epochs", finetune.epochs},
        {"schedule", finetune.schedule},
        {"internal_dropout", finetune.internal_dropout},
        {"lstm_loss_weight", finetune.lstm_loss_weight},
        {"dae_loss_weight", finetune.dae_loss_weight},
        {"window", finetune.window},
        {"clip_norm", finetune.clip_norm},
        {"patience", finetune.patience}}},
      {"classifier",
       {{"hidden", c.hidden},
        {"epochs", c.epochs},
        {"crops_per_sequence", c.crops_per_sequence},
        {"min_crop_s", c.min_crop_s},
        {"max_crop_s", c.max_crop_s},
        {"eval_crops", c.eval_crops},
        {"clip_norm", c.clip_norm},
        {"optimizer", optimizer_json(c.optimizer)}}},
      {"eval",
       {{"horizons_ms", p.horizons_ms},
        {"seed_frames", p.seed_frames},
        {"rollout_frames", p.rollout_frames},
        {"tail_frames", p.tail_frames},
        {"curve_window", p.curve_window},
        {"longevity_threshold", eval.longevity_threshold},
        {"warmup_s", eval.warmup_s},
        {"periodic_class", eval.periodic_class}}},
  };
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig cfg;
  json merged = cfg.to_json();
  merge_strict(merged, doc, "");

  cfg.seed = get<std::uint64_t>(merged, "seed", "");
  cfg.work_dir = get<std::string>(merged, "work_dir", "");

  const json& d = merged["dataset"];
  auto& ds = cfg.dataset;
  ds.dir = get<std::string>(d, "dir", "dataset");
  ds.source = get<std::string>(d, "source", "dataset");
  ds.csv_dir = get<std::string>(d, "csv_dir", "dataset");
  ds.roster = get<std::string>(d, "roster", "dataset");
  ds.skeleton = get<std::string>(d, "skeleton", "dataset");
  ds.sequences_per_class = get<std::size_t>(d, "sequences_per_class", "dataset");
  ds.duration_s = get<double>(d, "duration_s", "dataset");
  ds.source_fps = get<double>(d, "source_fps", "dataset");
  ds.downsample = get<std::size_t>(d, "downsample", "dataset");
  ds.validation_fraction = get<double>(d, "validation_fraction", "dataset");
  ds.test_fraction = get<double>(d, "test_fraction", "dataset");

  const json& a = merged["dae"];
  cfg.dae.width = get<std::size_t>(a, "width", "dae");
  cfg.dae.hidden_layers = get<std::size_t>(a, "hidden_layers", "dae");
  cfg.dae.train.epochs = get<std::size_t>(a, "epochs", "dae");
  cfg.dae.train.batch_size = get<std::size_t>(a, "batch_size", "dae");
  cfg.dae.train.internal_dropout = get<double>(a, "internal_dropout", "dae");
  cfg.dae.train.dropout_anneal = get<double>(a, "dropout_anneal", "dae");
  cfg.dae.train.schedule = schedule_from(a["schedule"], "dae.schedule");
  cfg.dae.train.optimizer = optimizer_from(a["optimizer"], "dae.optimizer");

  const json& l = merged["lstm"];
  cfg.lstm.hidden = get<std::size_t>(l, "hidden", "lstm");
  cfg.lstm.train.epochs = get<std::size_t>(l, "epochs", "lstm");
  cfg.lstm.train.window = get<std::size_t>(l, "window", "lstm");
  cfg.lstm.train.clip_norm = get<double>(l, "clip_norm", "lstm");
  cfg.lstm.train.schedule = schedule_from(l["schedule"], "lstm.schedule");
  cfg.lstm.train.optimizer = optimizer_from(l["optimizer"], "lstm.optimizer");

  const json& f = merged["finetune"];
  auto& ft = cfg.finetune;
  ft.method = optimizer_method_from_name(get<std::string>(f, "method", "finetune"));
  ft.learning_rate = get<double>(f, "learning_rate", "finetune");
  ft.epochs = get<std::size_t>(f, "epochs", "finetune");
  ft.schedule = get<Vector>(f, "schedule", "finetune");
  ft.internal_dropout = get<double>(f, "internal_dropout", "finetune");
  ft.lstm_loss_weight = get<double>(f, "lstm_loss_weight", "finetune");
  ft.dae_loss_weight = get<double>(f, "dae_loss_weight", "finetune");
  ft.window = get<std::size_t>(f, "window", "finetune");
  ft.clip_norm = get<double>(f, "clip_norm", "finetune");
  ft.patience = get<std::size_t>(f, "patience", "finetune");

  const json& c = merged["classifier"];
  auto& cl = cfg.classifier;
  cl.hidden = get<std::size_t>(c, "hidden", "classifier");
  cl.epochs = get<std::size_t>(c, "epochs", "classifier");
  cl.crops_per_sequence = get<std::size_t>(c, "crops_per_sequence", "classifier");
  cl.min_crop_s = get<double>(c, "min_crop_s", "classifier");
  cl.max_crop_s = get<double>(c, "max_crop_s", "classifier");
  cl.eval_crops = get<std::size_t>(c, "eval_crops", "classifier");
  cl.clip_norm = get<double>(c, "clip_norm", "classifier");
  cl.optimizer = optimizer_from(c["optimizer"], "classifier.optimizer");

  const json& e = merged["eval"];
  auto& p = cfg.eval.protocol;
  p.horizons_ms = get<Vector>(e, "horizons_ms", "eval");
  p.seed_frames = get<std::size_t>(e, "seed_frames", "eval");
  p.rollout_frames = get<std::size_t>(e, "rollout_frames", "eval");
  p.tail_frames = get<std::size_t>(e, "tail_frames", "eval");
  p.curve_window = get<std::size_t>(e, "curve_window", "eval");
  cfg.eval.longevity_threshold = get<double>(e, "longevity_threshold", "eval");
  cfg.eval.warmup_s = get<double>(e, "warmup_s", "eval");
  cfg.eval.periodic_class = get<int>(e, "periodic_class", "eval");

  cfg.validate();
  return cfg;
}

void RunConfig::validate() const {
  require(!work_dir.empty(), "work_dir must not be empty");
  const auto& d = dataset;
  require(!d.dir.empty(), "dataset.dir must not be empty");
  require(d.source == "synthetic" || d.source == "csv", "dataset.source must be 'synthetic' or 'csv'");
  if (d.source == "csv") {
    require(!d.csv_dir.empty() && std::filesystem::is_directory(d.csv_dir),
            "dataset.csv_dir '" + d.csv_dir + "' is not a directory");
    require(!d.skeleton.empty(), "dataset.skeleton is required for csv sources");
  }
  if (!d.roster.empty()) require(std::filesystem::is_regular_file(d.roster), "dataset.roster '" + d.roster + "' not found");
  if (!d.skeleton.empty()) {
    require(std::filesystem::is_regular_file(d.skeleton), "dataset.skeleton '" + d.skeleton + "' not found");
  }
  require(d.sequences_per_class >= 1, "dataset.sequences_per_class must be at least 1");
  require(d.duration_s > 0.0, "dataset.duration_s must be positive");
  require(d.source_fps > 0.0, "dataset.source_fps must be positive");
  require(d.downsample >= 1, "dataset.downsample must be at least 1");
  require(d.validation_fraction >= 0.0 && d.test_fraction >= 0.0 &&
              d.validation_fraction + d.test_fraction < 1.0,
          "dataset split fractions must be nonnegative and sum below 1");

  require(dae.width >= 1, "dae.width must be positive");
  require(dae.hidden_layers >= 1, "dae.hidden_layers must be at least 1");
  dae.train.validate();
  require(lstm.hidden >= 1, "lstm.hidden must be positive");
  lstm.train.validate();
  finetune.validate();
  classifier.validate();
  eval.protocol.validate();
  require(eval.longevity_threshold > 0.0 && eval.longevity_threshold < 1.0, "eval.longevity_threshold must be in (0, 1)");
  require(eval.warmup_s >= 0.0, "eval.warmup_s must be nonnegative");
  const double fps = d.source_fps / static_cast<double>(d.downsample);
  for (double h : eval.protocol.horizons_ms) {
    require(h * fps / 1000.0 >= 0.5, "eval horizon " + std::to_string(h) + " ms is shorter than one frame");
  }
}

std::uint64_t RunConfig::stage_seed(std::string_view tag) const { return derive_seed(seed, tag); }

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override key '" + key + "' is malformed");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

nlohmann::json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config " + path.string() + " is not a JSON object");
  return doc;
}

}  // namespace daelstm::cli

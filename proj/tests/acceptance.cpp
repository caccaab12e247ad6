// End-to-end acceptance run on the pinned synthetic fixture. Prints one
// [PASS]/[FAIL] line per criterion and exits non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "daelstm/cli/commands.hpp"
#include "daelstm/data/csv.hpp"
#include "daelstm/io/checkpoint.hpp"
#include "support/gradient_cases.hpp"

namespace fs = std::filesystem;
using namespace daelstm;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string details;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

class Report {
 public:
  void record(int id, const std::string& name, const Outcome& o) {
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << id << " " << name << ": " << o.details << std::endl;
    all_pass_ = all_pass_ && o.pass;
  }
  // A criterion whose evaluation throws is a failure, not a crash.
  void run(int id, const std::string& name, const std::function<Outcome()>& fn) {
    try {
      record(id, name, fn());
    } catch (const std::exception& e) {
      record(id, name, {false, std::string("threw: ") + e.what()});
    }
  }
  bool all_pass() const { return all_pass_; }

 private:
  bool all_pass_ = true;
};

int cli(const fs::path& cwd, const fs::path& config, std::vector<std::string> args) {
  const fs::path saved = fs::current_path();
  fs::current_path(cwd);
  args.insert(args.begin(), {"daelstm", "-c", config.string()});
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data());
  fs::current_path(saved);
  return code;
}

// Whole pipeline with the work and data directories given relative to `root`,
// so two runs in different roots emit identical bytes.
void run_pipeline(const fs::path& root, const fs::path& config) {
  fs::remove_all(root);
  fs::create_directories(root);
  const std::vector<std::vector<std::string>> steps{
      {"gen-data"}, {"train", "dae"}, {"train", "lstm"}, {"train", "finetune"}, {"train-classifier"}, {"evaluate"}};
  for (const auto& step : steps) {
    const int code = cli(root, config, step);
    if (code != 0) throw std::runtime_error("pipeline step '" + step.front() + "' exited with " + std::to_string(code));
  }
}

cli::RunConfig config_in(const fs::path& root, const fs::path& config) {
  cli::RunConfig c = cli::RunConfig::from_json(cli::read_config_file(config));
  c.work_dir = (root / c.work_dir).string();
  c.dataset.dir = (root / c.dataset.dir).string();
  return c;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

double horizon_error_at(const nlohmann::json& mode, double ms) {
  for (const auto& e : mode.at("metrics").at("errors")) {
    if (e.at("horizon_ms").get<double>() == ms) return e.at("error").get<double>();
  }
  throw std::runtime_error("horizon " + fmt(ms) + " missing from report");
}

std::vector<MotionSequence> load_raw_split(const fs::path& data_dir, const char* split) {
  std::vector<MotionSequence> out;
  for (const auto& f : list_csv_files(data_dir / split)) out.push_back(load_csv(f));
  return out;
}

Outcome gradient_fidelity() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string where;
  std::size_t checked = 0;
  const std::pair<const char*, testing::GradCheckResult (*)(std::uint64_t)> cases[] = {
      {"dense", testing::gradcheck_dense},
      {"lstm", testing::gradcheck_lstm},
      {"dae", testing::gradcheck_dae},
      {"finetune", testing::gradcheck_finetune},
  };
  for (const auto& [name, fn] : cases) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const testing::GradCheckResult r = fn(seed);
      checked += r.checked;
      if (r.max_rel_error >= worst) {
        worst = r.max_rel_error;
        where = std::string(name) + ":" + r.worst;
      }
    }
  }
  const double elapsed = seconds_since(start);
  return {worst < 1e-5 && elapsed < 10.0 && checked > 0,
          "max relative error " + fmt(worst) + " (" + where + ") over " + std::to_string(checked) +
              " entries in " + fmt(elapsed) + " s (limits 1e-05, 10 s)"};
}

Outcome robustness_ordering(const cli::RunConfig& config, const cli::Dataset& data) {
  const auto start = Clock::now();
  const double rates[] = {0.3, 0.5};
  const CurriculumSchedule schedules[] = {CurriculumSchedule::dropout_noise(), CurriculumSchedule::gaussian_only(),
                                          CurriculumSchedule::none()};
  std::vector<std::vector<std::pair<double, double>>> curves;
  for (const auto& schedule : schedules) {
    Rng rng(config.stage_seed("robustness"));
    DaeModel model = DaeModel::create(data.skeleton, config.dae.width, config.dae.hidden_layers, rng);
    DaeTrainConfig train = config.dae.train;
    train.schedule = schedule;
    // Every arm keeps the same internal dropout so only the input corruption differs.
    train.dropout_anneal = 1.0;
    train_dae(model, data.train, data.validation, train, rng);
    curves.push_back(reconstruction_error_curve(model, data.test, rates, config.stage_seed("robustness-eval")));
  }
  const double elapsed = seconds_since(start);
  bool ordered = true;
  std::string details;
  for (std::size_t i = 0; i < 2; ++i) {
    const double dae = curves[0][i].second, gauss = curves[1][i].second, vanilla = curves[2][i].second;
    ordered = ordered && dae < gauss && gauss < vanilla;
    details += "rate " + fmt(rates[i]) + ": dae " + fmt(dae) + " gaussian " + fmt(gauss) + " vanilla " +
               fmt(vanilla) + "; ";
  }
  return {ordered && elapsed < 600.0, details + "training " + fmt(elapsed) + " s (limit 600 s)"};
}

Outcome filtering_ablation(const nlohmann::json& report) {
  const auto& a = report.at("ablation");
  if (a.at("baseline").is_null()) return {false, "report has no baseline mode"};
  const double f80 = horizon_error_at(a.at("filtered"), 80.0), u80 = horizon_error_at(a.at("unfiltered"), 80.0);
  const double f160 = horizon_error_at(a.at("filtered"), 160.0), u160 = horizon_error_at(a.at("unfiltered"), 160.0);
  const double fv = a.at("filtered").at("tail_variance").get<double>();
  const double bv = a.at("baseline").at("tail_variance").get<double>();
  const bool pass = f80 <= u80 && f160 <= u160 && fv > bv;
  return {pass, "80 ms filtered " + fmt(f80) + " vs unfiltered " + fmt(u80) + "; 160 ms " + fmt(f160) + " vs " +
                    fmt(u160) + "; tail variance filtered " + fmt(fv) + " vs baseline " + fmt(bv)};
}

Outcome longevity_ordering(const nlohmann::json& report, const nlohmann::json& classifier_report) {
  const double accuracy = classifier_report.at("held_out_accuracy").get<double>();
  const auto& p = report.at("periodic_longevity");
  const double filtered = p.at("filtered_s").get<double>();
  if (p.at("baseline_s").is_null()) return {false, "report has no baseline longevity"};
  const double baseline = p.at("baseline_s").get<double>();
  const double rollout = report.at("longevity").at("rollout_s").get<double>();
  const bool pass = accuracy >= 0.9 && filtered >= baseline && filtered >= 8.0 && rollout == 12.0;
  return {pass, "class " + p.at("class").dump() + ": filtered " + fmt(filtered) + " s, baseline " + fmt(baseline) +
                    " s of a " + fmt(rollout) + " s rollout; classifier held-out accuracy " + fmt(accuracy)};
}

Outcome protocol_fidelity(const cli::RunConfig& config, const cli::Dataset& data) {
  std::vector<std::size_t> idx;
  for (double h : kProtocolHorizonsMs) idx.push_back(horizon_frame_index(h, 25.0));
  const bool indices_ok = idx == std::vector<std::size_t>{2, 4, 8, 14, 25};

  const StackedModel model = load_stacked(fs::path(config.work_dir) / "stacked.ckpt");
  const RolloutProtocol& protocol = config.eval.protocol;
  const MotionSequence& seq = data.test.front();

  // Seed handling of a direct rollout.
  Matrix seed = seq.frames.slice_rows(0, protocol.seed_frames);
  std::size_t steps = 0;
  bool fed_last_seed = false;
  const MotionSequence out = rollout_filtered(model, seed, protocol.rollout_frames, seq.fps,
                                              [&](const RolloutStepInfo& info) {
                                                if (info.step == 0) {
                                                  fed_last_seed = std::equal(info.input.begin(), info.input.end(),
                                                                             seed.row(seed.rows() - 1).begin());
                                                }
                                                ++steps;
                                              });

  // Post-seed ground truth must not reach the predictions.
  std::vector<MotionSequence> poisoned = data.test;
  for (auto& s : poisoned) {
    for (std::size_t t = protocol.seed_frames; t < s.length(); ++t) {
      for (double& v : s.frames.row(t)) v += 1e3;
    }
  }
  const AblationReport clean = ablation_report(model, data.test, protocol, nullptr);
  const AblationReport dirty = ablation_report(model, poisoned, protocol, nullptr);
  const bool no_leak = clean.filtered.variance_curve == dirty.filtered.variance_curve &&
                       clean.unfiltered.variance_curve == dirty.unfiltered.variance_curve &&
                       clean.filtered.metrics.errors != dirty.filtered.metrics.errors;

  const bool pass = indices_ok && protocol.seed_frames == 50 && protocol.rollout_frames == 300 && steps == 300 &&
                    out.length() == 300 && fed_last_seed && no_leak;
  std::ostringstream d;
  d << "indices {";
  for (std::size_t i = 0; i < idx.size(); ++i) d << (i ? "," : "") << idx[i];
  d << "}; seed " << seed.rows() << " frames, " << steps << " steps, " << out.length() << " frames emitted"
    << "; first step fed last seed frame: " << (fed_last_seed ? "yes" : "no")
    << "; predictions independent of post-seed truth: " << (no_leak ? "yes" : "no");
  return {pass, d.str()};
}

std::vector<fs::path> relative_files(const fs::path& root) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), root));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const fs::path& first, const fs::path& second, const fs::path& config_path,
                    const cli::RunConfig& config) {
  run_pipeline(second, config_path);
  const auto a = relative_files(first);
  const auto b = relative_files(second);
  std::size_t differing = 0;
  std::string example;
  for (const auto& f : a) {
    if (!std::binary_search(b.begin(), b.end(), f) || read_file(first / f) != read_file(second / f)) {
      ++differing;
      if (example.empty()) example = f.string();
    }
  }
  const bool files_ok = a == b && differing == 0 && !a.empty();

  // save -> load -> save on every trained checkpoint.
  const fs::path work(config.work_dir);
  const fs::path scratch = second / "resave";
  fs::create_directories(scratch);
  std::size_t exact = 0;
  nlohmann::json meta;
  save_dae(scratch / "dae.ckpt", load_dae(work / "dae.ckpt", &meta), meta);
  save_lstm(scratch / "lstm.ckpt", load_lstm(work / "lstm.ckpt", &meta), meta);
  save_stacked(scratch / "stacked.ckpt", load_stacked(work / "stacked.ckpt", &meta), meta);
  save_classifier(scratch / "classifier.ckpt", load_classifier(work / "classifier.ckpt", &meta), meta);
  for (const char* name : {"dae.ckpt", "lstm.ckpt", "stacked.ckpt", "classifier.ckpt"}) {
    const bool same = read_file(work / name) == read_file(scratch / name) &&
                      read_file(sidecar_path(work / name)) == read_file(sidecar_path(scratch / name));
    exact += same ? 1 : 0;
  }
  return {files_ok && exact == 4, std::to_string(a.size()) + " files compared, " + std::to_string(differing) +
                                      " differ" + (example.empty() ? "" : " (e.g. " + example + ")") +
                                      "; checkpoints bit-exact after save/load/save: " + std::to_string(exact) + "/4"};
}

Outcome normalization(const cli::RunConfig& config) {
  const fs::path data_dir(config.dataset.dir);
  DatasetSplit raw{load_raw_split(data_dir, "train"), load_raw_split(data_dir, "validation"),
                   load_raw_split(data_dir, "test")};
  const NormalizationStats stats = cli::fit_split_stats(raw);
  DatasetSplit poisoned = raw;
  for (auto* split : {&poisoned.validation, &poisoned.test}) {
    for (std::size_t i = 0; i < split->size(); ++i) (*split)[i].frames.fill(i % 2 ? 1e300 : -1e300);
  }
  const bool train_only = cli::fit_split_stats(poisoned) == stats && stats == fit_normalization(raw.train);
  const bool stored = NormalizationStats::from_json(read_json(data_dir / "dataset.json").at("normalization")) == stats;

  double worst = 0.0;
  for (const auto* split : {&raw.train, &raw.validation, &raw.test}) {
    for (const auto& s : *split) {
      const MotionSequence back = denormalize(normalize(s, stats), stats);
      for (std::size_t t = 0; t < s.length(); ++t) {
        for (std::size_t j = 0; j < s.dims(); ++j) {
          if (!stats.is_constant(j)) worst = std::max(worst, std::abs(back.frames(t, j) - s.frames(t, j)));
        }
      }
    }
  }
  return {train_only && stored && worst < 1e-12,
          std::string("statistics unchanged by poisoned held-out splits: ") + (train_only ? "yes" : "no") +
              "; dataset.json statistics match: " + (stored ? "yes" : "no") + "; max round-trip error " + fmt(worst) +
              " (limit 1e-12)"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance run on the pinned synthetic fixture"};
  std::string work_dir = "acceptance_run";
  std::string config_path;
  app.add_option("--work-dir", work_dir, "Scratch directory (replaced)");
  app.add_option("--config", config_path, "Pinned run config")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  const auto start = Clock::now();
  const fs::path root = fs::absolute(work_dir);
  const fs::path config_file = fs::absolute(config_path);
  const fs::path first = root / "first";
  const fs::path second = root / "second";
  Report report;

  report.run(1, "gradient fidelity", gradient_fidelity);

  bool pipeline_ok = true;
  try {
    run_pipeline(first, config_file);
  } catch (const std::exception& e) {
    pipeline_ok = false;
    std::cout << "pipeline failed: " << e.what() << std::endl;
  }
  const cli::RunConfig config = config_in(first, config_file);
  std::cout << "pipeline finished in " << fmt(seconds_since(start)) << " s" << std::endl;

  auto needs_pipeline = [&](const std::function<Outcome()>& fn) {
    return [&, fn] { return pipeline_ok ? fn() : Outcome{false, "pipeline did not complete"}; };
  };

  std::optional<cli::Dataset> data;
  if (pipeline_ok) data = cli::load_dataset(config);
  const fs::path work(config.work_dir);

  report.run(2, "corruption robustness ordering", needs_pipeline([&] { return robustness_ordering(config, *data); }));
  report.run(3, "filtering ablation",
             needs_pipeline([&] { return filtering_ablation(read_json(work / "eval" / "report.json")); }));
  report.run(4, "longevity ordering", needs_pipeline([&] {
               return longevity_ordering(read_json(work / "eval" / "report.json"),
                                         read_json(work / "classifier_report.json"));
             }));
  report.run(5, "protocol fidelity", needs_pipeline([&] { return protocol_fidelity(config, *data); }));
  report.run(6, "determinism and serialization",
             needs_pipeline([&] { return determinism(first, second, config_file, config); }));
  report.run(7, "normalization correctness", needs_pipeline([&] { return normalization(config); }));

  const double total = seconds_since(start);
  report.record(8, "runtime budget",
                {pipeline_ok && total < 1800.0, "acceptance suite took " + fmt(total) + " s (limit 1800 s)"});
  return report.all_pass() ? 0 : 1;
}

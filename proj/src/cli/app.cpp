#include <iostream>

#include <CLI11.hpp>

#include "daelstm/cli/commands.hpp"
#include "daelstm/simd/kernels.hpp"

namespace daelstm::cli {

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string work_dir;
  std::string data_dir;
  std::vector<std::string> overrides;
};

RunConfig resolve(const GlobalOptions& g) {
  nlohmann::json doc = g.config_path.empty() ? nlohmann::json::object() : read_config_file(g.config_path);
  for (const auto& o : g.overrides) apply_override(doc, o);
  if (g.seed) doc["seed"] = *g.seed;
  if (!g.work_dir.empty()) doc["work_dir"] = g.work_dir;
  if (!g.data_dir.empty()) doc["dataset"]["dir"] = g.data_dir;
  return RunConfig::from_json(doc);
}

void print_report(const TrainingReport& r) {
  std::cout << r.stage << ": " << r.epochs.size() << " epochs, validation loss " << r.initial_validation_loss
            << " -> " << r.final_validation_loss() << ", " << r.halvings << " learning-rate halvings\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"DAE-LSTM motion prediction toolkit"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("-c,--config", g.config_path, "JSON run config")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Global seed");
  app.add_option("--work-dir", g.work_dir, "Checkpoint and report directory");
  app.add_option("--data-dir", g.data_dir, "Dataset directory");
  app.add_option("--set", g.overrides, "Config override key.path=value (repeatable)");

  auto* gen = app.add_subcommand("gen-data", "Generate or import the dataset splits");

  auto* train = app.add_subcommand("train", "Train one stage: dae, lstm or finetune");
  std::string stage;
  train->add_option("stage", stage, "dae | lstm | finetune")
      ->required()
      ->check(CLI::IsMember({"dae", "lstm", "finetune"}));

  auto* train_cls = app.add_subcommand("train-classifier", "Train the action classifier");

  auto* predict = app.add_subcommand("predict", "Roll out a prediction from a seed CSV");
  PredictOptions popt;
  std::string p_ckpt, p_seed, p_out;
  bool unfiltered = false;
  predict->add_option("--checkpoint", p_ckpt, "Stacked checkpoint");
  predict->add_option("--seed-csv", p_seed, "Seed motion CSV")->required();
  predict->add_option("-o,--output", p_out, "Output CSV");
  auto* f_flag = predict->add_flag("--filtered", "Filter every step through the DAE (default)");
  predict->add_flag("--unfiltered", unfiltered, "Feed raw LSTM predictions back")->excludes(f_flag);

  auto* evaluate = app.add_subcommand("evaluate", "Horizon errors, ablation and classifier longevity");
  std::string e_ckpt, e_cls, e_base, e_test, e_out;
  evaluate->add_option("--checkpoint", e_ckpt, "Stacked checkpoint");
  evaluate->add_option("--classifier", e_cls, "Classifier checkpoint");
  evaluate->add_option("--baseline", e_base, "Reference LSTM checkpoint");
  evaluate->add_option("--test-dir", e_test, "Directory of test CSVs");
  evaluate->add_option("-o,--output-dir", e_out, "Report directory");

  auto* info = app.add_subcommand("info", "Print the resolved config and the active kernel set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = resolve(g);
    if (*gen) {
      const std::size_t n = cmd_gen_data(config);
      std::cout << "wrote " << n << " sequences to " << config.dataset.dir << "\n";
    } else if (*train) {
      print_report(cmd_train(config, stage_from_name(stage)));
    } else if (*train_cls) {
      const ClassifierResult r = cmd_train_classifier(config);
      print_report(r.report);
      std::cout << "held-out accuracy " << r.held_out_accuracy << "\n";
    } else if (*predict) {
      popt.checkpoint = p_ckpt;
      popt.seed_csv = p_seed;
      popt.output = p_out;
      popt.filtered = !unfiltered;
      std::cout << "wrote " << cmd_predict(config, popt).string() << "\n";
    } else if (*evaluate) {
      EvaluateOptions eopt;
      eopt.checkpoint = e_ckpt;
      eopt.classifier = e_cls;
      if (!e_base.empty()) eopt.baseline = e_base;
      eopt.test_dir = e_test;
      eopt.output_dir = e_out;
      const EvaluationResult r = cmd_evaluate(config, eopt);
      std::cout << r.ablation.to_csv();
    } else if (*info) {
      std::cout << config.to_json().dump(2) << "\nkernels: " << simd::isa_name(simd::active().isa) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}

}  // namespace daelstm::cli

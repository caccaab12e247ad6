// Properties of the pinned pipeline run left behind by the acceptance binary.
// DAELSTM_RUN_DIR names the root that holds its data/ and run/ directories.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "daelstm/cli/commands.hpp"
#include "daelstm/io/checkpoint.hpp"

namespace fs = std::filesystem;
using namespace daelstm;

namespace {

struct Fixture {
  fs::path root;
  cli::RunConfig config;
  cli::Dataset data;

  static const Fixture& get() {
    static const Fixture f = [] {
      Fixture x;
      const char* dir = std::getenv("DAELSTM_RUN_DIR");
      if (dir == nullptr) throw std::runtime_error("DAELSTM_RUN_DIR is not set");
      x.root = dir;
      x.config = cli::RunConfig::from_json(
          cli::read_config_file(fs::path(DAELSTM_SOURCE_DIR) / "tests" / "fixtures" / "pinned_run.json"));
      x.config.work_dir = (x.root / x.config.work_dir).string();
      x.config.dataset.dir = (x.root / x.config.dataset.dir).string();
      x.data = cli::load_dataset(x.config);
      return x;
    }();
    return f;
  }

  fs::path work(const std::string& name) const { return fs::path(config.work_dir) / name; }
  nlohmann::json report(const std::string& name) const { return nlohmann::json::parse(read_file(work(name))); }
};

double final_validation(const nlohmann::json& r) { return r.at("epochs").back().at("validation_loss").get<double>(); }

std::vector<const MotionSequence*> test_of_class(const Fixture& f, int c) {
  std::vector<const MotionSequence*> out;
  for (const auto& s : f.data.test) {
    if (s.label == c) out.push_back(&s);
  }
  return out;
}

}  // namespace

TEST_CASE("dae training curve drops below a quarter of the first epoch") {
  const auto r = Fixture::get().report("dae_report.json");
  const double first = r.at("epochs").front().at("validation_loss").get<double>();
  CHECK(final_validation(r) < 0.25 * first);
}

TEST_CASE("lstm validation improves at least fourfold") {
  const auto r = Fixture::get().report("lstm_report.json");
  CHECK(final_validation(r) * 4.0 <= r.at("initial_validation_loss").get<double>());
}

TEST_CASE("fine-tuning improves filtered validation loss") {
  const auto r = Fixture::get().report("finetune_report.json");
  CHECK(final_validation(r) < r.at("initial_validation_loss").get<double>());
}

TEST_CASE("classifier recognises ground-truth motion") {
  const Fixture& f = Fixture::get();
  CHECK(f.report("classifier_report.json").at("held_out_accuracy").get<double>() >= 0.9);

  const ClassifierModel clf = load_classifier(f.work("classifier.ckpt"));
  const int periodic = f.config.eval.periodic_class;
  const auto walks = test_of_class(f, periodic);
  REQUIRE_FALSE(walks.empty());
  for (const MotionSequence* s : walks) {
    const ClassProbSeries series = classify_over_time(clf, s->frames, periodic, s->fps);
    // Near-uniform before any evidence has accumulated.
    double top = 0.0;
    for (double p : series.probabilities.row(0)) top = std::max(top, p);
    CHECK(top < 0.6);
    const auto after = static_cast<std::size_t>(2.0 * s->fps);
    for (std::size_t t = after; t < series.length(); ++t) {
      CHECK(series.probabilities(t, static_cast<std::size_t>(periodic)) > 0.9);
    }
  }
}

TEST_CASE("baseline rollout variance decays on periodic motion" * doctest::may_fail()) {
  const Fixture& f = Fixture::get();
  const Lstm3Model lstm = load_lstm(f.work("lstm.ckpt"));
  const RolloutProtocol& p = f.config.eval.protocol;
  double head = 0.0, tail = 0.0;
  for (const MotionSequence* s : test_of_class(f, f.config.eval.periodic_class)) {
    const MotionSequence out = rollout_unfiltered(lstm, s->frames.slice_rows(0, p.seed_frames), p.rollout_frames);
    head += window_variance(out.frames, 0, p.tail_frames);
    tail += window_variance(out.frames, p.rollout_frames - p.tail_frames, p.rollout_frames);
  }
  MESSAGE("periodic baseline variance: first window " << head << ", last window " << tail);
  CHECK(tail < head);
}

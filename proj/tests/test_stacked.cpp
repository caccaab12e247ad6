#include <doctest.h>

#include <cmath>
#include <vector>

#include "daelstm/errors.hpp"
#include "daelstm/stacked/stacked.hpp"
#include "support/gradient_cases.hpp"

using namespace daelstm;

namespace {

Matrix random_frames(std::size_t rows, std::size_t cols, Rng& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(0.0, 1.0);
  return m;
}

StackedModel small_model(std::uint64_t seed, std::size_t joints = 3) {
  Rng rng(seed);
  const SkeletonSpec skeleton = SkeletonSpec::uniform(joints, 2);
  return {Lstm3Model::create(skeleton.total_dims(), 6, rng), DaeModel::create(skeleton, 12, 2, rng)};
}

std::vector<MotionSequence> sine_set(std::size_t count, std::size_t dims, Rng& rng) {
  std::vector<MotionSequence> out(count);
  for (auto& s : out) {
    const double phase = rng.uniform(0.0, 6.0);
    s.frames = Matrix(60, dims);
    for (std::size_t t = 0; t < 60; ++t) {
      for (std::size_t j = 0; j < dims; ++j) {
        s.frames(t, j) = 0.5 + 0.4 * std::sin(0.25 * static_cast<double>(t) + phase + 0.3 * static_cast<double>(j));
      }
    }
    s.normalized = true;
  }
  return out;
}

}  // namespace

TEST_CASE("identity filter leaves the rollout unchanged") {
  StackedModel model = small_model(1);
  model.dae = DaeModel::identity(model.dae.skeleton());
  Rng rng(2);
  const Matrix seed = random_frames(6, 6, rng);
  CHECK(rollout_filtered(model, seed, 25).frames == rollout_unfiltered(model.lstm, seed, 25).frames);
}

TEST_CASE("filtered rollout emits and feeds back the filter output") {
  const StackedModel model = small_model(3);
  Rng rng(4);
  const Matrix seed = random_frames(5, 6, rng);
  std::vector<Vector> inputs, emitted;
  std::size_t calls = 0;
  const MotionSequence out = rollout_filtered(model, seed, 15, 25.0, [&](const RolloutStepInfo& info) {
    ++calls;
    const Vector filtered = dae_filter(model.dae, info.raw);
    CHECK(std::equal(filtered.begin(), filtered.end(), info.emitted.begin()));
    inputs.emplace_back(info.input.begin(), info.input.end());
    emitted.emplace_back(info.emitted.begin(), info.emitted.end());
  });
  CHECK(calls == 15);
  CHECK(out.length() == 15);
  CHECK(std::equal(inputs[0].begin(), inputs[0].end(), seed.row(4).begin()));
  for (std::size_t k = 1; k < 15; ++k) CHECK(inputs[k] == emitted[k - 1]);
  for (std::size_t k = 0; k < 15; ++k) CHECK(std::equal(emitted[k].begin(), emitted[k].end(), out.frames.row(k).begin()));
  CHECK(rollout_filtered(model, seed, 15).frames == out.frames);
}

TEST_CASE("stacked tensor inventory") {
  StackedModel model = small_model(5);
  const ConstTensorList all = std::as_const(model).tensors();
  const std::size_t n_lstm = std::as_const(model.lstm).tensors().size();
  const std::size_t n_dae = std::as_const(model.dae).tensors().size();
  REQUIRE(all.size() == n_lstm + n_dae);
  CHECK(all.front().name.rfind("lstm.", 0) == 0);
  CHECK(all.back().name.rfind("dae.", 0) == 0);
  const StackedModel zeros = model.zeros_like();
  CHECK(same_inventory(zeros.tensors(), all));

  StackedModel bad = model;
  bad.dae = DaeModel::identity(SkeletonSpec::uniform(2, 2));
  CHECK_THROWS_AS(bad.validate(), ShapeError);
}

TEST_CASE("finetune gradients match finite differences") {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto r = testing::gradcheck_finetune(seed);
    CAPTURE(r.worst);
    CHECK(r.max_rel_error < 1e-5);
  }
}

TEST_CASE("filter loss gradient reaches the predictor") {
  const StackedModel model = small_model(6);
  Rng rng(7);
  const Matrix inputs = random_frames(4, 6, rng);
  const Matrix targets = random_frames(4, 6, rng);
  Rng draws(8);
  const FinetuneLossResult r = finetune_loss_and_grads(model, inputs, targets, {}, 0.0, 1.0, draws);
  CHECK(r.loss == doctest::Approx(r.dae_loss));
  CHECK(global_norm(std::as_const(r.grads.lstm).tensors()) > 0.0);
  CHECK(global_norm(std::as_const(r.grads.dae).tensors()) > 0.0);

  Rng draws2(8);
  const FinetuneLossResult lstm_only = finetune_loss_and_grads(model, inputs, targets, {}, 1.0, 0.0, draws2);
  CHECK(global_norm(std::as_const(lstm_only.grads.dae).tensors()) == 0.0);
}

TEST_CASE("identity filter loss equals predictor loss without corruption") {
  StackedModel model = small_model(9);
  model.dae = DaeModel::identity(model.dae.skeleton());
  Rng rng(10);
  const Matrix inputs = random_frames(5, 6, rng);
  const Matrix targets = random_frames(5, 6, rng);
  const FinetuneLossResult r = finetune_loss_and_grads(model, inputs, targets, {}, 1.0, 1.0, rng);
  CHECK(r.dae_loss == doctest::Approx(r.lstm_loss).epsilon(1e-12));
  CHECK(r.loss == doctest::Approx(r.lstm_loss + r.dae_loss));
}

TEST_CASE("zero fine-tune epochs leave parameters unchanged") {
  StackedModel model = small_model(11);
  Rng rng(12);
  const auto data = sine_set(3, 6, rng);
  const auto before = flatten(std::as_const(model).tensors());
  FinetuneConfig cfg;
  cfg.epochs = 0;
  cfg.window = 20;
  finetune(model, data, data, cfg, rng);
  CHECK(flatten(std::as_const(model).tensors()) == before);
}

TEST_CASE("fine-tuning lowers filtered validation loss and is reproducible") {
  Rng data_rng(13);
  const auto train = sine_set(4, 6, data_rng);
  const auto val = sine_set(2, 6, data_rng);
  auto run = [&] {
    StackedModel model = small_model(14);
    FinetuneConfig cfg;
    cfg.epochs = 6;
    cfg.window = 20;
    cfg.learning_rate = 0.005;
    Rng rng(15);
    const TrainingReport report = finetune(model, train, val, cfg, rng);
    CHECK(model.fine_tuned);
    CHECK(report.epochs.size() == 6);
    CHECK(report.epochs.front().noise_variance == 0.1);
    CHECK(report.epochs.back().noise_variance == 0.0);
    CHECK(report.epochs.back().internal_dropout == 0.0);
    CHECK(report.final_validation_loss() < report.initial_validation_loss);
    CHECK(filtered_validation_loss(model, val) == doctest::Approx(report.final_validation_loss()));
    return flatten(std::as_const(model).tensors());
  };
  CHECK(run() == run());
}

TEST_CASE("fine-tune corruption levels") {
  FinetuneConfig cfg;
  const FinetuneCorruption top = corruption_for_level(cfg, 0.1);
  CHECK(top.input_noise_variance == 0.1);
  CHECK(top.dae_input_dropout == 0.1);
  CHECK(top.internal_dropout == doctest::Approx(0.5));
  CHECK(corruption_for_level(cfg, 0.04).internal_dropout == doctest::Approx(0.2));
  CHECK(corruption_for_level(cfg, 0.0).internal_dropout == 0.0);
}

TEST_CASE("fine-tune config validation") {
  FinetuneConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SUBCASE("increasing schedule") { cfg.schedule = {0.05, 0.1, 0.0}; }
  SUBCASE("schedule not ending at zero") { cfg.schedule = {0.1, 0.05}; }
  SUBCASE("empty schedule") { cfg.schedule.clear(); }
  SUBCASE("learning rate") { cfg.learning_rate = 0.0; }
  SUBCASE("window") { cfg.window = 0; }
  SUBCASE("weights") { cfg.dae_loss_weight = -1.0; }
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

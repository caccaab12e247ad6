#include <doctest.h>

#include <cstring>

#include "daelstm/errors.hpp"
#include "daelstm/io/checkpoint.hpp"
#include "support/temp_dir.hpp"

using namespace daelstm;
using testing::TempDir;

namespace {

template <class Model, class Save, class Load>
void check_round_trip(const TempDir& dir, const std::string& name, const Model& model, Save save, Load load) {
  const auto a = dir / (name + "_a.ckpt");
  const auto b = dir / (name + "_b.ckpt");
  const nlohmann::json meta{{"note", name}, {"value", 0.1}};
  save(a, model, meta);
  nlohmann::json meta_back;
  const Model loaded = load(a, &meta_back);
  CHECK(meta_back == meta);
  CHECK(flatten(loaded.tensors()) == flatten(model.tensors()));
  save(b, loaded, meta_back);
  CHECK(read_file(a) == read_file(b));
  CHECK(read_file(sidecar_path(a)) == read_file(sidecar_path(b)));
}

}  // namespace

TEST_CASE("save, load, save is bit-exact for every kind") {
  TempDir dir;
  Rng rng(1);
  const SkeletonSpec skeleton = SkeletonSpec::uniform(3, 2);
  DaeModel dae = DaeModel::create(skeleton, 7, 2, rng);
  dae.layers()[0].bias[0] = 0.1;
  dae.layers()[0].bias[1] = -1e-310;  // subnormal
  const Lstm3Model lstm = Lstm3Model::create(6, 5, rng);
  const ClassifierModel clf = ClassifierModel::create(6, 4, 3, rng);
  StackedModel stacked{lstm, dae, true};

  check_round_trip(dir, "dae", dae, save_dae, load_dae);
  check_round_trip(dir, "lstm", lstm, save_lstm, load_lstm);
  check_round_trip(dir, "classifier", clf, save_classifier, load_classifier);
  check_round_trip(dir, "stacked", stacked, save_stacked, load_stacked);
  CHECK(load_stacked(dir / "stacked_a.ckpt").fine_tuned);
  CHECK(read_checkpoint_info(dir / "lstm_a.ckpt").kind == "lstm");
}

TEST_CASE("loaders check the recorded kind") {
  TempDir dir;
  Rng rng(2);
  save_lstm(dir / "m.ckpt", Lstm3Model::create(4, 3, rng));
  CHECK_THROWS_AS(load_dae(dir / "m.ckpt"), DataError);
  CHECK_THROWS_AS(load_lstm(dir / "missing.ckpt"), DataError);
}

TEST_CASE("tensor encoding layout") {
  const Vector values{1.5, -2.0};
  const ConstTensorList tensors{{"w", {2}, values}};
  const std::string bytes = encode_tensors(tensors);
  // magic 4 + version 2 + count 4 + name len 4 + name 1 + rank 4 + dim 8 + values 16
  REQUIRE(bytes.size() == 43);
  CHECK(bytes.substr(0, 4) == "DAEL");
  CHECK(static_cast<unsigned char>(bytes[4]) == kCheckpointVersion);
  CHECK(bytes[5] == 0);
  double first = 0.0;
  std::memcpy(&first, bytes.data() + 27, 8);
  CHECK(first == 1.5);

  const auto decoded = decode_tensors(bytes);
  REQUIRE(decoded.size() == 1);
  CHECK(decoded[0].name == "w");
  CHECK(decoded[0].shape == std::vector<std::size_t>{2});
  CHECK(decoded[0].values == values);
}

TEST_CASE("corrupt tensor files are rejected") {
  const Vector values{1.0, 2.0, 3.0};
  const std::string bytes = encode_tensors({{"w", {3}, values}});
  for (std::size_t n = 0; n < bytes.size(); ++n) CHECK_THROWS_AS(decode_tensors(bytes.substr(0, n)), DataError);
  CHECK_THROWS_AS(decode_tensors(bytes + "x"), DataError);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_tensors(bad_magic), DataError);
  std::string bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS_AS(decode_tensors(bad_version), DataError);
}

TEST_CASE("assign_tensors requires a matching inventory") {
  Vector target(3, 0.0);
  const Vector values{1.0, 2.0, 3.0};
  const auto stored = decode_tensors(encode_tensors({{"w", {3}, values}}));
  assign_tensors(stored, {{"w", {3}, target}});
  CHECK(target == values);
  CHECK_THROWS_AS(assign_tensors(stored, {{"v", {3}, target}}), DataError);
  CHECK_THROWS_AS(assign_tensors(stored, {{"w", {1, 3}, target}}), DataError);
  CHECK_THROWS_AS(assign_tensors(stored, {}), DataError);
}

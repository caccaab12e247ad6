#include "daelstm/io/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <sstream>

#include "daelstm/errors.hpp"

namespace daelstm {

namespace {

constexpr char kMagic[4] = {'D', 'A', 'E', 'L'};

template <typename T>
void put_le(std::string& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      v |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return v;
  }

  std::string get_string(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw DataError("checkpoint: truncated data");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

CheckpointInfo expect_kind(const std::filesystem::path& path, const std::string& kind, nlohmann::json* metadata) {
  CheckpointInfo info = read_checkpoint_info(path);
  if (info.kind != kind) {
    throw DataError("checkpoint " + path.string() + " holds a '" + info.kind + "' model, expected '" + kind + "'");
  }
  if (metadata != nullptr) *metadata = info.metadata;
  return info;
}

}  // namespace

std::string encode_tensors(const ConstTensorList& tensors) {
  std::string out(kMagic, sizeof(kMagic));
  put_le<std::uint16_t>(out, kCheckpointVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.name.size()));
    out += t.name;
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.shape.size()));
    for (std::size_t d : t.shape) put_le<std::uint64_t>(out, d);
    for (double v : t.values) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  }
  return out;
}

std::vector<StoredTensor> decode_tensors(const std::string& bytes) {
  Reader in(bytes);
  if (in.get_string(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic))) {
    throw DataError("checkpoint: bad magic");
  }
  const auto version = in.get<std::uint16_t>();
  if (version != kCheckpointVersion) throw DataError("checkpoint: unsupported version " + std::to_string(version));
  const auto count = in.get<std::uint32_t>();
  std::vector<StoredTensor> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    StoredTensor t;
    t.name = in.get_string(in.get<std::uint32_t>());
    const auto rank = in.get<std::uint32_t>();
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      t.shape.push_back(static_cast<std::size_t>(in.get<std::uint64_t>()));
      n *= t.shape.back();
    }
    if (n > bytes.size()) throw DataError("checkpoint: truncated data");
    t.values.reserve(n);
    for (std::size_t k = 0; k < n; ++k) t.values.push_back(std::bit_cast<double>(in.get<std::uint64_t>()));
    out.push_back(std::move(t));
  }
  if (!in.done()) throw DataError("checkpoint: trailing bytes");
  return out;
}

void assign_tensors(const std::vector<StoredTensor>& stored, const TensorList& target) {
  if (stored.size() != target.size()) {
    throw DataError("checkpoint: expected " + std::to_string(target.size()) + " tensors, found " +
                    std::to_string(stored.size()));
  }
  for (std::size_t i = 0; i < stored.size(); ++i) {
    if (stored[i].name != target[i].name || stored[i].shape != target[i].shape) {
      throw DataError("checkpoint: tensor '" + stored[i].name + "' does not match model tensor '" + target[i].name +
                      "'");
    }
    std::copy(stored[i].values.begin(), stored[i].values.end(), target[i].values.begin());
  }
}

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint) {
  std::filesystem::path p = checkpoint;
  p += ".json";
  return p;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

void write_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info, const ConstTensorList& tensors) {
  write_file(path, encode_tensors(tensors));
  const nlohmann::json doc{{"format", "daelstm-checkpoint"},
                           {"version", kCheckpointVersion},
                           {"kind", info.kind},
                           {"architecture", info.architecture},
                           {"metadata", info.metadata}};
  write_file(sidecar_path(path), doc.dump(2) + "\n");
}

CheckpointInfo read_checkpoint_info(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DataError("checkpoint not found: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(sidecar_path(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint sidecar " + sidecar_path(path).string() + ": " + e.what());
  }
  if (doc.value("format", "") != "daelstm-checkpoint") throw DataError("checkpoint sidecar: unknown format");
  return {doc.at("kind").get<std::string>(), doc.at("architecture"), doc.value("metadata", nlohmann::json::object())};
}

std::vector<StoredTensor> read_checkpoint_tensors(const std::filesystem::path& path) {
  return decode_tensors(read_file(path));
}

void save_dae(const std::filesystem::path& path, const DaeModel& model, const nlohmann::json& metadata) {
  write_checkpoint(path, {"dae", model.architecture(), metadata}, model.tensors());
}

void save_lstm(const std::filesystem::path& path, const Lstm3Model& model, const nlohmann::json& metadata) {
  write_checkpoint(path, {"lstm", model.architecture(), metadata}, model.tensors());
}

void save_classifier(const std::filesystem::path& path, const ClassifierModel& model,
                     const nlohmann::json& metadata) {
  write_checkpoint(path, {"classifier", model.architecture(), metadata}, model.tensors());
}

void save_stacked(const std::filesystem::path& path, const StackedModel& model, const nlohmann::json& metadata) {
  const nlohmann::json arch{
      {"lstm", model.lstm.architecture()}, {"dae", model.dae.architecture()}, {"fine_tuned", model.fine_tuned}};
  write_checkpoint(path, {"stacked", arch, metadata}, model.tensors());
}

DaeModel load_dae(const std::filesystem::path& path, nlohmann::json* metadata) {
  const CheckpointInfo info = expect_kind(path, "dae", metadata);
  DaeModel model = DaeModel::from_architecture(info.architecture);
  assign_tensors(read_checkpoint_tensors(path), model.tensors());
  return model;
}

Lstm3Model load_lstm(const std::filesystem::path& path, nlohmann::json* metadata) {
  const CheckpointInfo info = expect_kind(path, "lstm", metadata);
  Lstm3Model model = Lstm3Model::from_architecture(info.architecture);
  assign_tensors(read_checkpoint_tensors(path), model.tensors());
  return model;
}

ClassifierModel load_classifier(const std::filesystem::path& path, nlohmann::json* metadata) {
  const CheckpointInfo info = expect_kind(path, "classifier", metadata);
  ClassifierModel model = ClassifierModel::from_architecture(info.architecture);
  assign_tensors(read_checkpoint_tensors(path), model.tensors());
  return model;
}

StackedModel load_stacked(const std::filesystem::path& path, nlohmann::json* metadata) {
  const CheckpointInfo info = expect_kind(path, "stacked", metadata);
  StackedModel model{Lstm3Model::from_architecture(info.architecture.at("lstm")),
                     DaeModel::from_architecture(info.architecture.at("dae")),
                     info.architecture.value("fine_tuned", false)};
  model.validate();
  assign_tensors(read_checkpoint_tensors(path), model.tensors());
  return model;
}

}  // namespace daelstm

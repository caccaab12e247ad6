#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "daelstm/dae/dae.hpp"
#include "daelstm/eval/classifier.hpp"
#include "daelstm/lstm3/lstm3.hpp"
#include "daelstm/stacked/stacked.hpp"

namespace daelstm {

// Binary tensor file, all integers little-endian:
//   "DAEL" | u16 version | u32 tensor count
//   per tensor: u32 name length | name bytes | u32 rank | u64 dims[rank] | f64 values
// A JSON sidecar `<file>.json` records the kind, architecture and metadata.

inline constexpr std::uint16_t kCheckpointVersion = 1;

struct StoredTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> values;
};

std::string encode_tensors(const ConstTensorList& tensors);
/// Throws DataError on a bad magic, unknown version or truncated input.
std::vector<StoredTensor> decode_tensors(const std::string& bytes);

/// Copies stored values into `target`; names and shapes must match exactly.
void assign_tensors(const std::vector<StoredTensor>& stored, const TensorList& target);

struct CheckpointInfo {
  std::string kind;  // "dae", "lstm", "stacked", "classifier"
  nlohmann::json architecture;
  nlohmann::json metadata;
};

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint);

void write_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info, const ConstTensorList& tensors);
/// Reads the sidecar only. Throws DataError when either file is missing.
CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);
std::vector<StoredTensor> read_checkpoint_tensors(const std::filesystem::path& path);

void save_dae(const std::filesystem::path& path, const DaeModel& model, const nlohmann::json& metadata = {});
void save_lstm(const std::filesystem::path& path, const Lstm3Model& model, const nlohmann::json& metadata = {});
void save_classifier(const std::filesystem::path& path, const ClassifierModel& model,
                     const nlohmann::json& metadata = {});
/// One file holding both components under "lstm." and "dae." prefixes.
void save_stacked(const std::filesystem::path& path, const StackedModel& model, const nlohmann::json& metadata = {});

/// Each loader checks the recorded kind and writes the metadata to `metadata`
/// when non-null.
DaeModel load_dae(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);
Lstm3Model load_lstm(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);
ClassifierModel load_classifier(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);
StackedModel load_stacked(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

/// Whole-file contents; throws DataError when unreadable.
std::string read_file(const std::filesystem::path& path);
/// Throws DataError when the file cannot be written.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace daelstm

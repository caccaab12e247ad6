#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "daelstm/data/skeleton.hpp"

namespace daelstm {

// Motion CSV layout:
//   # fps=<float>          (default 25 when absent)
//   # label=<int>          (optional)
//   j0_c0,j0_c1,...        header row
//   <frame rows>           decimal floats, one frame per row

MotionSequence load_csv(const std::filesystem::path& path);

/// Writes shortest round-trip decimal representations. `names` defaults to
/// f0, f1, ... when empty.
void save_csv(const std::filesystem::path& path, const MotionSequence& seq,
              const std::vector<std::string>& names = {});

/// Serialized form of save_csv, for byte-level comparisons.
std::string to_csv_string(const MotionSequence& seq, const std::vector<std::string>& names = {});

/// Shortest decimal string that parses back to `v`.
std::string format_number(double v);

/// Every *.csv in `dir`, sorted by filename.
std::vector<std::filesystem::path> list_csv_files(const std::filesystem::path& dir);

}  // namespace daelstm

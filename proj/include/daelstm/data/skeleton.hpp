#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "daelstm/nn/matrix.hpp"

namespace daelstm {

struct Joint {
  std::string name;
  std::size_t channels = 0;
};

/// Ordered joints, each owning a contiguous group of feature channels.
/// The group is the unit of joint dropout.
class SkeletonSpec {
 public:
  SkeletonSpec() = default;
  explicit SkeletonSpec(std::vector<Joint> joints);

  /// `joints` joints named j0, j1, ... with `channels` channels each.
  static SkeletonSpec uniform(std::size_t joints, std::size_t channels);

  const std::vector<Joint>& joints() const { return joints_; }
  std::size_t joint_count() const { return joints_.size(); }
  std::size_t total_dims() const { return total_dims_; }
  /// [offset, offset + channels) of joint j.
  std::pair<std::size_t, std::size_t> channel_range(std::size_t j) const;
  /// Header names `<joint>_c<k>`.
  std::vector<std::string> feature_names() const;

  nlohmann::json to_json() const;
  static SkeletonSpec from_json(const nlohmann::json& doc);

  bool operator==(const SkeletonSpec& other) const;

 private:
  std::vector<Joint> joints_;
  std::vector<std::size_t> offsets_;
  std::size_t total_dims_ = 0;
};

/// Time-ordered pose vectors, one frame per row.
struct MotionSequence {
  Matrix frames;  // T x D
  double fps = 25.0;
  std::optional<int> label;
  bool normalized = false;

  std::size_t length() const { return frames.rows(); }
  std::size_t dims() const { return frames.cols(); }
  double duration_s() const { return static_cast<double>(length()) / fps; }
};

/// Keeps frames 0, factor, 2*factor, ...; divides fps by factor.
MotionSequence downsample(const MotionSequence& seq, std::size_t factor);

}  // namespace daelstm

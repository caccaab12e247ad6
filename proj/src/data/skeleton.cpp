#include "daelstm/data/skeleton.hpp"

#include "daelstm/errors.hpp"

namespace daelstm {

SkeletonSpec::SkeletonSpec(std::vector<Joint> joints) : joints_(std::move(joints)) {
  if (joints_.empty()) throw DataError("skeleton needs at least one joint");
  for (const auto& j : joints_) {
    if (j.channels == 0) throw DataError("joint '" + j.name + "' has no channels");
    offsets_.push_back(total_dims_);
    total_dims_ += j.channels;
  }
}

SkeletonSpec SkeletonSpec::uniform(std::size_t joints, std::size_t channels) {
  std::vector<Joint> js;
  for (std::size_t j = 0; j < joints; ++j) js.push_back({"j" + std::to_string(j), channels});
  return SkeletonSpec(std::move(js));
}

std::pair<std::size_t, std::size_t> SkeletonSpec::channel_range(std::size_t j) const {
  return {offsets_.at(j), offsets_.at(j) + joints_.at(j).channels};
}

std::vector<std::string> SkeletonSpec::feature_names() const {
  std::vector<std::string> names;
  for (const auto& j : joints_) {
    for (std::size_t c = 0; c < j.channels; ++c) names.push_back(j.name + "_c" + std::to_string(c));
  }
  return names;
}

nlohmann::json SkeletonSpec::to_json() const {
  nlohmann::json joints = nlohmann::json::array();
  for (const auto& j : joints_) joints.push_back({{"name", j.name}, {"channels", j.channels}});
  return {{"joints", joints}};
}

SkeletonSpec SkeletonSpec::from_json(const nlohmann::json& doc) {
  try {
    std::vector<Joint> joints;
    for (const auto& j : doc.at("joints")) {
      joints.push_back({j.at("name").get<std::string>(), j.at("channels").get<std::size_t>()});
    }
    return SkeletonSpec(std::move(joints));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid skeleton document: ") + e.what());
  }
}

bool SkeletonSpec::operator==(const SkeletonSpec& other) const {
  if (joints_.size() != other.joints_.size()) return false;
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name != other.joints_[i].name || joints_[i].channels != other.joints_[i].channels) {
      return false;
    }
  }
  return true;
}

MotionSequence downsample(const MotionSequence& seq, std::size_t factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  MotionSequence out;
  out.fps = seq.fps / static_cast<double>(factor);
  out.label = seq.label;
  out.normalized = seq.normalized;
  out.frames = Matrix((seq.length() + factor - 1) / factor, seq.dims());
  for (std::size_t t = 0, k = 0; t < seq.length(); t += factor, ++k) {
    std::copy(seq.frames.row(t).begin(), seq.frames.row(t).end(), out.frames.row(k).begin());
  }
  return out;
}

}  // namespace daelstm

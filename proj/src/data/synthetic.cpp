#include "daelstm/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "daelstm/errors.hpp"

namespace daelstm {

void SyntheticActionSpec::validate() const {
  const std::size_t d = offset.size();
  if (d == 0) throw DataError("synthetic class '" + name + "' has no features");
  if (amplitude.size() != d || frequency.size() != d || phase.size() != d) {
    throw DataError("synthetic class '" + name + "' has per-feature arrays of different lengths");
  }
  for (std::size_t j = 0; j < d; ++j) {
    if (amplitude[j] < 0.0) throw DataError("synthetic class '" + name + "': negative amplitude");
    if (frequency[j] < 0.0) throw DataError("synthetic class '" + name + "': negative frequency");
  }
  if (noise_variance < 0.0 || start_jitter_s < 0.0) {
    throw DataError("synthetic class '" + name + "': negative noise variance or start jitter");
  }
  if (!(tempo_spread >= 0.0 && tempo_spread < 1.0)) {
    throw DataError("synthetic class '" + name + "': tempo spread outside [0, 1)");
  }
  if (tempo_wander < 0.0) throw DataError("synthetic class '" + name + "': negative tempo wander");
  if (!(wander_time_s > 0.0)) throw DataError("synthetic class '" + name + "': wander time must be positive");
}

nlohmann::json SyntheticActionSpec::to_json() const {
  return {{"class_id", class_id}, {"name", name},         {"periodic", periodic},
          {"amplitude", amplitude}, {"frequency", frequency}, {"phase", phase},
          {"offset", offset},       {"noise_variance", noise_variance}, {"start_jitter_s", start_jitter_s},
          {"tempo_spread", tempo_spread}, {"tempo_wander", tempo_wander}, {"wander_time_s", wander_time_s}};
}

SyntheticActionSpec SyntheticActionSpec::from_json(const nlohmann::json& doc) {
  try {
    SyntheticActionSpec s;
    s.class_id = doc.at("class_id").get<int>();
    s.name = doc.value("name", "class" + std::to_string(s.class_id));
    s.periodic = doc.value("periodic", true);
    s.amplitude = doc.at("amplitude").get<Vector>();
    s.frequency = doc.at("frequency").get<Vector>();
    s.phase = doc.at("phase").get<Vector>();
    s.offset = doc.at("offset").get<Vector>();
    s.noise_variance = doc.value("noise_variance", 1e-4);
    s.start_jitter_s = doc.value("start_jitter_s", 0.0);
    s.tempo_spread = doc.value("tempo_spread", 0.0);
    s.tempo_wander = doc.value("tempo_wander", 0.0);
    s.wander_time_s = doc.value("wander_time_s", 1.0);
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid synthetic class document: ") + e.what());
  }
}

MotionSequence generate_synthetic(const SyntheticActionSpec& spec, double duration_s, double fps, Rng& rng) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("synthetic duration must be positive");
  if (!(fps > 0.0)) throw std::invalid_argument("synthetic fps must be positive");
  spec.validate();
  const auto frames = static_cast<std::size_t>(std::floor(duration_s * fps));
  if (frames == 0) throw std::invalid_argument("synthetic duration shorter than one frame");

  const double start = spec.start_jitter_s > 0.0 ? rng.uniform(0.0, spec.start_jitter_s) : 0.0;
  const double tempo = spec.tempo_spread > 0.0 ? rng.uniform(1.0 - spec.tempo_spread, 1.0 + spec.tempo_spread) : 1.0;
  const double dt = 1.0 / fps;
  const double keep = std::exp(-dt / spec.wander_time_s);
  const double innovation = spec.tempo_wander * std::sqrt(1.0 - keep * keep);
  double speed = spec.tempo_wander > 0.0 ? spec.tempo_wander * rng.gaussian() : 0.0;
  const double noise_sd = std::sqrt(spec.noise_variance);
  const double two_pi = 2.0 * std::numbers::pi;

  MotionSequence seq;
  seq.fps = fps;
  seq.label = spec.class_id;
  seq.frames = Matrix(frames, spec.dims());
  double wander = 0.0;
  for (std::size_t k = 0; k < frames; ++k) {
    if (k > 0 && spec.tempo_wander > 0.0) {
      wander += tempo * speed * dt;
      speed = keep * speed + innovation * rng.gaussian();
    }
    const double t = start + tempo * static_cast<double>(k) * dt + wander;
    auto row = seq.frames.row(k);
    for (std::size_t j = 0; j < spec.dims(); ++j) {
      const double primary = std::sin(two_pi * spec.frequency[j] * t + spec.phase[j]);
      const double wave =
          spec.periodic ? primary : 0.5 * (primary + std::sin(two_pi * spec.frequency[j] * std::numbers::sqrt2 * t));
      row[j] = spec.offset[j] + spec.amplitude[j] * wave;
      if (noise_sd > 0.0) row[j] += noise_sd * rng.gaussian();
    }
  }
  return seq;
}

nlohmann::json SyntheticRoster::to_json() const {
  nlohmann::json classes_doc = nlohmann::json::array();
  for (const auto& c : classes) classes_doc.push_back(c.to_json());
  return {{"skeleton", skeleton.to_json()}, {"classes", classes_doc}};
}

SyntheticRoster SyntheticRoster::from_json(const nlohmann::json& doc) {
  SyntheticRoster r;
  r.skeleton = SkeletonSpec::from_json(doc.at("skeleton"));
  for (const auto& c : doc.at("classes")) {
    r.classes.push_back(SyntheticActionSpec::from_json(c));
    if (r.classes.back().dims() != r.skeleton.total_dims()) {
      throw DataError("synthetic class feature count does not match skeleton");
    }
  }
  if (r.classes.empty()) throw DataError("roster has no classes");
  return r;
}

SyntheticRoster default_roster(std::uint64_t seed) {
  Rng rng(derive_seed(seed, "roster"));
  SyntheticRoster roster;
  roster.skeleton = SkeletonSpec::uniform(12, 3);
  const std::size_t d = roster.skeleton.total_dims();
  const double two_pi = 2.0 * std::numbers::pi;

  Vector rest(d);
  for (double& m : rest) m = rng.uniform(-0.5, 0.5);

  auto make = [&](int id, const char* name, bool periodic) {
    SyntheticActionSpec s;
    s.class_id = id;
    s.name = name;
    s.periodic = periodic;
    s.amplitude.assign(d, 0.0);
    s.frequency.assign(d, 0.0);
    s.phase.assign(d, 0.0);
    s.offset = rest;
    s.start_jitter_s = 60.0;
    return s;
  };

  SyntheticActionSpec walk = make(0, "walk-like", true);
  for (std::size_t j = 0; j < d; ++j) {
    walk.offset[j] += rng.uniform(-0.15, 0.15);
    walk.amplitude[j] = rng.uniform(0.2, 0.6);
    walk.frequency[j] = rng.bernoulli(1.0 / 3.0) ? 2.0 : 1.0;
    walk.phase[j] = rng.uniform(0.0, two_pi);
  }

  SyntheticActionSpec eat = make(1, "eat-like", false);
  for (std::size_t j = 0; j < d; ++j) {
    eat.offset[j] += rng.uniform(-0.15, 0.15);
    eat.amplitude[j] = rng.uniform(0.1, 0.4);
    eat.frequency[j] = 0.5;
    eat.phase[j] = rng.uniform(0.0, two_pi);
  }

  // Performers differ in speed and drift off tempo within a take.
  for (SyntheticActionSpec* s : {&walk, &eat}) {
    s->tempo_spread = 0.1;
    s->tempo_wander = 0.15;
    s->wander_time_s = 1.5;
  }

  SyntheticActionSpec idle = make(2, "idle", true);

  roster.classes = {walk, eat, idle};
  return roster;
}

SplitIndices split_indices(const std::vector<std::optional<int>>& labels, double validation_fraction,
                           double test_fraction, Rng& rng) {
  if (!(validation_fraction >= 0.0 && test_fraction >= 0.0 && validation_fraction + test_fraction < 1.0)) {
    throw ConfigError("split fractions must be nonnegative and sum to less than 1");
  }
  std::vector<int> order;
  std::map<int, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int key = labels[i].value_or(-1);
    if (!groups.contains(key)) order.push_back(key);
    groups[key].push_back(i);
  }
  SplitIndices out;
  for (int key : order) {
    auto& members = groups[key];
    rng.shuffle(std::span(members));
    const double n = static_cast<double>(members.size());
    const auto n_test = static_cast<std::size_t>(std::lround(n * test_fraction));
    const auto n_val = static_cast<std::size_t>(std::lround(n * validation_fraction));
    for (std::size_t k = 0; k < members.size(); ++k) {
      if (k < n_test) {
        out.test.push_back(members[k]);
      } else if (k < n_test + n_val) {
        out.validation.push_back(members[k]);
      } else {
        out.train.push_back(members[k]);
      }
    }
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

DatasetSplit split_dataset(const std::vector<MotionSequence>& sequences, double validation_fraction,
                           double test_fraction, Rng& rng) {
  std::vector<std::optional<int>> labels;
  for (const auto& s : sequences) labels.push_back(s.label);
  const SplitIndices idx = split_indices(labels, validation_fraction, test_fraction, rng);
  DatasetSplit split;
  for (auto i : idx.train) split.train.push_back(sequences[i]);
  for (auto i : idx.validation) split.validation.push_back(sequences[i]);
  for (auto i : idx.test) split.test.push_back(sequences[i]);
  return split;
}

}  // namespace daelstm

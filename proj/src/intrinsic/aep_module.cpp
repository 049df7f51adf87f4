#include "intrinsic/aep_module.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cluster/kmeans.hpp"
#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/losses.hpp"

namespace aep::intrinsic {

void ModuleBatch::validate() const {
  const int n = size();
  if (n < 1) throw ConfigError("module batch: empty");
  if (frames == nullptr || frames->rank() != 4 || frames->dim(0) != n)
    throw ConfigError("module batch: frames must be [n, c, h, w]");
  if (next_frames != nullptr && (next_frames->rank() != 4 || next_frames->dim(0) != n))
    throw ConfigError("module batch: next_frames shape mismatch");
  if (static_cast<int>(textures.size()) != n || static_cast<int>(silent.size()) != n)
    throw ConfigError("module batch: textures/silent length mismatch");
  for (const auto& t : textures)
    if (static_cast<int>(t.features.size()) != audio::kTextureDim)
      throw ConfigError("module batch: texture dimension mismatch");
}

AepModule::AepModule(std::uint64_t seed, int action_count, const ModuleOptions& opt)
    : seed_(seed),
      opt_(opt),
      action_count_(action_count),
      clusters_(opt.clustering),
      shuffle_state_(derive_seed(seed, seed_stream::kMinibatchShuffle) ^ 0xAE9ULL) {
  if (action_count < 1) throw ConfigError("aep: action_count must be >= 1");
  if (opt.k_min < 2 || opt.k_max < opt.k_min) throw ConfigError("aep: bad class-count bounds");
}

std::vector<int> AepModule::labels(const ModuleBatch& batch) const {
  if (phase_ != 2) throw StateError("aep: event classes are not frozen yet");
  std::vector<int> out(static_cast<std::size_t>(batch.size()));
  for (int i = 0; i < batch.size(); ++i)
    out[static_cast<std::size_t>(i)] =
        classes_.label(batch.textures[static_cast<std::size_t>(i)].features,
                       batch.silent[static_cast<std::size_t>(i)] != 0);
  return out;
}

std::vector<double> AepModule::rewards(const ModuleBatch& batch) {
  batch.validate();
  const int n = batch.size();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  if (phase_ == 1) {
    last_accuracy_ = -1.0;
    for (int i = 0; i < n; ++i) {
      if (batch.silent[static_cast<std::size_t>(i)]) continue;
      out[static_cast<std::size_t>(i)] =
          clusters_.novelty_bonus(batch.textures[static_cast<std::size_t>(i)].features);
    }
    return out;
  }
  const std::vector<int> y = labels(batch);
  const nn::Tensor z = predictor_->logits(*batch.frames, batch.actions);
  out = nn::cross_entropy(z, y).losses;
  int hits = 0;
  const int c = z.dim(1);
  for (int i = 0; i < n; ++i) {
    const double* row = z.data() + static_cast<std::size_t>(i) * c;
    int best = 0;
    for (int j = 1; j < c; ++j)
      if (row[j] > row[best]) best = j;
    if (best == y[static_cast<std::size_t>(i)]) ++hits;
  }
  last_accuracy_ = static_cast<double>(hits) / n;
  return out;
}

void AepModule::update(const ModuleBatch& batch) {
  batch.validate();
  if (phase_ == 1) {
    for (int i = 0; i < batch.size(); ++i) {
      const auto& phi = batch.textures[static_cast<std::size_t>(i)].features;
      const bool is_silent = batch.silent[static_cast<std::size_t>(i)] != 0;
      ++step_;
      clusters_.online_update(phi, step_, is_silent);
      if (!is_silent) corpus_.push_back(batch.textures[static_cast<std::size_t>(i)]);
    }
    if (clusters_.saturated(step_)) freeze();
    return;
  }
  step_ += batch.size();
  const std::vector<int> y = labels(batch);
  predictor_->train(*batch.frames, batch.actions, y, opt_.train_epochs, opt_.minibatch,
                    shuffle_state_, opt_.lr);
}

void AepModule::freeze() {
  clusters_.finalize_warmup(step_);
  if (clusters_.k() < 2)
    throw StateError("aep: clustering found fewer than 2 sound clusters; "
                     "the environment is too silent for event prediction");
  if (static_cast<int>(corpus_.size()) < opt_.min_corpus)
    throw StateError("aep: too few non-silent clips collected to define event classes");

  const int k = std::min(opt_.k_max, std::max(opt_.k_min, clusters_.k()));
  std::vector<std::vector<double>> data;
  data.reserve(corpus_.size());
  for (const auto& t : corpus_) data.push_back(t.features);
  classes_ = cluster::kmeans(data, k, derive_seed(seed_, seed_stream::kKmeans), clusters_.tau());
  predictor_ = std::make_unique<AepPredictor>(derive_seed(seed_, seed_stream::kModuleInit),
                                              action_count_, classes_.num_classes());
  phase_ = 2;
  std::fprintf(stderr, "aep: froze %d event classes from %zu clips after %lld steps\n", k,
               corpus_.size(), static_cast<long long>(step_));
}

void AepModule::save(const std::string& prefix) const {
  nlohmann::json j;
  j["phase"] = phase_;
  j["step"] = step_;
  j["action_count"] = action_count_;
  j["last_accuracy"] = last_accuracy_;
  j["clusters"] = nlohmann::json::parse(clusters_.serialize());
  nlohmann::json corpus = nlohmann::json::array();
  for (const auto& t : corpus_) corpus.push_back(t.features);
  j["corpus"] = std::move(corpus);
  std::ofstream out(prefix + ".state.json");
  if (!out || !(out << j.dump(2))) throw IoError("aep: cannot write " + prefix + ".state.json");
  if (phase_ == 2) {
    classes_.save(prefix + ".classes.json");
    predictor_->save(prefix + ".pred");
  }
}

void AepModule::load(const std::string& prefix) {
  std::ifstream in(prefix + ".state.json");
  if (!in) throw IoError("aep: cannot read " + prefix + ".state.json");
  std::stringstream ss;
  ss << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
    phase_ = j.at("phase").get<int>();
    step_ = j.at("step").get<std::int64_t>();
    action_count_ = j.at("action_count").get<int>();
    last_accuracy_ = j.at("last_accuracy").get<double>();
    clusters_ = cluster::OnlineClusterSet::deserialize(j.at("clusters").dump());
    corpus_.clear();
    for (const auto& f : j.at("corpus"))
      corpus_.push_back(audio::SoundTexture{f.get<std::vector<double>>()});
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("aep: bad state file: ") + e.what());
  }
  if (phase_ == 2) {
    classes_ = cluster::EventClasses::load(prefix + ".classes.json");
    predictor_ = std::make_unique<AepPredictor>(derive_seed(seed_, seed_stream::kModuleInit),
                                                action_count_, classes_.num_classes());
    predictor_->load(prefix + ".pred");
  }
}

}  // namespace aep::intrinsic

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nn/network.hpp"

namespace aep::intrinsic {

// Predicts which auditory event class a (frame, action) pair will produce:
// a 3-layer conv encoder over the frame, concatenated with the action
// one-hot, into a 2-layer MLP with softmax over num_classes (event clusters
// plus silence). The per-sample cross-entropy against the realized class is
// the intrinsic reward signal.
class AepPredictor {
 public:
  AepPredictor(std::uint64_t seed, int action_count, int num_classes);

  int action_count() const { return action_count_; }
  int num_classes() const { return num_classes_; }

  // Class logits [n, num_classes]; caches activations for training.
  nn::Tensor logits(const nn::Tensor& frames, const std::vector<int>& actions);

  // Per-sample -log p(label) of the current predictor; no parameter change.
  std::vector<double> cross_entropy_rewards(const nn::Tensor& frames,
                                            const std::vector<int>& actions,
                                            const std::vector<int>& labels);

  // `epochs` shuffled-minibatch Adam passes over the batch. Returns the mean
  // cross-entropy of the whole batch evaluated before any update.
  double train(const nn::Tensor& frames, const std::vector<int>& actions,
               const std::vector<int>& labels, int epochs, int minibatch,
               std::uint64_t& shuffle_state, double lr);

  std::int64_t param_count() const;
  std::vector<nn::Tensor*> params();

  void save(const std::string& prefix) const;
  void load(const std::string& prefix);

 private:
  nn::Tensor head_input(const nn::Tensor& features, const std::vector<int>& actions) const;

  int action_count_;
  int num_classes_;
  nn::Network encoder_;  // conv stack -> flatten (2592)
  nn::Network head_;     // {2592 + actions} -> 128 relu -> num_classes
};

}  // namespace aep::intrinsic

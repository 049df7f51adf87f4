#include "intrinsic/aep_predictor.hpp"

#include <cstring>
#include <numeric>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "env/env.hpp"
#include "nn/losses.hpp"

namespace aep::intrinsic {

namespace {
constexpr int kEncoderOut = 2592;  // 32 channels x 9 x 9 after three stride-2 convs
}

AepPredictor::AepPredictor(std::uint64_t seed, int action_count, int num_classes)
    : action_count_(action_count),
      num_classes_(num_classes),
      encoder_(derive_seed(seed, 0xAE1), {1, env::kFrameSize, env::kFrameSize}),
      head_(derive_seed(seed, 0xAE2), {kEncoderOut + action_count}) {
  if (action_count < 1) throw ConfigError("predictor: action_count must be >= 1");
  if (num_classes < 2) throw ConfigError("predictor: need at least two classes");
  encoder_.add_conv2d(16, 3, 2).add_relu();
  encoder_.add_conv2d(32, 3, 2).add_relu();
  encoder_.add_conv2d(32, 3, 2).add_relu();
  encoder_.add_flatten();
  head_.add_dense(128, nn::Init::He).add_relu();
  head_.add_dense(num_classes, nn::Init::Xavier);
}

nn::Tensor AepPredictor::head_input(const nn::Tensor& features,
                                    const std::vector<int>& actions) const {
  const int n = features.dim(0);
  nn::Tensor in({n, kEncoderOut + action_count_});
  for (int i = 0; i < n; ++i) {
    const int a = actions[static_cast<std::size_t>(i)];
    if (a < 0 || a >= action_count_) throw InputError("predictor: action out of range");
    double* dst = in.data() + static_cast<std::size_t>(i) * (kEncoderOut + action_count_);
    std::memcpy(dst, features.data() + static_cast<std::size_t>(i) * kEncoderOut,
                sizeof(double) * kEncoderOut);
    dst[kEncoderOut + a] = 1.0;
  }
  return in;
}

nn::Tensor AepPredictor::logits(const nn::Tensor& frames, const std::vector<int>& actions) {
  if (frames.rank() != 4) throw ConfigError("predictor: frames must be [n, c, h, w]");
  const int n = frames.dim(0);
  if (static_cast<int>(actions.size()) != n)
    throw ConfigError("predictor: actions length mismatch");
  return head_.forward(head_input(encoder_.forward(frames), actions));
}

std::vector<double> AepPredictor::cross_entropy_rewards(const nn::Tensor& frames,
                                                        const std::vector<int>& actions,
                                                        const std::vector<int>& labels) {
  const nn::Tensor z = logits(frames, actions);
  return nn::cross_entropy(z, labels).losses;
}

double AepPredictor::train(const nn::Tensor& frames, const std::vector<int>& actions,
                           const std::vector<int>& labels, int epochs, int minibatch,
                           std::uint64_t& shuffle_state, double lr) {
  const int n = frames.dim(0);
  if (n < 1) throw InputError("predictor: empty batch");
  if (static_cast<int>(labels.size()) != n) throw ConfigError("predictor: labels mismatch");
  if (epochs < 1 || minibatch < 1) throw ConfigError("predictor: bad training schedule");

  const nn::Tensor z0 = logits(frames, actions);
  const double pre_loss = nn::cross_entropy(z0, labels).mean;

  nn::AdamConfig adam;
  adam.lr = lr;
  const std::size_t row =
      static_cast<std::size_t>(frames.numel()) / static_cast<std::size_t>(n);
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);

  for (int e = 0; e < epochs; ++e) {
    for (int i = n - 1; i > 0; --i) {
      const int j =
          static_cast<int>(splitmix64(shuffle_state) % static_cast<std::uint64_t>(i + 1));
      std::swap(perm[i], perm[j]);
    }
    for (int lo = 0; lo < n; lo += minibatch) {
      const int hi = std::min(n, lo + minibatch);
      const int m = hi - lo;
      nn::Tensor mb_frames({m, frames.dim(1), frames.dim(2), frames.dim(3)});
      std::vector<int> mb_actions(static_cast<std::size_t>(m));
      std::vector<int> mb_labels(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) {
        const int g = perm[static_cast<std::size_t>(lo + i)];
        std::memcpy(mb_frames.data() + static_cast<std::size_t>(i) * row,
                    frames.data() + static_cast<std::size_t>(g) * row, row * sizeof(double));
        mb_actions[static_cast<std::size_t>(i)] = actions[static_cast<std::size_t>(g)];
        mb_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(g)];
      }
      encoder_.zero_grads();
      head_.zero_grads();
      const nn::Tensor z = logits(mb_frames, mb_actions);
      const nn::CrossEntropyResult ce = nn::cross_entropy(z, mb_labels);
      const nn::Tensor dconcat = head_.backward(ce.dlogits);
      nn::Tensor dfeat({m, kEncoderOut});
      for (int i = 0; i < m; ++i)
        std::memcpy(dfeat.data() + static_cast<std::size_t>(i) * kEncoderOut,
                    dconcat.data() + static_cast<std::size_t>(i) * (kEncoderOut + action_count_),
                    sizeof(double) * kEncoderOut);
      encoder_.backward(dfeat);
      encoder_.adam_step(adam);
      head_.adam_step(adam);
    }
  }
  return pre_loss;
}

std::int64_t AepPredictor::param_count() const {
  return encoder_.param_count() + head_.param_count();
}

std::vector<nn::Tensor*> AepPredictor::params() {
  std::vector<nn::Tensor*> out;
  for (nn::Network* net : {&encoder_, &head_})
    for (nn::Tensor* t : net->params()) out.push_back(t);
  return out;
}

void AepPredictor::save(const std::string& prefix) const {
  encoder_.save(prefix + ".enc");
  head_.save(prefix + ".head");
}

void AepPredictor::load(const std::string& prefix) {
  encoder_.load(prefix + ".enc");
  head_.load(prefix + ".head");
}

}  // namespace aep::intrinsic

#pragma once

#include <vector>

#include "nn/tensor.hpp"

namespace aep::nn {

// Row-wise stable softmax of logits [n, c].
Tensor softmax(const Tensor& logits);

// Row-wise log-softmax of logits [n, c].
Tensor log_softmax(const Tensor& logits);

struct CrossEntropyResult {
  std::vector<double> losses;  // per-sample -log p[target]
  double mean = 0.0;
  Tensor dlogits;  // gradient of the MEAN loss w.r.t. logits: (p - onehot)/n
};

// Softmax cross-entropy computed from logits in one fused, stable pass.
CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& targets);

// Entropy of each categorical distribution given logits [n, c].
std::vector<double> entropy_from_logits(const Tensor& logits);

}  // namespace aep::nn

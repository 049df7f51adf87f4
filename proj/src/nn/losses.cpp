#include "nn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace aep::nn {

namespace {
void check_2d(const Tensor& logits) {
  if (logits.rank() != 2) throw ConfigError("loss: logits must be [n, c]");
}
}  // namespace

Tensor softmax(const Tensor& logits) {
  check_2d(logits);
  const int n = logits.dim(0), c = logits.dim(1);
  Tensor p({n, c});
  for (int i = 0; i < n; ++i) {
    const double* xi = logits.data() + i * c;
    double* pi = p.data() + i * c;
    double mx = xi[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) {
      pi[j] = std::exp(xi[j] - mx);
      z += pi[j];
    }
    for (int j = 0; j < c; ++j) pi[j] /= z;
  }
  return p;
}

Tensor log_softmax(const Tensor& logits) {
  check_2d(logits);
  const int n = logits.dim(0), c = logits.dim(1);
  Tensor lp({n, c});
  for (int i = 0; i < n; ++i) {
    const double* xi = logits.data() + i * c;
    double* li = lp.data() + i * c;
    double mx = xi[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(xi[j] - mx);
    const double lz = mx + std::log(z);
    for (int j = 0; j < c; ++j) li[j] = xi[j] - lz;
  }
  return lp;
}

CrossEntropyResult cross_entropy(const Tensor& logits, const std::vector<int>& targets) {
  check_2d(logits);
  const int n = logits.dim(0), c = logits.dim(1);
  if (static_cast<int>(targets.size()) != n)
    throw ConfigError("loss: target count must match batch size");
  for (int t : targets)
    if (t < 0 || t >= c) throw InputError("loss: target class out of range");

  CrossEntropyResult out;
  out.losses.resize(n);
  out.dlogits = Tensor({n, c});
  Tensor lp = log_softmax(logits);
  const double inv_n = 1.0 / n;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double* li = lp.data() + i * c;
    double* di = out.dlogits.data() + i * c;
    out.losses[i] = -li[targets[i]];
    total += out.losses[i];
    for (int j = 0; j < c; ++j) di[j] = std::exp(li[j]) * inv_n;
    di[targets[i]] -= inv_n;
  }
  out.mean = total * inv_n;
  return out;
}

std::vector<double> entropy_from_logits(const Tensor& logits) {
  check_2d(logits);
  const int n = logits.dim(0), c = logits.dim(1);
  Tensor lp = log_softmax(logits);
  std::vector<double> h(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double* li = lp.data() + i * c;
    double s = 0.0;
    for (int j = 0; j < c; ++j) s -= std::exp(li[j]) * li[j];
    h[i] = s;
  }
  return h;
}

}  // namespace aep::nn

#include "nn/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "common/error.hpp"

namespace aep::nn {

Network::Network(std::uint64_t seed, std::vector<int> input_shape)
    : input_shape_(std::move(input_shape)), cur_shape_(input_shape_), rng_(seed) {
  if (input_shape_.empty()) throw ConfigError("network: empty input shape");
  for (int d : input_shape_)
    if (d <= 0) throw ConfigError("network: non-positive input dim");
}

Network& Network::add_conv2d(int out_c, int ksize, int stride, Init init) {
  if (cur_shape_.size() != 3)
    throw ConfigError("network: conv2d needs a [c, h, w] input");
  auto layer = std::make_unique<Conv2d>(cur_shape_[0], out_c, ksize, stride, init, rng_);
  cur_shape_ = layer->output_shape(cur_shape_);
  layers_.push_back(std::move(layer));
  moments_ready_ = false;
  return *this;
}

Network& Network::add_dense(int out, Init init) {
  if (cur_shape_.size() != 1) throw ConfigError("network: dense needs a flat input");
  auto layer = std::make_unique<Dense>(cur_shape_[0], out, init, rng_);
  cur_shape_ = layer->output_shape(cur_shape_);
  layers_.push_back(std::move(layer));
  moments_ready_ = false;
  return *this;
}

Network& Network::add_relu() {
  layers_.push_back(std::make_unique<Relu>());
  return *this;
}

Network& Network::add_flatten() {
  auto layer = std::make_unique<Flatten>();
  cur_shape_ = layer->output_shape(cur_shape_);
  layers_.push_back(std::move(layer));
  return *this;
}

Network& Network::add_softmax() {
  if (cur_shape_.size() != 1) throw ConfigError("network: softmax needs a flat input");
  layers_.push_back(std::make_unique<Softmax>());
  return *this;
}

Tensor Network::forward(const Tensor& x) {
  const auto& s = x.shape();
  if (s.size() != input_shape_.size() + 1)
    throw ConfigError("network: input rank mismatch");
  for (std::size_t i = 0; i < input_shape_.size(); ++i)
    if (s[i + 1] != input_shape_[i]) throw ConfigError("network: input shape mismatch");
  Tensor y = x;
  for (auto& layer : layers_) y = layer->forward(y);
  forward_done_ = true;
  return y;
}

Tensor Network::backward(const Tensor& dy) {
  if (!forward_done_) throw StateError("network: backward before forward");
  Tensor g = dy;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

void Network::zero_grads() {
  for (auto& layer : layers_) layer->zero_grads();
}

std::vector<Tensor*> Network::params() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_)
    for (Tensor* p : layer->params()) out.push_back(p);
  return out;
}

std::vector<Tensor*> Network::param_grads() {
  std::vector<Tensor*> out;
  for (auto& layer : layers_)
    for (Tensor* g : layer->param_grads()) out.push_back(g);
  return out;
}

std::int64_t Network::param_count() const {
  std::int64_t n = 0;
  for (const auto& layer : layers_)
    for (Tensor* p : const_cast<Layer&>(*layer).params()) n += p->numel();
  return n;
}

void Network::ensure_moments() {
  if (moments_ready_) return;
  adam_m_.clear();
  adam_v_.clear();
  for (Tensor* p : params()) {
    adam_m_.emplace_back(Tensor(p->shape()));
    adam_v_.emplace_back(Tensor(p->shape()));
  }
  moments_ready_ = true;
}

bool Network::adam_step(const AdamConfig& cfg, double grad_scale) {
  ensure_moments();
  auto ps = params();
  auto gs = param_grads();
  for (Tensor* g : gs) {
    if (!g->all_finite()) {
      std::fprintf(stderr, "warning: non-finite gradient, skipping update\n");
      zero_grads();
      return false;
    }
  }
  ++adam_t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam_t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam_t_));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Tensor& p = *ps[i];
    Tensor& g = *gs[i];
    Tensor& m = adam_m_[i];
    Tensor& v = adam_v_[i];
    for (std::int64_t j = 0; j < p.numel(); ++j) {
      const double gj = g[j] * grad_scale;
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * gj;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * gj * gj;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
  zero_grads();
  return true;
}

void Network::save(const std::string& path) const {
  auto& self = const_cast<Network&>(*this);
  self.ensure_moments();
  nlohmann::json meta;
  meta["format"] = "aep-net-v1";
  meta["input_shape"] = input_shape_;
  meta["adam_steps"] = adam_t_;
  nlohmann::json shapes = nlohmann::json::array();
  std::int64_t total = 0;
  for (Tensor* p : self.params()) {
    shapes.push_back(p->shape());
    total += p->numel();
  }
  meta["param_shapes"] = shapes;
  meta["param_count"] = total;

  std::ofstream jf(path + ".json");
  if (!jf) throw IoError("network: cannot write " + path + ".json");
  jf << meta.dump(2) << "\n";

  std::ofstream bf(path + ".bin", std::ios::binary);
  if (!bf) throw IoError("network: cannot write " + path + ".bin");
  auto dump = [&bf, &path](const Tensor& t) {
    bf.write(reinterpret_cast<const char*>(t.data()),
             static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (!bf) throw IoError("network: write failed for " + path + ".bin");
  };
  for (Tensor* p : self.params()) dump(*p);
  for (const Tensor& m : adam_m_) dump(m);
  for (const Tensor& v : adam_v_) dump(v);
}

void Network::load(const std::string& path) {
  ensure_moments();
  std::ifstream jf(path + ".json");
  if (!jf) throw IoError("network: cannot read " + path + ".json");
  nlohmann::json meta;
  try {
    jf >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("network: bad manifest: ") + e.what());
  }
  if (meta.value("format", "") != "aep-net-v1")
    throw IoError("network: unknown checkpoint format");

  auto ps = params();
  auto shapes = meta.at("param_shapes");
  if (shapes.size() != ps.size()) throw IoError("network: checkpoint layer count mismatch");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    std::vector<int> want = shapes[i].get<std::vector<int>>();
    if (want != ps[i]->shape()) throw IoError("network: checkpoint shape mismatch");
  }

  std::ifstream bf(path + ".bin", std::ios::binary);
  if (!bf) throw IoError("network: cannot read " + path + ".bin");
  auto slurp = [&bf, &path](Tensor& t) {
    bf.read(reinterpret_cast<char*>(t.data()),
            static_cast<std::streamsize>(t.numel() * sizeof(double)));
    if (bf.gcount() != static_cast<std::streamsize>(t.numel() * sizeof(double)))
      throw IoError("network: truncated checkpoint " + path + ".bin");
  };
  for (Tensor* p : ps) slurp(*p);
  for (Tensor& m : adam_m_) slurp(m);
  for (Tensor& v : adam_v_) slurp(v);
  adam_t_ = meta.value("adam_steps", std::int64_t{0});
}

}  // namespace aep::nn

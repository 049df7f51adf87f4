#include "nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "common/la.hpp"

namespace aep::nn {

void Layer::zero_grads() {
  for (Tensor* g : param_grads()) g->fill(0.0);
}

double uniform_init_limit(Init init, int fan_in, int fan_out) {
  switch (init) {
    case Init::He:
      return std::sqrt(6.0 / fan_in);
    case Init::Xavier:
      return std::sqrt(6.0 / (fan_in + fan_out));
  }
  return 0.0;
}

namespace {
void uniform_fill(Tensor& t, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (std::int64_t i = 0; i < t.numel(); ++i) t[i] = dist(rng);
}
}  // namespace

// ---------------------------------------------------------------- Conv2d

Conv2d::Conv2d(int in_c, int out_c, int ksize, int stride, Init init, std::mt19937_64& rng)
    : in_c_(in_c),
      out_c_(out_c),
      k_(ksize),
      stride_(stride),
      w_({out_c, in_c * ksize * ksize}),
      b_({out_c}),
      dw_({out_c, in_c * ksize * ksize}),
      db_({out_c}) {
  if (ksize <= 0 || stride <= 0) throw ConfigError("conv2d: bad kernel/stride");
  uniform_fill(w_, uniform_init_limit(init, in_c * ksize * ksize, out_c), rng);
}

std::vector<int> Conv2d::output_shape(const std::vector<int>& in) const {
  if (in.size() != 3 || in[0] != in_c_)
    throw ConfigError("conv2d: input shape must be [in_c, h, w]");
  int oh = (in[1] - k_) / stride_ + 1;
  int ow = (in[2] - k_) / stride_ + 1;
  if (in[1] < k_ || in[2] < k_) throw ConfigError("conv2d: input smaller than kernel");
  return {out_c_, oh, ow};
}

void Conv2d::im2col(const double* x, double* col) const {
  // col is [in_c * k * k, out_h * out_w]
  const int p = out_h_ * out_w_;
  int r = 0;
  for (int c = 0; c < in_c_; ++c) {
    const double* xc = x + static_cast<std::size_t>(c) * in_h_ * in_w_;
    for (int ki = 0; ki < k_; ++ki) {
      for (int kj = 0; kj < k_; ++kj, ++r) {
        double* dst = col + static_cast<std::size_t>(r) * p;
        for (int oy = 0; oy < out_h_; ++oy) {
          const double* src = xc + (oy * stride_ + ki) * in_w_ + kj;
          for (int ox = 0; ox < out_w_; ++ox) dst[oy * out_w_ + ox] = src[ox * stride_];
        }
      }
    }
  }
}

Tensor Conv2d::forward(const Tensor& x) {
  const auto& s = x.shape();
  if (s.size() != 4 || s[1] != in_c_) throw ConfigError("conv2d: expected [n, in_c, h, w]");
  in_h_ = s[2];
  in_w_ = s[3];
  out_h_ = (in_h_ - k_) / stride_ + 1;
  out_w_ = (in_w_ - k_) / stride_ + 1;
  if (in_h_ < k_ || in_w_ < k_) throw ConfigError("conv2d: input smaller than kernel");

  const int n = s[0];
  const int rows = in_c_ * k_ * k_;
  const int p = out_h_ * out_w_;
  Tensor y({n, out_c_, out_h_, out_w_});
  const std::size_t cs = static_cast<std::size_t>(rows) * p;
  col_cache_.resize(static_cast<std::size_t>(n) * cs);
  const std::size_t xs = static_cast<std::size_t>(in_c_) * in_h_ * in_w_;
  const std::size_t ys = static_cast<std::size_t>(out_c_) * p;
  for (int i = 0; i < n; ++i) {
    double* col = col_cache_.data() + i * cs;
    im2col(x.data() + i * xs, col);
    la::matmul(out_c_, rows, p, w_.data(), col, y.data() + i * ys);
    double* yo = y.data() + i * ys;
    for (int c = 0; c < out_c_; ++c) {
      const double bias = b_[c];
      for (int j = 0; j < p; ++j) yo[c * p + j] += bias;
    }
  }
  n_cache_ = n;
  has_cache_ = true;
  return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
  if (!has_cache_ || dy.dim(0) != n_cache_)
    throw StateError("conv2d: backward before matching forward");
  const int n = n_cache_;
  const int rows = in_c_ * k_ * k_;
  const int p = out_h_ * out_w_;
  Tensor dx({n, in_c_, in_h_, in_w_});
  const std::size_t cs = static_cast<std::size_t>(rows) * p;
  dcol_.resize(cs);
  const std::size_t xs = static_cast<std::size_t>(in_c_) * in_h_ * in_w_;
  const std::size_t ys = static_cast<std::size_t>(out_c_) * p;

  for (int i = 0; i < n; ++i) {
    const double* dyo = dy.data() + i * ys;
    const double* col = col_cache_.data() + i * cs;
    // dW += dY * col^T ; db += row sums of dY
    la::gemm(false, true, out_c_, rows, p, 1.0, dyo, p, col, p, 1.0, dw_.data(), rows);
    for (int c = 0; c < out_c_; ++c) {
      double s = 0.0;
      for (int j = 0; j < p; ++j) s += dyo[c * p + j];
      db_[c] += s;
    }
    // dcol = W^T * dY, then scatter back to dx
    la::gemm(true, false, rows, p, out_c_, 1.0, w_.data(), rows, dyo, p, 0.0, dcol_.data(), p);
    double* dxi = dx.data() + i * xs;
    int r = 0;
    for (int c = 0; c < in_c_; ++c) {
      double* dxc = dxi + static_cast<std::size_t>(c) * in_h_ * in_w_;
      for (int ki = 0; ki < k_; ++ki) {
        for (int kj = 0; kj < k_; ++kj, ++r) {
          const double* src = dcol_.data() + static_cast<std::size_t>(r) * p;
          for (int oy = 0; oy < out_h_; ++oy) {
            double* dst = dxc + (oy * stride_ + ki) * in_w_ + kj;
            for (int ox = 0; ox < out_w_; ++ox) dst[ox * stride_] += src[oy * out_w_ + ox];
          }
        }
      }
    }
  }
  return dx;
}

// ----------------------------------------------------------------- Dense

Dense::Dense(int in, int out, Init init, std::mt19937_64& rng)
    : in_(in), out_(out), w_({out, in}), b_({out}), dw_({out, in}), db_({out}) {
  uniform_fill(w_, uniform_init_limit(init, in, out), rng);
}

std::vector<int> Dense::output_shape(const std::vector<int>& in) const {
  if (in.size() != 1 || in[0] != in_) throw ConfigError("dense: input shape must be [in]");
  return {out_};
}

Tensor Dense::forward(const Tensor& x) {
  const auto& s = x.shape();
  if (s.size() != 2 || s[1] != in_) throw ConfigError("dense: expected [n, in]");
  const int n = s[0];
  Tensor y({n, out_});
  // y = x W^T
  la::gemm(false, true, n, out_, in_, 1.0, x.data(), in_, w_.data(), in_, 0.0, y.data(), out_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < out_; ++j) y[i * out_ + j] += b_[j];
  x_cache_ = x;
  has_cache_ = true;
  return y;
}

Tensor Dense::backward(const Tensor& dy) {
  if (!has_cache_) throw StateError("dense: backward before forward");
  const int n = dy.dim(0);
  // dW += dY^T X ; db += column sums ; dX = dY W
  la::gemm(true, false, out_, in_, n, 1.0, dy.data(), out_, x_cache_.data(), in_, 1.0,
           dw_.data(), in_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < out_; ++j) db_[j] += dy[i * out_ + j];
  Tensor dx({n, in_});
  la::gemm(false, false, n, in_, out_, 1.0, dy.data(), out_, w_.data(), in_, 0.0, dx.data(), in_);
  return dx;
}

// ------------------------------------------------------------------ Relu

Tensor Relu::forward(const Tensor& x) {
  shape_cache_ = x.shape();
  mask_.assign(static_cast<std::size_t>(x.numel()), 0);
  Tensor y(x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) {
    if (x[i] > 0.0) {
      y[i] = x[i];
      mask_[static_cast<std::size_t>(i)] = 1;
    }
  }
  return y;
}

Tensor Relu::backward(const Tensor& dy) {
  if (mask_.empty() || shape_cache_ != dy.shape())
    throw StateError("relu: backward before matching forward");
  Tensor dx(dy.shape());
  for (std::int64_t i = 0; i < dy.numel(); ++i)
    dx[i] = mask_[static_cast<std::size_t>(i)] ? dy[i] : 0.0;
  return dx;
}

// --------------------------------------------------------------- Flatten

std::vector<int> Flatten::output_shape(const std::vector<int>& in) const {
  int n = 1;
  for (int d : in) n *= d;
  return {n};
}

Tensor Flatten::forward(const Tensor& x) {
  shape_cache_ = x.shape();
  int flat = 1;
  for (std::size_t i = 1; i < shape_cache_.size(); ++i) flat *= shape_cache_[i];
  return x.reshaped({x.dim(0), flat});
}

Tensor Flatten::backward(const Tensor& dy) {
  if (shape_cache_.empty()) throw StateError("flatten: backward before forward");
  auto shape = shape_cache_;
  shape[0] = dy.dim(0);
  return dy.reshaped(shape);
}

// --------------------------------------------------------------- Softmax

Tensor Softmax::forward(const Tensor& x) {
  if (x.rank() != 2) throw ConfigError("softmax: expected [n, c]");
  const int n = x.dim(0), c = x.dim(1);
  Tensor y({n, c});
  for (int i = 0; i < n; ++i) {
    const double* xi = x.data() + i * c;
    double* yi = y.data() + i * c;
    double mx = xi[0];
    for (int j = 1; j < c; ++j) mx = std::max(mx, xi[j]);
    double z = 0.0;
    for (int j = 0; j < c; ++j) {
      yi[j] = std::exp(xi[j] - mx);
      z += yi[j];
    }
    for (int j = 0; j < c; ++j) yi[j] /= z;
  }
  y_cache_ = y;
  has_cache_ = true;
  return y;
}

Tensor Softmax::backward(const Tensor& dy) {
  if (!has_cache_) throw StateError("softmax: backward before forward");
  const int n = dy.dim(0), c = dy.dim(1);
  Tensor dx({n, c});
  for (int i = 0; i < n; ++i) {
    const double* yi = y_cache_.data() + i * c;
    const double* di = dy.data() + i * c;
    double dot = 0.0;
    for (int j = 0; j < c; ++j) dot += di[j] * yi[j];
    for (int j = 0; j < c; ++j) dx[i * c + j] = yi[j] * (di[j] - dot);
  }
  return dx;
}

}  // namespace aep::nn

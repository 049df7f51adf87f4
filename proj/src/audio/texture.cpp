#include "audio/texture.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "audio/fft.hpp"
#include "common/error.hpp"

namespace aep::audio {

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangular weight of band b at frequency f (Hz).
double band_weight(const std::array<double, kTextureBands + 2>& e, int b, double f) {
  const double lo = e[static_cast<std::size_t>(b)];
  const double mid = e[static_cast<std::size_t>(b) + 1];
  const double hi = e[static_cast<std::size_t>(b) + 2];
  if (f <= lo || f >= hi) return 0.0;
  return f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
}

constexpr double kFlatEnvelopeStd = 1e-12;

}  // namespace

std::array<double, kTextureBands + 2> texture_band_edges_hz() {
  std::array<double, kTextureBands + 2> edges{};
  const double m_lo = hz_to_mel(100.0);
  const double m_hi = hz_to_mel(8000.0);
  for (int i = 0; i < kTextureBands + 2; ++i)
    edges[static_cast<std::size_t>(i)] =
        mel_to_hz(m_lo + (m_hi - m_lo) * i / (kTextureBands + 1));
  return edges;
}

SoundTexture extract_texture(const Waveform& w) {
  const int n = static_cast<int>(w.samples.size());
  if (n < 256) throw InputError("extract_texture: waveform shorter than 256 samples");

  const std::size_t nfft = next_pow2(static_cast<std::size_t>(n));
  std::vector<std::complex<double>> spec(nfft, {0.0, 0.0});
  for (int i = 0; i < n; ++i) spec[static_cast<std::size_t>(i)] = {w.samples[static_cast<std::size_t>(i)], 0.0};
  fft_inplace(spec, false);

  const auto edges = texture_band_edges_hz();
  const double bin_hz = static_cast<double>(w.sample_rate) / static_cast<double>(nfft);

  // Per-band: weight the complex spectrum symmetrically, invert, envelope.
  std::vector<std::vector<double>> env(kTextureBands, std::vector<double>(static_cast<std::size_t>(n)));
  const int window = std::max(1, w.sample_rate / 500);  // 2 ms
  std::vector<std::complex<double>> sub(nfft);
  for (int b = 0; b < kTextureBands; ++b) {
    for (std::size_t k = 0; k < nfft; ++k) {
      const std::size_t mirror = k <= nfft / 2 ? k : nfft - k;
      const double f = static_cast<double>(mirror) * bin_hz;
      sub[k] = spec[k] * band_weight(edges, b, f);
    }
    fft_inplace(sub, true);

    auto& e = env[static_cast<std::size_t>(b)];
    double acc = 0.0;
    for (int t = 0; t < n; ++t) {
      acc += std::abs(sub[static_cast<std::size_t>(t)].real());
      if (t >= window) acc -= std::abs(sub[static_cast<std::size_t>(t - window)].real());
      e[static_cast<std::size_t>(t)] = acc / std::min(t + 1, window);
    }
  }

  SoundTexture tex;
  tex.features.assign(kTextureDim, 0.0);
  std::array<double, kTextureBands> mean{}, sd{};
  for (int b = 0; b < kTextureBands; ++b) {
    const auto& e = env[static_cast<std::size_t>(b)];
    double m = 0.0;
    for (double v : e) m += v;
    m /= n;
    double var = 0.0, cube = 0.0;
    for (double v : e) {
      const double d = v - m;
      var += d * d;
      cube += d * d * d;
    }
    var /= n;
    cube /= n;
    const double s = std::sqrt(var);
    mean[static_cast<std::size_t>(b)] = m;
    sd[static_cast<std::size_t>(b)] = s;
    tex.features[static_cast<std::size_t>(b)] = m;
    tex.features[static_cast<std::size_t>(kTextureBands + b)] = s;
    tex.features[static_cast<std::size_t>(2 * kTextureBands + b)] =
        s > kFlatEnvelopeStd ? cube / (s * s * s) : 0.0;
  }

  for (int b = 0; b + 1 < kTextureBands; ++b) {
    const auto& ea = env[static_cast<std::size_t>(b)];
    const auto& eb = env[static_cast<std::size_t>(b) + 1];
    double corr = 0.0;
    if (sd[static_cast<std::size_t>(b)] > kFlatEnvelopeStd &&
        sd[static_cast<std::size_t>(b) + 1] > kFlatEnvelopeStd) {
      double cov = 0.0;
      for (int t = 0; t < n; ++t)
        cov += (ea[static_cast<std::size_t>(t)] - mean[static_cast<std::size_t>(b)]) *
               (eb[static_cast<std::size_t>(t)] - mean[static_cast<std::size_t>(b) + 1]);
      cov /= n;
      corr = cov / (sd[static_cast<std::size_t>(b)] * sd[static_cast<std::size_t>(b) + 1]);
    }
    tex.features[static_cast<std::size_t>(3 * kTextureBands + b)] = corr;
  }
  return tex;
}

double texture_distance(const SoundTexture& a, const SoundTexture& b) {
  if (a.features.size() != b.features.size())
    throw ConfigError("texture_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.features.size(); ++i) {
    const double d = a.features[i] - b.features[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace aep::audio

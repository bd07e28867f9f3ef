#include "lipstream/mel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lipstream {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLogFloor = 1e-10;

// Piecewise mel scale: linear to 1 kHz, logarithmic above with ratio 6.4
// per 27 steps.
double hz_to_mel(double hz) {
  if (hz < 1000.0) return hz * 15.0 / 1000.0;
  return 15.0 + 27.0 * std::log(hz / 1000.0) / std::log(6.4);
}

double mel_to_hz(double mel) {
  if (mel < 15.0) return mel * 1000.0 / 15.0;
  return 1000.0 * std::exp(std::log(6.4) * (mel - 15.0) / 27.0);
}

void validate(const MelConfig& cfg) {
  if (cfg.fft_size <= 0 || (cfg.fft_size & (cfg.fft_size - 1)) != 0)
    throw std::invalid_argument("mel: fft size must be a power of two");
  if (cfg.hop <= 0) throw std::invalid_argument("mel: non-positive hop");
  if (cfg.n_mels <= 0) throw std::invalid_argument("mel: no bands");
  if (!(cfg.fmax > cfg.fmin) || cfg.fmin < 0)
    throw std::invalid_argument("mel: bad band range");
  if (cfg.sample_rate <= 0)
    throw std::invalid_argument("mel: non-positive rate");
}

}  // namespace

std::int64_t mel_frame_count(std::int64_t n_samples, const MelConfig& cfg) {
  validate(cfg);
  if (n_samples < cfg.fft_size) return 0;
  return 1 + (n_samples - cfg.fft_size) / cfg.hop;
}

void fft_radix2(std::vector<std::complex<double>>& buf) {
  const std::size_t n = buf.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(buf[i], buf[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * kPi / double(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = buf[i + k];
        std::complex<double> v = buf[i + k + len / 2] * w;
        buf[i + k] = u + v;
        buf[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

MelSpectrogram compute_mel(const AudioBuffer& audio, const MelConfig& cfg) {
  validate(cfg);
  const int N = cfg.fft_size;
  const int bins = N / 2 + 1;
  const std::int64_t frames =
      mel_frame_count(std::int64_t(audio.samples.size()), cfg);
  MelSpectrogram out;
  out.n_frames = frames;
  out.n_mels = cfg.n_mels;
  if (frames == 0) return out;
  out.data.resize(static_cast<std::size_t>(frames) * cfg.n_mels);

  std::vector<double> window(N);
  for (int i = 0; i < N; ++i)
    window[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / N));

  // Band edges: n_mels + 2 points equally spaced on the mel axis.
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(cfg.fmax);
  std::vector<double> edge_hz(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    edge_hz[i] =
        mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

  // weights[m][b], area-normalized triangles.
  std::vector<std::vector<double>> weights(cfg.n_mels,
                                           std::vector<double>(bins, 0.0));
  for (int m = 0; m < cfg.n_mels; ++m) {
    double lo = edge_hz[m], mid = edge_hz[m + 1], hi = edge_hz[m + 2];
    double norm = 2.0 / (hi - lo);
    for (int b = 0; b < bins; ++b) {
      double f = double(b) * cfg.sample_rate / N;
      double w = 0.0;
      if (f > lo && f < hi)
        w = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      weights[m][b] = w * norm;
    }
  }

  std::vector<std::complex<double>> buf(N);
  std::vector<double> power(bins);
  for (std::int64_t fr = 0; fr < frames; ++fr) {
    const std::size_t off = static_cast<std::size_t>(fr) * cfg.hop;
    for (int i = 0; i < N; ++i)
      buf[i] = {audio.samples[off + i] / 32768.0 * window[i], 0.0};
    fft_radix2(buf);
    for (int b = 0; b < bins; ++b) power[b] = std::norm(buf[b]);
    for (int m = 0; m < cfg.n_mels; ++m) {
      double acc = 0.0;
      for (int b = 0; b < bins; ++b) acc += weights[m][b] * power[b];
      out.data[static_cast<std::size_t>(fr) * cfg.n_mels + m] =
          static_cast<float>(std::log(std::max(acc, kLogFloor)));
    }
  }
  return out;
}

void write_mel(const std::string& path, const MelSpectrogram& mel) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("mel: cannot create " + path);
  auto put_u32 = [&](std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = char((v >> (8 * i)) & 0xff);
    out.write(b, 4);
  };
  put_u32(static_cast<std::uint32_t>(mel.n_frames));
  put_u32(static_cast<std::uint32_t>(mel.n_mels));
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(mel.data.data()),
            std::streamsize(mel.data.size() * 4));
  if (!out) throw std::runtime_error("mel: write failed: " + path);
}

MelSpectrogram read_mel(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("mel: cannot open " + path);
  auto get_u32 = [&]() {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
  };
  MelSpectrogram mel;
  mel.n_frames = get_u32();
  mel.n_mels = static_cast<int>(get_u32());
  if (!in) throw std::runtime_error("mel: truncated header: " + path);
  mel.data.resize(static_cast<std::size_t>(mel.n_frames) * mel.n_mels);
  in.read(reinterpret_cast<char*>(mel.data.data()),
          std::streamsize(mel.data.size() * 4));
  if (!in) throw std::runtime_error("mel: truncated data: " + path);
  return mel;
}

}  // namespace lipstream

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "lipstream/audio.hpp"

namespace lipstream {

struct MelConfig {
  int sample_rate = 16000;
  int fft_size = 1024;
  int hop = 256;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
};

// Log-mel frames, row major [frame][mel].
struct MelSpectrogram {
  std::int64_t n_frames = 0;
  int n_mels = 0;
  std::vector<float> data;

  float at(std::int64_t frame, int mel) const {
    return data[static_cast<std::size_t>(frame) * n_mels + mel];
  }
};

// Frames produced for n_samples of input: windows of fft_size every hop
// samples, no padding. Zero when the input is shorter than one window.
std::int64_t mel_frame_count(std::int64_t n_samples,
                             const MelConfig& cfg = {});

// Periodic Hann window, power spectrum, triangular area-normalized mel
// filters, natural log with a 1e-10 floor.
MelSpectrogram compute_mel(const AudioBuffer& audio, const MelConfig& cfg = {});

// In-place radix-2 FFT; size must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& buf);

// File layout: u32 n_frames, u32 n_mels, then f32 data, all little-endian.
void write_mel(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram read_mel(const std::string& path);

}  // namespace lipstream

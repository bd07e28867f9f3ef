#pragma once

#include <cstdint>
#include <vector>

#include "lipstream/clock.hpp"

namespace lipstream {

// Canonical internal format: mono signed 16-bit PCM, 16 kHz by default.
// start is the media timestamp of samples[0].
struct AudioBuffer {
  std::vector<std::int16_t> samples;
  int sample_rate = 16000;
  Timestamp start = 0;

  DurationMs duration_ms() const;
  Timestamp end() const { return start + duration_ms(); }
  bool empty() const { return samples.empty(); }
};

// b must continue a at the same rate; b.start may deviate from a.end() by at
// most 1 ms (rounding slack from duration_ms).
AudioBuffer audio_concat(const AudioBuffer& a, const AudioBuffer& b);

AudioBuffer make_silence(DurationMs ms, int sample_rate = 16000,
                         Timestamp start = 0);
AudioBuffer make_tone(double freq_hz, DurationMs ms, double amplitude,
                      int sample_rate = 16000, Timestamp start = 0);
AudioBuffer make_square(double freq_hz, DurationMs ms, double amplitude,
                        int sample_rate = 16000, Timestamp start = 0);

}  // namespace lipstream

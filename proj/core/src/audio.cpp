#include "lipstream/audio.hpp"

#include <cmath>
#include <stdexcept>

namespace lipstream {

DurationMs AudioBuffer::duration_ms() const {
  if (sample_rate <= 0) throw std::logic_error("AudioBuffer: bad sample rate");
  return std::llround(1000.0 * static_cast<double>(samples.size()) /
                      sample_rate);
}

AudioBuffer audio_concat(const AudioBuffer& a, const AudioBuffer& b) {
  if (b.empty()) return a;
  if (a.empty()) return b;
  if (a.sample_rate != b.sample_rate)
    throw std::invalid_argument("audio_concat: sample-rate mismatch " +
                                std::to_string(a.sample_rate) + " vs " +
                                std::to_string(b.sample_rate));
  Timestamp expected = a.end();
  if (b.start < expected - 1 || b.start > expected + 1)
    throw std::invalid_argument(
        "audio_concat: non-contiguous buffers, expected start " +
        std::to_string(expected) + " ms, got " + std::to_string(b.start));
  AudioBuffer out = a;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

static std::size_t sample_count(DurationMs ms, int rate) {
  if (ms < 0 || rate <= 0) throw std::invalid_argument("bad buffer geometry");
  return static_cast<std::size_t>(ms) * static_cast<std::size_t>(rate) / 1000;
}

AudioBuffer make_silence(DurationMs ms, int sample_rate, Timestamp start) {
  AudioBuffer b;
  b.sample_rate = sample_rate;
  b.start = start;
  b.samples.assign(sample_count(ms, sample_rate), 0);
  return b;
}

AudioBuffer make_tone(double freq_hz, DurationMs ms, double amplitude,
                      int sample_rate, Timestamp start) {
  AudioBuffer b;
  b.sample_rate = sample_rate;
  b.start = start;
  std::size_t n = sample_count(ms, sample_rate);
  b.samples.resize(n);
  const double w = 2.0 * M_PI * freq_hz / sample_rate;
  const double a = amplitude * 32767.0;
  for (std::size_t i = 0; i < n; ++i)
    b.samples[i] = static_cast<std::int16_t>(std::llround(a * std::sin(w * i)));
  return b;
}

AudioBuffer make_square(double freq_hz, DurationMs ms, double amplitude,
                        int sample_rate, Timestamp start) {
  AudioBuffer b;
  b.sample_rate = sample_rate;
  b.start = start;
  std::size_t n = sample_count(ms, sample_rate);
  b.samples.resize(n);
  const double period = sample_rate / freq_hz;
  const auto a = static_cast<std::int16_t>(std::llround(amplitude * 32767.0));
  for (std::size_t i = 0; i < n; ++i) {
    double phase = std::fmod(static_cast<double>(i), period) / period;
    b.samples[i] = phase < 0.5 ? a : static_cast<std::int16_t>(-a);
  }
  return b;
}

}  // namespace lipstream

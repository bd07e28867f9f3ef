#pragma once

#include <cstdint>
#include <cstddef>

#include "lipstream/clock.hpp"

namespace lipstream {

// Reference level for the frame RMS. Decay tracks the loudest recent
// material with a half-life, MaxHold never forgets, Absolute pins the
// reference to full scale.
enum class PeakMode {
  Decay,
  MaxHold,
  Absolute,
};

struct VadConfig {
  PeakMode peak_mode = PeakMode::Decay;
  double peak_half_life_ms = 10000.0;
  double speech_threshold_db = -40.0;
  DurationMs frame_ms = 20;
};

// Frame-level energy gate. rms_db is the frame RMS relative to the tracked
// peak, clamped to -120 dB; a frame is speech when rms_db clears the
// threshold.
class VadTracker {
 public:
  explicit VadTracker(VadConfig cfg = {});

  struct FrameResult {
    double rms_db = -120.0;
    bool speech = false;
  };

  FrameResult update(const std::int16_t* samples, std::size_t count);

  double peak() const { return peak_; }
  const VadConfig& config() const { return cfg_; }
  void reset();

 private:
  VadConfig cfg_;
  double peak_ = 0.0;
};

}  // namespace lipstream

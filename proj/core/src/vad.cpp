#include "lipstream/vad.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lipstream {

namespace {
constexpr double kFullScale = 32767.0;
constexpr double kFloorDb = -120.0;
}  // namespace

VadTracker::VadTracker(VadConfig cfg) : cfg_(cfg) {
  if (cfg_.peak_half_life_ms <= 0)
    throw std::invalid_argument("vad: non-positive half life");
  if (cfg_.frame_ms <= 0)
    throw std::invalid_argument("vad: non-positive frame");
  reset();
}

void VadTracker::reset() {
  peak_ = cfg_.peak_mode == PeakMode::Absolute ? kFullScale : 0.0;
}

VadTracker::FrameResult VadTracker::update(const std::int16_t* samples,
                                           std::size_t count) {
  if (count == 0) throw std::invalid_argument("vad: empty frame");
  double sumsq = 0.0;
  double frame_max = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    double s = samples[i];
    sumsq += s * s;
    frame_max = std::max(frame_max, std::abs(s));
  }
  switch (cfg_.peak_mode) {
    case PeakMode::Decay:
      peak_ *= std::exp2(-double(cfg_.frame_ms) / cfg_.peak_half_life_ms);
      peak_ = std::max(peak_, frame_max);
      break;
    case PeakMode::MaxHold:
      peak_ = std::max(peak_, frame_max);
      break;
    case PeakMode::Absolute:
      break;
  }
  FrameResult r;
  double rms = std::sqrt(sumsq / double(count));
  if (rms > 0.0 && peak_ > 0.0)
    r.rms_db = std::max(kFloorDb, 20.0 * std::log10(rms / peak_));
  r.speech = r.rms_db > cfg_.speech_threshold_db;
  return r;
}

}  // namespace lipstream

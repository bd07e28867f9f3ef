#include "lipstream/visual_mocks.hpp"

#include <cstdlib>
#include <stdexcept>

#include "lipstream/rng.hpp"

namespace lipstream {

FaceBox mock_face_detect(std::int64_t frame_index, std::uint64_t seed) {
  std::uint64_t h = mix_str(seed, "facedetect");
  h = mix_u64(h, static_cast<std::uint64_t>(frame_index));
  auto wobble = [&h]() {
    return double(splitmix64(h) % 7) - 3.0;  // -3..+3 px
  };
  FaceBox box;
  box.cx = 320.0 + wobble();
  box.cy = 240.0 + wobble();
  box.w = 160.0;
  box.h = 200.0;
  return box;
}

LipsyncProfile wav2lip_fp32() { return {"wav2lip_fp32", 4500}; }

LipsyncProfile wav2lip_trt_fp16() { return {"wav2lip_trt_fp16", 960}; }

std::int64_t lipsync_cost_us(const LipsyncProfile& profile,
                             std::int64_t frames) {
  if (frames < 0) throw std::invalid_argument("lipsync: negative frames");
  return profile.per_frame_us * frames;
}

double lipsync_speedup(const LipsyncProfile& a, const LipsyncProfile& b,
                       std::int64_t frames) {
  return double(lipsync_cost_us(a, frames)) /
         double(lipsync_cost_us(b, frames));
}

LipsyncRender mock_lipsync(const LipsyncProfile& profile,
                           DurationMs audio_span_ms,
                           DurationMs frame_span_ms, std::int64_t n_frames) {
  if (n_frames < 2)
    throw std::invalid_argument("lipsync: need at least 2 frames");
  if (std::llabs(audio_span_ms - frame_span_ms) > 150)
    throw std::invalid_argument("lipsync: audio and frame spans diverge");
  LipsyncRender r;
  r.frames = n_frames;
  r.cost_us = lipsync_cost_us(profile, n_frames);
  return r;
}

}  // namespace lipstream

#pragma once

#include <cstdint>
#include <string>

#include "lipstream/clock.hpp"
#include "lipstream/frame_ring.hpp"

namespace lipstream {

// Detector stand-in: a stable face with deterministic per-frame wobble, so
// smoothing has something to do and reruns trace identically.
FaceBox mock_face_detect(std::int64_t frame_index, std::uint64_t seed);

// Renderer cost model. per_frame_us is the measured per-frame inference
// cost the profile represents.
struct LipsyncProfile {
  std::string name;
  std::int64_t per_frame_us = 0;
};

LipsyncProfile wav2lip_fp32();      // dense fp32 baseline
LipsyncProfile wav2lip_trt_fp16();  // fused fp16 engine

std::int64_t lipsync_cost_us(const LipsyncProfile& profile,
                             std::int64_t frames);

// Cost ratio of a over b for the same frame count.
double lipsync_speedup(const LipsyncProfile& a, const LipsyncProfile& b,
                       std::int64_t frames);

struct LipsyncRender {
  std::int64_t frames = 0;
  std::int64_t cost_us = 0;
};

// Mock render pass: validates that the audio span and the gathered frame
// span describe the same moment (within slack for the gather window and
// frame period) and reports the profile cost. Throws on a span mismatch
// over 150 ms or fewer than 2 frames.
LipsyncRender mock_lipsync(const LipsyncProfile& profile,
                           DurationMs audio_span_ms,
                           DurationMs frame_span_ms, std::int64_t n_frames);

}  // namespace lipstream

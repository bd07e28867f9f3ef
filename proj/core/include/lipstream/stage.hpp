#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lipstream/audio.hpp"
#include "lipstream/uuid.hpp"

namespace lipstream {

// Queue names of the translation chain, in flow order, plus the visual leg.
inline constexpr const char* kAudioQueue = "audio_queue";
inline constexpr const char* kTextQueue = "text_queue";
inline constexpr const char* kTranslationQueue = "translation_queue";
inline constexpr const char* kAudioOutputQueue = "audio_output_queue";
inline constexpr const char* kLipsyncQueue = "lipsync_queue";
inline constexpr const char* kFinalQueue = "final_queue";

// Cost model for one stage: fixed_ms per segment plus per_sec_ms for every
// second of media, both in milliseconds of service time.
struct StageProfile {
  std::string name;  // stt, mt, tts, lipsync, facedetect
  DurationMs fixed_ms = 0;
  double per_sec_ms = 0.0;
  double jitter = 0.0;  // fraction of the whole charge, uniform both ways
  std::uint64_t seed = 0;
};

// Deterministic integer charge: fixed + round(per_sec * media / 1000).
DurationMs service_ms(const StageProfile& p, DurationMs media_ms);
// Jittered: the whole base charge scales by 1 + jitter * (2u - 1) with u
// hash-uniform in (seed, stage name, segment uuid). jitter 0 reproduces the
// base exactly.
DurationMs service_ms(const StageProfile& p, DurationMs media_ms,
                      const Uuid& segment);

// Wire payload tags. Every payload starts with its tag as u32.
inline constexpr std::uint32_t kTagSegment = 1;
inline constexpr std::uint32_t kTagTranscript = 2;
inline constexpr std::uint32_t kTagTranslation = 3;
inline constexpr std::uint32_t kTagSynthAudio = 4;
inline constexpr std::uint32_t kTagAlignedPair = 5;
inline constexpr std::uint32_t kTagFinal = 6;

using WireBytes = std::shared_ptr<const std::vector<std::uint8_t>>;

std::uint32_t wire_tag(const std::vector<std::uint8_t>& payload);

struct SegmentMsg {
  Uuid uuid;
  Timestamp birth = 0;
  Timestamp begin = 0;  // media span within the source stream
  Timestamp end = 0;
  double confidence = 1.0;
  AudioBuffer audio;

  DurationMs duration_ms() const { return end - begin; }
};

// Transcript and translation share one shape; the tag tells them apart.
struct TextMsg {
  Uuid uuid;
  Timestamp birth = 0;
  Timestamp begin = 0;
  Timestamp end = 0;
  DurationMs source_duration_ms = 0;
  std::vector<std::string> tokens;
};

struct SynthAudioMsg {
  Uuid uuid;
  Timestamp birth = 0;
  Timestamp begin = 0;
  Timestamp end = 0;
  DurationMs source_duration_ms = 0;
  AudioBuffer audio;
};

struct AlignedPairMsg {
  Uuid uuid;
  Timestamp birth = 0;
  Timestamp begin = 0;
  Timestamp end = 0;
  DurationMs source_duration_ms = 0;
  DurationMs offset_ms = 0;  // positive: motion lags audio
  bool low_confidence = false;
  std::int64_t n_frames = 0;
  Timestamp first_frame_ts = 0;
  Timestamp last_frame_ts = 0;
  std::int64_t mel_frames = 0;
};

struct FinalMsg {
  Uuid uuid;
  Timestamp birth = 0;
  Timestamp begin = 0;
  Timestamp end = 0;
  DurationMs source_duration_ms = 0;
  std::int64_t frames_rendered = 0;
  DurationMs offset_ms = 0;
};

WireBytes encode_segment(const SegmentMsg& m);
SegmentMsg decode_segment(const std::vector<std::uint8_t>& b);
WireBytes encode_transcript(const TextMsg& m);
TextMsg decode_transcript(const std::vector<std::uint8_t>& b);
WireBytes encode_translation(const TextMsg& m);
TextMsg decode_translation(const std::vector<std::uint8_t>& b);
WireBytes encode_synth_audio(const SynthAudioMsg& m);
SynthAudioMsg decode_synth_audio(const std::vector<std::uint8_t>& b);
WireBytes encode_aligned_pair(const AlignedPairMsg& m);
AlignedPairMsg decode_aligned_pair(const std::vector<std::uint8_t>& b);
WireBytes encode_final(const FinalMsg& m);
FinalMsg decode_final(const std::vector<std::uint8_t>& b);

// Model stand-ins. Deterministic, media spans preserved end to end.
TextMsg mock_stt(const SegmentMsg& seg);  // one token per 300 ms
TextMsg mock_mt(const TextMsg& transcript);  // reverses token order
// Synthesized speech spans duration * ratio at the same media position.
SynthAudioMsg mock_tts(const TextMsg& translation, double duration_ratio = 1.0,
                       std::uint64_t seed = 0);

}  // namespace lipstream

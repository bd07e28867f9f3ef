#pragma once

#include <cstdint>
#include <vector>

#include "lipstream/audio.hpp"
#include "lipstream/frame_ring.hpp"

namespace lipstream {

// One speech burst followed by a pause, both in milliseconds.
struct BurstSpec {
  DurationMs speech_ms = 1400;
  DurationMs pause_ms = 600;
};

// Piecewise speech/silence layout for generated clips. The burst list cycles
// until the requested length is reached and the clip truncates wherever that
// lands. Spans must stay on the 20 ms analysis grid so rendered audio
// classifies exactly frame by frame.
struct SpeechPattern {
  DurationMs lead_silence_ms = 600;
  std::vector<BurstSpec> bursts{BurstSpec{}};
  double tone_hz = 220.0;
  double amplitude = 0.3;
};

struct PatternPiece {
  bool speech = false;
  Timestamp begin = 0;
  Timestamp end = 0;
};

// Speech/silence spans of the pattern truncated at total_ms. Adjacent spans
// of the same kind (zero-length pauses) merge.
std::vector<PatternPiece> pattern_pieces(const SpeechPattern& pattern,
                                         DurationMs total_ms);

// True when the final millisecond of the clip lies inside a burst. Scenario
// corpora require this so the tail segment always flushes.
bool pattern_ends_in_speech(const SpeechPattern& pattern, DurationMs total_ms);

// Mono PCM clip: silence is exact zero, bursts are a fixed tone.
AudioBuffer render_pattern(const SpeechPattern& pattern, DurationMs total_ms,
                           int sample_rate = 16000);

// Camera-style frame track. mouth_motion carries the speech envelope sampled
// at the frame timestamp; faces stay unset until detection runs. Pixel
// dimensions are declared for budget accounting without allocating planes.
std::vector<FrameRecord> render_pattern_frames(const SpeechPattern& pattern,
                                               DurationMs total_ms,
                                               double fps = 30.0,
                                               int pix_w = 640,
                                               int pix_h = 448);

// Cut points the segmenter must produce for this pattern: the midpoint of
// every pause of at least min_silence_ms whose speech resumes inside the
// clip and whose segment has reached min_segment_ms, plus forced splits at
// exactly max_segment_ms. Throws when a forced split would land inside a
// qualifying pause; generated corpora keep segments well under the cap.
std::vector<Timestamp> expected_cut_points(const SpeechPattern& pattern,
                                           DurationMs total_ms,
                                           DurationMs min_silence_ms,
                                           DurationMs min_segment_ms,
                                           DurationMs max_segment_ms);

// Segment durations implied by expected_cut_points plus the clip tail.
std::vector<DurationMs> expected_segment_durations(
    const SpeechPattern& pattern, DurationMs total_ms,
    DurationMs min_silence_ms, DurationMs min_segment_ms,
    DurationMs max_segment_ms);

}  // namespace lipstream

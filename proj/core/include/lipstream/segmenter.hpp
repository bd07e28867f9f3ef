#pragma once

#include <cstdint>
#include <vector>

#include "lipstream/audio.hpp"
#include "lipstream/vad.hpp"

namespace lipstream {

enum class CutCause { Pause, Forced, Eos };

struct RawSegment {
  Timestamp begin = 0;
  Timestamp end = 0;
  AudioBuffer audio;  // audio.start == begin
  double confidence = 1.0;
  CutCause cause = CutCause::Eos;

  DurationMs duration_ms() const { return end - begin; }
};

struct BoundaryContext {
  Timestamp pause_start = 0;
  DurationMs silence_run_ms = 0;
  DurationMs segment_span_ms = 0;  // pause_start minus segment start
};

struct BoundaryDecision {
  bool cut = true;
  double confidence = 1.0;
  double cost_ms = 0.0;  // model cost, recorded in metrics
};

// Decides whether a qualifying pause is a semantic boundary. Consulted once
// per pause, when the silence run first reaches the minimum.
class BoundaryScorer {
 public:
  virtual ~BoundaryScorer() = default;
  virtual BoundaryDecision score(const BoundaryContext& ctx) = 0;
};

enum class SegmenterMode {
  // Cut at every qualifying pause. No length bounds, no scorer.
  Baseline,
  // Respect minimum segment length, consult the scorer, force a split when
  // a segment reaches the maximum length.
  Semantic,
};

struct SegmenterConfig {
  SegmenterMode mode = SegmenterMode::Semantic;
  VadConfig vad;
  DurationMs min_silence_ms = 500;
  DurationMs min_segment_ms = 1500;
  DurationMs max_segment_ms = 10000;
  int sample_rate = 16000;
};

struct SegmenterMetrics {
  std::int64_t frames = 0;
  std::int64_t speech_frames = 0;
  std::int64_t cuts_pause = 0;
  std::int64_t cuts_forced = 0;
  std::int64_t cuts_eos = 0;
  std::int64_t scorer_calls = 0;
  double scorer_cost_ms = 0.0;
};

// Streaming pause segmenter. Audio arrives in arbitrary chunks; segments
// cover the stream without gaps or overlap, cut at the midpoint of the
// pause that closed them (decided when speech resumes) or at the length
// cap. A segment must contain speech: leading silence attaches to the
// first segment and a silence-only stream yields nothing, including at end
// of stream.
class Segmenter {
 public:
  explicit Segmenter(SegmenterConfig cfg, BoundaryScorer* scorer = nullptr);

  // Chunks must be contiguous 16-bit mono at the configured rate.
  std::vector<RawSegment> push(const AudioBuffer& chunk);
  // Flushes the open segment if it saw speech. Further pushes throw.
  std::vector<RawSegment> finish();

  const SegmenterMetrics& metrics() const { return metrics_; }

 private:
  void process_frame(const std::int16_t* samples, std::size_t count,
                     std::vector<RawSegment>& out);
  void emit_cut(Timestamp cut_ms, double confidence, CutCause cause,
                std::vector<RawSegment>& out);

  SegmenterConfig cfg_;
  BoundaryScorer* scorer_;
  VadTracker vad_;
  SegmenterMetrics metrics_;
  std::size_t frame_samples_;

  std::vector<std::int16_t> stage_;    // partial frame across chunks
  std::vector<std::int16_t> pending_;  // open segment, from seg_start_
  Timestamp base_ = 0;
  Timestamp seg_start_ = 0;
  std::int64_t consumed_frames_ = 0;  // full frames taken from the stream
  bool speech_seen_ = false;
  DurationMs silence_run_ = 0;
  bool candidate_open_ = false;  // scorer consulted for the running pause
  bool candidate_cut_ = false;
  double candidate_confidence_ = 1.0;
  Timestamp pause_start_ = 0;
  bool finished_ = false;
};

}  // namespace lipstream

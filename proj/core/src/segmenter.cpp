#include "lipstream/segmenter.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace lipstream {

Segmenter::Segmenter(SegmenterConfig cfg, BoundaryScorer* scorer)
    : cfg_(cfg), scorer_(scorer), vad_(cfg.vad) {
  if (cfg_.sample_rate <= 0 || cfg_.sample_rate % 1000 != 0)
    throw std::invalid_argument("segmenter: rate must be a multiple of 1 kHz");
  if (cfg_.min_silence_ms <= 0)
    throw std::invalid_argument("segmenter: non-positive min silence");
  if (cfg_.mode == SegmenterMode::Semantic) {
    if (cfg_.min_segment_ms < 0 || cfg_.max_segment_ms <= 0)
      throw std::invalid_argument("segmenter: bad segment bounds");
    if (cfg_.max_segment_ms <= cfg_.min_segment_ms)
      throw std::invalid_argument("segmenter: max segment under min");
  }
  frame_samples_ = static_cast<std::size_t>(
      std::int64_t(cfg_.sample_rate) * cfg_.vad.frame_ms / 1000);
}

std::vector<RawSegment> Segmenter::push(const AudioBuffer& chunk) {
  if (finished_) throw std::logic_error("segmenter: push after finish");
  if (chunk.sample_rate != cfg_.sample_rate)
    throw std::invalid_argument("segmenter: sample rate mismatch");
  std::vector<RawSegment> out;
  if (chunk.empty()) return out;
  std::int64_t staged_ms =
      consumed_frames_ * cfg_.vad.frame_ms +
      std::int64_t(stage_.size()) * 1000 / cfg_.sample_rate;
  if (consumed_frames_ == 0 && stage_.empty() && pending_.empty()) {
    seg_start_ = chunk.start;
    base_ = chunk.start;
  } else if (std::llabs(chunk.start - (base_ + staged_ms)) > 1) {
    throw std::invalid_argument("segmenter: non-contiguous chunk");
  }
  stage_.insert(stage_.end(), chunk.samples.begin(), chunk.samples.end());
  std::size_t off = 0;
  while (stage_.size() - off >= frame_samples_) {
    process_frame(stage_.data() + off, frame_samples_, out);
    off += frame_samples_;
    ++consumed_frames_;
  }
  stage_.erase(stage_.begin(), stage_.begin() + std::ptrdiff_t(off));
  return out;
}

void Segmenter::process_frame(const std::int16_t* samples, std::size_t count,
                              std::vector<RawSegment>& out) {
  Timestamp f0 = base_ + consumed_frames_ * cfg_.vad.frame_ms;
  Timestamp f1 = f0 + cfg_.vad.frame_ms;
  auto r = vad_.update(samples, count);
  metrics_.frames += 1;
  if (r.speech) {
    metrics_.speech_frames += 1;
    // Resuming after a qualifying pause closes the segment at its midpoint.
    if (speech_seen_ && silence_run_ >= cfg_.min_silence_ms &&
        candidate_open_ && candidate_cut_) {
      emit_cut(pause_start_ + silence_run_ / 2, candidate_confidence_,
               CutCause::Pause, out);
      metrics_.cuts_pause += 1;
    }
    silence_run_ = 0;
    candidate_open_ = false;
    candidate_cut_ = false;
    pending_.insert(pending_.end(), samples, samples + count);
    speech_seen_ = true;
  } else {
    if (silence_run_ == 0) pause_start_ = f0;
    silence_run_ += cfg_.vad.frame_ms;
    pending_.insert(pending_.end(), samples, samples + count);
    if (!candidate_open_ && silence_run_ >= cfg_.min_silence_ms &&
        speech_seen_) {
      candidate_open_ = true;
      candidate_cut_ = true;
      candidate_confidence_ = 1.0;
      if (cfg_.mode == SegmenterMode::Semantic) {
        if (pause_start_ - seg_start_ < cfg_.min_segment_ms) {
          candidate_cut_ = false;
        } else if (scorer_) {
          BoundaryDecision d = scorer_->score(
              {pause_start_, silence_run_, pause_start_ - seg_start_});
          metrics_.scorer_calls += 1;
          metrics_.scorer_cost_ms += d.cost_ms;
          candidate_cut_ = d.cut;
          candidate_confidence_ = d.confidence;
        }
      }
    }
  }
  if (cfg_.mode == SegmenterMode::Semantic && speech_seen_ &&
      f1 - seg_start_ >= cfg_.max_segment_ms) {
    emit_cut(f1, 1.0, CutCause::Forced, out);
    metrics_.cuts_forced += 1;
  }
}

void Segmenter::emit_cut(Timestamp cut_ms, double confidence, CutCause cause,
                         std::vector<RawSegment>& out) {
  auto split = static_cast<std::size_t>((cut_ms - seg_start_) *
                                        cfg_.sample_rate / 1000);
  RawSegment seg;
  seg.begin = seg_start_;
  seg.end = cut_ms;
  seg.confidence = confidence;
  seg.cause = cause;
  seg.audio.sample_rate = cfg_.sample_rate;
  seg.audio.start = seg_start_;
  seg.audio.samples.assign(pending_.begin(),
                           pending_.begin() + std::ptrdiff_t(split));
  pending_.erase(pending_.begin(), pending_.begin() + std::ptrdiff_t(split));
  out.push_back(std::move(seg));
  seg_start_ = cut_ms;
  speech_seen_ = false;
}

std::vector<RawSegment> Segmenter::finish() {
  if (finished_) throw std::logic_error("segmenter: finish twice");
  finished_ = true;
  std::vector<RawSegment> out;
  // The sub-frame tail never went through the VAD; it flushes with the
  // remainder when the open segment already contains speech.
  DurationMs tail_ms =
      std::int64_t(stage_.size()) * 1000 / cfg_.sample_rate;
  pending_.insert(pending_.end(), stage_.begin(), stage_.end());
  stage_.clear();
  if (!speech_seen_ || pending_.empty()) return out;
  Timestamp end = base_ + consumed_frames_ * cfg_.vad.frame_ms + tail_ms;
  RawSegment seg;
  seg.begin = seg_start_;
  seg.end = end;
  seg.confidence = 1.0;
  seg.cause = CutCause::Eos;
  seg.audio.sample_rate = cfg_.sample_rate;
  seg.audio.start = seg_start_;
  seg.audio.samples = std::move(pending_);
  pending_.clear();
  out.push_back(std::move(seg));
  metrics_.cuts_eos += 1;
  return out;
}

}  // namespace lipstream

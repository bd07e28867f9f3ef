#include "lipstream/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lipstream {

std::vector<PatternPiece> pattern_pieces(const SpeechPattern& pattern,
                                         DurationMs total_ms) {
  if (total_ms <= 0)
    throw std::invalid_argument("pattern: non-positive clip length");
  if (pattern.bursts.empty())
    throw std::invalid_argument("pattern: burst list is empty");
  std::vector<PatternPiece> out;
  Timestamp t = 0;
  auto push = [&](bool speech, DurationMs len) {
    if (len < 0) throw std::invalid_argument("pattern: negative span");
    if (t >= total_ms || len == 0) return;
    Timestamp end = std::min<Timestamp>(total_ms, t + len);
    if (!out.empty() && out.back().speech == speech)
      out.back().end = end;
    else
      out.push_back({speech, t, end});
    t = end;
  };
  push(false, pattern.lead_silence_ms);
  std::size_t i = 0;
  while (t < total_ms) {
    const BurstSpec& b = pattern.bursts[i % pattern.bursts.size()];
    if (b.speech_ms <= 0)
      throw std::invalid_argument("pattern: burst without speech");
    push(true, b.speech_ms);
    push(false, b.pause_ms);
    ++i;
  }
  return out;
}

bool pattern_ends_in_speech(const SpeechPattern& pattern,
                            DurationMs total_ms) {
  auto pieces = pattern_pieces(pattern, total_ms);
  return !pieces.empty() && pieces.back().speech;
}

AudioBuffer render_pattern(const SpeechPattern& pattern, DurationMs total_ms,
                           int sample_rate) {
  AudioBuffer buf = make_silence(total_ms, sample_rate, 0);
  const double two_pi = 8.0 * std::atan(1.0);
  const double peak = pattern.amplitude * 32767.0;
  for (const auto& piece : pattern_pieces(pattern, total_ms)) {
    if (!piece.speech) continue;
    auto s0 = static_cast<std::size_t>(piece.begin * sample_rate / 1000);
    auto s1 = static_cast<std::size_t>(piece.end * sample_rate / 1000);
    s1 = std::min(s1, buf.samples.size());
    // Phase restarts per burst; continuity across pauses is irrelevant.
    for (std::size_t s = s0; s < s1; ++s) {
      double ph = two_pi * pattern.tone_hz *
                  static_cast<double>(s - s0) / sample_rate;
      buf.samples[s] = static_cast<std::int16_t>(
          std::lround(peak * std::sin(ph)));
    }
  }
  return buf;
}

std::vector<FrameRecord> render_pattern_frames(const SpeechPattern& pattern,
                                               DurationMs total_ms,
                                               double fps, int pix_w,
                                               int pix_h) {
  if (fps <= 0) throw std::invalid_argument("pattern: non-positive fps");
  auto pieces = pattern_pieces(pattern, total_ms);
  auto speech_at = [&](Timestamp ts) {
    for (const auto& p : pieces)
      if (ts >= p.begin && ts < p.end) return p.speech;
    return false;
  };
  std::vector<FrameRecord> out;
  Timestamp prev = -1;
  for (std::int64_t i = 0;; ++i) {
    auto ts = static_cast<Timestamp>(std::llround(i * 1000.0 / fps));
    if (ts >= total_ms) break;
    if (ts <= prev) continue;  // guards absurd fps, keeps ts strict
    prev = ts;
    FrameRecord rec;
    rec.ts = ts;
    rec.frame_index = i;
    rec.mouth_motion = speech_at(ts) ? 1.0 : 0.0;
    rec.pix_w = pix_w;
    rec.pix_h = pix_h;
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<Timestamp> expected_cut_points(const SpeechPattern& pattern,
                                           DurationMs total_ms,
                                           DurationMs min_silence_ms,
                                           DurationMs min_segment_ms,
                                           DurationMs max_segment_ms) {
  if (max_segment_ms <= 0)
    throw std::invalid_argument("pattern: non-positive max segment");
  auto pieces = pattern_pieces(pattern, total_ms);
  std::vector<Timestamp> cuts;
  Timestamp seg_start = 0;
  auto force_until = [&](Timestamp limit) {
    while (limit - seg_start > max_segment_ms) {
      seg_start += max_segment_ms;
      cuts.push_back(seg_start);
    }
  };
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    // Cuts need speech before the pause and a resume after it. Pieces
    // alternate, so any silence at i > 0 follows speech.
    if (p.speech || i == 0 || i + 1 >= pieces.size()) continue;
    force_until(p.begin);
    bool eligible = (p.end - p.begin) >= min_silence_ms &&
                    (p.begin - seg_start) >= min_segment_ms;
    if (!eligible) continue;
    if (seg_start + max_segment_ms <= p.end)
      throw std::logic_error("pattern: forced split inside qualifying pause");
    seg_start = (p.begin + p.end) / 2;
    cuts.push_back(seg_start);
  }
  force_until(total_ms);
  return cuts;
}

std::vector<DurationMs> expected_segment_durations(
    const SpeechPattern& pattern, DurationMs total_ms,
    DurationMs min_silence_ms, DurationMs min_segment_ms,
    DurationMs max_segment_ms) {
  auto cuts = expected_cut_points(pattern, total_ms, min_silence_ms,
                                  min_segment_ms, max_segment_ms);
  std::vector<DurationMs> out;
  Timestamp prev = 0;
  for (Timestamp c : cuts) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(total_ms - prev);
  return out;
}

}  // namespace lipstream

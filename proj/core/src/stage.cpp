#include "lipstream/stage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "lipstream/rng.hpp"

namespace lipstream {

DurationMs service_ms(const StageProfile& p, DurationMs media_ms) {
  if (media_ms < 0) throw std::invalid_argument("stage: negative media span");
  if (p.fixed_ms < 0 || p.per_sec_ms < 0)
    throw std::invalid_argument("stage: negative cost on " + p.name);
  return p.fixed_ms + std::llround(p.per_sec_ms * double(media_ms) / 1000.0);
}

DurationMs service_ms(const StageProfile& p, DurationMs media_ms,
                      const Uuid& segment) {
  DurationMs base = service_ms(p, media_ms);
  if (p.jitter == 0.0) return base;
  if (p.jitter < 0.0 || p.jitter >= 1.0)
    throw std::invalid_argument("stage: jitter outside [0, 1) on " + p.name);
  std::uint64_t h = mix_str(p.seed, p.name);
  h = mix_uuid(h, segment);
  double u = u64_to_unit(h);
  double noise = 1.0 + p.jitter * (2.0 * u - 1.0);
  return std::llround(double(base) * noise);
}

namespace {

class WireWriter {
 public:
  explicit WireWriter(std::uint32_t tag) { u32(tag); }

  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back((v >> (8 * i)) & 0xff);
  }
  void i64(std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) buf_.push_back((u >> (8 * i)) & 0xff);
  }
  void f64(double v) { i64(std::bit_cast<std::int64_t>(v)); }
  void uuid(const Uuid& u) {
    buf_.insert(buf_.end(), u.bytes.begin(), u.bytes.end());
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void samples(const std::vector<std::int16_t>& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    for (std::int16_t v : s) {
      auto u = static_cast<std::uint16_t>(v);
      buf_.push_back(u & 0xff);
      buf_.push_back((u >> 8) & 0xff);
    }
  }

  WireBytes take() {
    return std::make_shared<const std::vector<std::uint8_t>>(std::move(buf_));
  }

 private:
  std::vector<std::uint8_t> buf_;
};

class WireReader {
 public:
  WireReader(const std::vector<std::uint8_t>& b, std::uint32_t want_tag)
      : b_(b) {
    std::uint32_t tag = u32();
    if (tag != want_tag)
      throw std::runtime_error("wire: expected tag " +
                               std::to_string(want_tag) + ", got " +
                               std::to_string(tag));
  }

  std::uint8_t u8() {
    need(1);
    return b_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int64_t i64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return static_cast<std::int64_t>(v);
  }
  double f64() { return std::bit_cast<double>(i64()); }
  Uuid uuid() {
    need(16);
    Uuid u;
    std::copy(b_.begin() + std::ptrdiff_t(pos_),
              b_.begin() + std::ptrdiff_t(pos_ + 16), u.bytes.begin());
    pos_ += 16;
    return u;
  }
  std::string str() {
    std::uint32_t n = u32();
    need(n);
    std::string s(b_.begin() + std::ptrdiff_t(pos_),
                  b_.begin() + std::ptrdiff_t(pos_ + n));
    pos_ += n;
    return s;
  }
  std::vector<std::int16_t> samples() {
    std::uint32_t n = u32();
    need(std::size_t(n) * 2);
    std::vector<std::int16_t> s(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      auto v = std::uint16_t(b_[pos_] | (std::uint16_t(b_[pos_ + 1]) << 8));
      s[i] = static_cast<std::int16_t>(v);
      pos_ += 2;
    }
    return s;
  }
  void done() const {
    if (pos_ != b_.size()) throw std::runtime_error("wire: trailing bytes");
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw std::runtime_error("wire: truncated");
  }
  const std::vector<std::uint8_t>& b_;
  std::size_t pos_ = 0;
};

WireBytes encode_text(std::uint32_t tag, const TextMsg& m) {
  WireWriter w(tag);
  w.uuid(m.uuid);
  w.i64(m.birth);
  w.i64(m.begin);
  w.i64(m.end);
  w.i64(m.source_duration_ms);
  w.u32(static_cast<std::uint32_t>(m.tokens.size()));
  for (const auto& t : m.tokens) w.str(t);
  return w.take();
}

TextMsg decode_text(std::uint32_t tag, const std::vector<std::uint8_t>& b) {
  WireReader r(b, tag);
  TextMsg m;
  m.uuid = r.uuid();
  m.birth = r.i64();
  m.begin = r.i64();
  m.end = r.i64();
  m.source_duration_ms = r.i64();
  std::uint32_t n = r.u32();
  m.tokens.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) m.tokens.push_back(r.str());
  r.done();
  return m;
}

}  // namespace

std::uint32_t wire_tag(const std::vector<std::uint8_t>& payload) {
  if (payload.size() < 4) throw std::runtime_error("wire: truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(payload[i]) << (8 * i);
  return v;
}

WireBytes encode_segment(const SegmentMsg& m) {
  WireWriter w(kTagSegment);
  w.uuid(m.uuid);
  w.i64(m.birth);
  w.i64(m.begin);
  w.i64(m.end);
  w.f64(m.confidence);
  w.u32(static_cast<std::uint32_t>(m.audio.sample_rate));
  w.samples(m.audio.samples);
  return w.take();
}

SegmentMsg decode_segment(const std::vector<std::uint8_t>& b) {
  WireReader r(b, kTagSegment);
  SegmentMsg m;
  m.uuid = r.uuid();
  m.birth = r.i64();
  m.begin = r.i64();
  m.end = r.i64();
  m.confidence = r.f64();
  m.audio.sample_rate = static_cast<int>(r.u32());
  m.audio.samples = r.samples();
  m.audio.start = m.begin;
  r.done();
  return m;
}

WireBytes encode_transcript(const TextMsg& m) {
  return encode_text(kTagTranscript, m);
}
TextMsg decode_transcript(const std::vector<std::uint8_t>& b) {
  return decode_text(kTagTranscript, b);
}
WireBytes encode_translation(const TextMsg& m) {
  return encode_text(kTagTranslation, m);
}
TextMsg decode_translation(const std::vector<std::uint8_t>& b) {
  return decode_text(kTagTranslation, b);
}

WireBytes encode_synth_audio(const SynthAudioMsg& m) {
  WireWriter w(kTagSynthAudio);
  w.uuid(m.uuid);
  w.i64(m.birth);
  w.i64(m.begin);
  w.i64(m.end);
  w.i64(m.source_duration_ms);
  w.u32(static_cast<std::uint32_t>(m.audio.sample_rate));
  w.samples(m.audio.samples);
  return w.take();
}

SynthAudioMsg decode_synth_audio(const std::vector<std::uint8_t>& b) {
  WireReader r(b, kTagSynthAudio);
  SynthAudioMsg m;
  m.uuid = r.uuid();
  m.birth = r.i64();
  m.begin = r.i64();
  m.end = r.i64();
  m.source_duration_ms = r.i64();
  m.audio.sample_rate = static_cast<int>(r.u32());
  m.audio.samples = r.samples();
  m.audio.start = m.begin;
  r.done();
  return m;
}

WireBytes encode_aligned_pair(const AlignedPairMsg& m) {
  WireWriter w(kTagAlignedPair);
  w.uuid(m.uuid);
  w.i64(m.birth);
  w.i64(m.begin);
  w.i64(m.end);
  w.i64(m.source_duration_ms);
  w.i64(m.offset_ms);
  w.u8(m.low_confidence ? 1 : 0);
  w.i64(m.n_frames);
  w.i64(m.first_frame_ts);
  w.i64(m.last_frame_ts);
  w.i64(m.mel_frames);
  return w.take();
}

AlignedPairMsg decode_aligned_pair(const std::vector<std::uint8_t>& b) {
  WireReader r(b, kTagAlignedPair);
  AlignedPairMsg m;
  m.uuid = r.uuid();
  m.birth = r.i64();
  m.begin = r.i64();
  m.end = r.i64();
  m.source_duration_ms = r.i64();
  m.offset_ms = r.i64();
  m.low_confidence = r.u8() != 0;
  m.n_frames = r.i64();
  m.first_frame_ts = r.i64();
  m.last_frame_ts = r.i64();
  m.mel_frames = r.i64();
  r.done();
  return m;
}

WireBytes encode_final(const FinalMsg& m) {
  WireWriter w(kTagFinal);
  w.uuid(m.uuid);
  w.i64(m.birth);
  w.i64(m.begin);
  w.i64(m.end);
  w.i64(m.source_duration_ms);
  w.i64(m.frames_rendered);
  w.i64(m.offset_ms);
  return w.take();
}

FinalMsg decode_final(const std::vector<std::uint8_t>& b) {
  WireReader r(b, kTagFinal);
  FinalMsg m;
  m.uuid = r.uuid();
  m.birth = r.i64();
  m.begin = r.i64();
  m.end = r.i64();
  m.source_duration_ms = r.i64();
  m.frames_rendered = r.i64();
  m.offset_ms = r.i64();
  r.done();
  return m;
}

TextMsg mock_stt(const SegmentMsg& seg) {
  TextMsg t;
  t.uuid = seg.uuid;
  t.birth = seg.birth;
  t.begin = seg.begin;
  t.end = seg.end;
  t.source_duration_ms = seg.duration_ms();
  std::string stem = seg.uuid.to_string().substr(0, 8);
  auto count = seg.duration_ms() / 300;
  for (std::int64_t i = 0; i < count; ++i)
    t.tokens.push_back("tok_" + stem + "_" + std::to_string(i));
  return t;
}

TextMsg mock_mt(const TextMsg& transcript) {
  TextMsg t = transcript;
  std::reverse(t.tokens.begin(), t.tokens.end());
  return t;
}

SynthAudioMsg mock_tts(const TextMsg& translation, double duration_ratio,
                       std::uint64_t seed) {
  if (duration_ratio <= 0)
    throw std::invalid_argument("tts: non-positive duration ratio");
  SynthAudioMsg s;
  s.uuid = translation.uuid;
  s.birth = translation.birth;
  s.begin = translation.begin;
  s.end = translation.end;
  s.source_duration_ms = translation.source_duration_ms;
  auto out_ms = static_cast<DurationMs>(
      std::llround(double(translation.source_duration_ms) * duration_ratio));
  std::uint64_t h = mix_str(seed, "tts");
  h = mix_uuid(h, translation.uuid);
  double freq = 180.0 + double(h % 120);  // a voice-ish fundamental
  s.audio = make_tone(freq, out_ms, 0.3, 16000, translation.begin);
  return s;
}

}  // namespace lipstream

#include "lipstream/orchestrator.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "lipstream/kalman.hpp"
#include "lipstream/log.hpp"
#include "lipstream/mel.hpp"
#include "lipstream/visual_mocks.hpp"

namespace lipstream {

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Aligned:
      return "aligned";
    case EventKind::Resync:
      return "resync";
    case EventKind::SyncFailure:
      return "sync_failure";
    case EventKind::DeadLetter:
      return "dead_letter";
  }
  return "unknown";
}

std::string event_to_ndjson(const Event& e) {
  std::string s = "{\"ts_ms\":" + std::to_string(e.ts_ms);
  s += ",\"kind\":\"";
  s += event_kind_name(e.kind);
  s += "\",\"segment\":\"" + e.segment.to_string();
  s += "\",\"offset_ms\":" + std::to_string(e.offset_ms);
  s += ",\"latency_ms\":" + std::to_string(e.latency_ms);
  s += "}";
  return s;
}

void write_events_ndjson(const std::string& path,
                         const std::vector<Event>& events) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("events: cannot create " + path);
  for (const auto& e : events) out << event_to_ndjson(e) << '\n';
}

Orchestrator::Orchestrator(MediaClock& clock, Broker& broker, FrameRing& ring,
                           OrchestratorConfig cfg)
    : clock_(clock),
      broker_(broker),
      ring_(ring),
      cfg_(std::move(cfg)),
      drift_(cfg_.drift) {
  if (cfg_.gather_margin_ms < 0 || cfg_.align_charge_ms < 0 ||
      cfg_.gather_retries < 0)
    throw std::invalid_argument("orchestrator: bad config");
  // Gathering must not throttle on prefetch: every in-flight synth segment
  // owns a slot, and the caps bound slot memory.
  broker_.subscribe(kAudioOutputQueue, 1 << 20,
                    [this](const Envelope& env) { on_synth(env); });
  broker_.subscribe(kFinalQueue, 64,
                    [this](const Envelope& env) { on_final(env); });
}

void Orchestrator::emit(EventKind kind, const Uuid& segment,
                        DurationMs offset, DurationMs latency) {
  events_.push_back({clock_.now(), kind, segment, offset, latency});
}

void Orchestrator::on_synth(const Envelope& env) {
  Slot slot;
  slot.msg = decode_synth_audio(*env.msg.payload);
  slot.token = env.token;
  slot.arrival = clock_.now();
  slot.audio_bytes = slot.msg.audio.samples.size() * 2;
  std::uint64_t seq = next_seq_++;
  audio_pending_ += slot.audio_bytes;
  stats_.audio_hwm_bytes = std::max(stats_.audio_hwm_bytes, audio_pending_);
  stats_.gathers += 1;
  slots_.emplace(seq, std::move(slot));
  try_gather(seq);
  enforce_caps();
}

void Orchestrator::try_gather(std::uint64_t seq) {
  auto it = slots_.find(seq);
  if (it == slots_.end()) return;  // dropped by a cap while waiting
  Slot& slot = it->second;
  slot.timer_armed = false;
  const SynthAudioMsg& m = slot.msg;
  auto frames = ring_.window(m.begin - cfg_.gather_margin_ms,
                             m.end + cfg_.gather_margin_ms);
  if (frames.size() < 2) {
    if (slot.retries < cfg_.gather_retries) {
      DurationMs delay = cfg_.gather_retry_base_ms;
      for (int i = 0; i < slot.retries; ++i)
        delay *= cfg_.gather_retry_factor;
      slot.retries += 1;
      stats_.gather_retries += 1;
      slot.timer = clock_.call_after(delay, [this, seq] { try_gather(seq); });
      slot.timer_armed = true;
      return;
    }
    stats_.sync_failures += 1;
    emit(EventKind::SyncFailure, m.uuid, 0, 0);
    log_warn("orchestrator: no frames for segment ", m.uuid.to_string());
    broker_.dead_letter_inflight(slot.token);
    slot.state = SlotState::Failed;
    release_slot(slot);
    publish_ready();
    return;
  }

  // Detection and smoothing are content work; the service charge for the
  // whole gathered span lands on the timer below.
  KalmanBoxFilter smoother;
  Timestamp prev_ts = 0;
  for (auto& f : frames) {
    FaceBox box;
    if (f.face) {
      box = *f.face;
    } else {
      box = mock_face_detect(f.frame_index, cfg_.seed);
      stats_.detector_calls += 1;
    }
    double dt_s =
        smoother.initialized() ? double(f.ts - prev_ts) / 1000.0 : 0.0;
    auto est = smoother.update(box, dt_s);
    f.face = est.box;
    prev_ts = f.ts;
  }
  for (const auto& f : frames)
    slot.frame_bytes += std::size_t(f.pix_w) * std::size_t(f.pix_h) * 3;
  frame_pending_ += slot.frame_bytes;
  stats_.frame_hwm_bytes = std::max(stats_.frame_hwm_bytes, frame_pending_);
  slot.frames = std::move(frames);
  slot.state = SlotState::Detecting;
  DurationMs span = (m.end + cfg_.gather_margin_ms) -
                    (m.begin - cfg_.gather_margin_ms);
  slot.fd_charge_ms = service_ms(cfg_.facedetect, span, m.uuid);
  DurationMs charge = slot.fd_charge_ms + cfg_.align_charge_ms;
  slot.timer = clock_.call_after(charge, [this, seq] { finish_pair(seq); });
  slot.timer_armed = true;
}

void Orchestrator::finish_pair(std::uint64_t seq) {
  auto it = slots_.find(seq);
  if (it == slots_.end()) return;
  Slot& slot = it->second;
  slot.timer_armed = false;
  const SynthAudioMsg& m = slot.msg;

  MelSpectrogram mel = compute_mel(m.audio);
  auto energy = energy_envelope_ms(m.audio);
  auto motion = motion_envelope_ms(slot.frames, m.begin, m.end - m.begin);
  AlignResult align = align_envelopes(energy, motion);

  AlignedPairMsg pair;
  pair.uuid = m.uuid;
  pair.birth = m.birth;
  pair.begin = m.begin;
  pair.end = m.end;
  pair.source_duration_ms = m.source_duration_ms;
  pair.offset_ms = align.offset_ms;
  pair.low_confidence = align.low_confidence;
  pair.n_frames = std::int64_t(slot.frames.size());
  pair.first_frame_ts = slot.frames.front().ts;
  pair.last_frame_ts = slot.frames.back().ts;
  pair.mel_frames = mel.n_frames;
  // The measured offset is corrected at the pair level: frames shift so
  // motion lines up with the synthesized audio.
  for (auto& f : slot.frames) f.ts -= align.offset_ms;
  slot.pair = encode_aligned_pair(pair);
  slot.state = SlotState::Ready;
  publish_ready();
}

void Orchestrator::publish_ready() {
  while (!slots_.empty()) {
    auto it = slots_.begin();
    Slot& slot = it->second;
    if (slot.state == SlotState::Failed) {
      slots_.erase(it);
      continue;
    }
    if (slot.state != SlotState::Ready || slot.publishing) return;
    slot.publishing = true;
    // Everything between arrival and render handoff that is not detector
    // service is orchestration overhead (alignment tick, waits, holdback).
    stats_.max_sync_overhead_ms =
        std::max(stats_.max_sync_overhead_ms,
                 clock_.now() - slot.arrival - slot.fd_charge_ms);
    Message msg;
    msg.uuid = slot.msg.uuid;
    msg.payload = slot.pair;
    std::uint64_t seq = it->first;
    broker_.publish(kLipsyncQueue, std::move(msg), [this, seq] {
      auto sit = slots_.find(seq);
      if (sit == slots_.end()) return;
      broker_.ack(sit->second.token);
      release_slot(sit->second);
      slots_.erase(sit);
      publish_ready();
    });
    return;  // next slot goes out once this one is admitted
  }
}

void Orchestrator::release_slot(Slot& slot) {
  audio_pending_ -= slot.audio_bytes;
  frame_pending_ -= slot.frame_bytes;
  slot.audio_bytes = 0;
  slot.frame_bytes = 0;
}

void Orchestrator::enforce_caps() {
  while (audio_pending_ > cfg_.audio_cap_bytes ||
         frame_pending_ > cfg_.frame_cap_bytes) {
    auto victim = slots_.end();
    for (auto it = slots_.begin(); it != slots_.end(); ++it) {
      if (it->second.state != SlotState::Failed && !it->second.publishing) {
        victim = it;
        break;
      }
    }
    if (victim == slots_.end()) return;
    Slot& slot = victim->second;
    if (slot.timer_armed) clock_.cancel(slot.timer);
    stats_.cap_drops += 1;
    emit(EventKind::DeadLetter, slot.msg.uuid, 0, 0);
    log_warn("orchestrator: memory cap drops segment ",
             slot.msg.uuid.to_string());
    broker_.dead_letter_inflight(slot.token);
    release_slot(slot);
    slots_.erase(victim);
  }
  publish_ready();
}

void Orchestrator::on_final(const Envelope& env) {
  FinalMsg f = decode_final(*env.msg.payload);
  Timestamp now = clock_.now();
  DurationMs latency = now - f.birth;
  stats_.completions += 1;
  stats_.sum_latency_ms += latency;
  stats_.last_completion_ts = now;
  stats_.max_abs_offset_ms =
      std::max<DurationMs>(stats_.max_abs_offset_ms,
                           f.offset_ms < 0 ? -f.offset_ms : f.offset_ms);
  emit(EventKind::Aligned, f.uuid, f.offset_ms, latency);
  if (drift_.feed(double(f.offset_ms))) {
    stats_.resyncs += 1;
    emit(EventKind::Resync, f.uuid, f.offset_ms, 0);
  }
  broker_.ack(env.token);
}

}  // namespace lipstream

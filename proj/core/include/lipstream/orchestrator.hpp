#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lipstream/align.hpp"
#include "lipstream/broker.hpp"
#include "lipstream/drift.hpp"
#include "lipstream/frame_ring.hpp"
#include "lipstream/stage.hpp"

namespace lipstream {

enum class EventKind { Aligned, Resync, SyncFailure, DeadLetter };

const char* event_kind_name(EventKind kind);

// One line of the run's event stream.
struct Event {
  Timestamp ts_ms = 0;
  EventKind kind = EventKind::Aligned;
  Uuid segment;
  DurationMs offset_ms = 0;   // 0 when not applicable
  DurationMs latency_ms = 0;  // 0 when not applicable
};

std::string event_to_ndjson(const Event& e);
void write_events_ndjson(const std::string& path,
                         const std::vector<Event>& events);

struct OrchestratorConfig {
  StageProfile facedetect;  // billed on the gathered span
  DurationMs align_charge_ms = 2;
  DurationMs gather_margin_ms = 50;
  int gather_retries = 3;
  DurationMs gather_retry_base_ms = 100;
  int gather_retry_factor = 2;
  std::size_t audio_cap_bytes = std::size_t(128) << 20;
  std::size_t frame_cap_bytes = std::size_t(512) << 20;
  DriftConfig drift;
  std::uint64_t seed = 0;  // detector stream
};

struct OrchestratorStats {
  std::int64_t gathers = 0;
  std::int64_t gather_retries = 0;
  std::int64_t sync_failures = 0;
  std::int64_t cap_drops = 0;
  std::int64_t detector_calls = 0;
  std::int64_t completions = 0;
  std::int64_t resyncs = 0;
  std::size_t audio_hwm_bytes = 0;
  std::size_t frame_hwm_bytes = 0;
  std::int64_t sum_latency_ms = 0;
  Timestamp last_completion_ts = 0;
  DurationMs max_abs_offset_ms = 0;
  // Worst per-segment orchestration overhead: time from synth arrival to
  // render publish minus the detector charge (alignment tick + waits).
  DurationMs max_sync_overhead_ms = 0;
};

// Joins synthesized speech with camera frames. For each synth segment it
// gathers the frame window (with retries while frames are missing), runs
// detection and smoothing, charges detection over the gathered span plus a
// fixed alignment tick, measures the audio/motion offset, and hands the
// aligned pair to the render queue strictly in the order segments entered
// the pipeline. It also consumes the render output, turning completions
// into aligned events, drift tracking, and latency accounting.
//
// Memory guards: pending synth audio and gathered frame bytes are capped;
// a breach drops the oldest unpublished segment to the dead-letter queue
// rather than stalling the pipeline.
class Orchestrator {
 public:
  Orchestrator(MediaClock& clock, Broker& broker, FrameRing& ring,
               OrchestratorConfig cfg);

  Orchestrator(const Orchestrator&) = delete;
  Orchestrator& operator=(const Orchestrator&) = delete;

  // Events and stats are safe to read once the clock is idle.
  const std::vector<Event>& events() const { return events_; }
  const OrchestratorStats& stats() const { return stats_; }
  std::int64_t emitted_count() const { return stats_.completions; }

 private:
  enum class SlotState { Gathering, Detecting, Ready, Failed };

  struct Slot {
    SynthAudioMsg msg;
    DeliveryToken token;
    SlotState state = SlotState::Gathering;
    bool publishing = false;
    int retries = 0;
    Timestamp arrival = 0;
    DurationMs fd_charge_ms = 0;
    MediaClock::TimerId timer = 0;
    bool timer_armed = false;
    std::vector<FrameRecord> frames;
    std::size_t audio_bytes = 0;
    std::size_t frame_bytes = 0;
    WireBytes pair;
  };

  void on_synth(const Envelope& env);
  void on_final(const Envelope& env);
  void try_gather(std::uint64_t seq);
  void finish_pair(std::uint64_t seq);
  void publish_ready();
  void enforce_caps();
  void release_slot(Slot& slot);
  void emit(EventKind kind, const Uuid& segment, DurationMs offset,
            DurationMs latency);

  MediaClock& clock_;
  Broker& broker_;
  FrameRing& ring_;
  OrchestratorConfig cfg_;
  DriftTracker drift_;
  std::map<std::uint64_t, Slot> slots_;  // arrival order == birth order
  std::uint64_t next_seq_ = 0;
  std::size_t audio_pending_ = 0;
  std::size_t frame_pending_ = 0;
  std::vector<Event> events_;
  OrchestratorStats stats_;
};

}  // namespace lipstream

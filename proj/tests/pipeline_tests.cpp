#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lipstream/broker.hpp"
#include "lipstream/orchestrator.hpp"
#include "lipstream/rng.hpp"
#include "lipstream/scenario.hpp"
#include "lipstream/stage.hpp"
#include "lipstream/synth.hpp"
#include "lipstream/visual_mocks.hpp"
#include "lipstream/worker.hpp"
#include "test_util.hpp"

using namespace lipstream;

namespace {

StageProfile make_profile(const char* name, DurationMs fixed, double per_sec,
                          double jitter = 0.0, std::uint64_t seed = 0) {
  StageProfile p;
  p.name = name;
  p.fixed_ms = fixed;
  p.per_sec_ms = per_sec;
  p.jitter = jitter;
  p.seed = seed;
  return p;
}

Message raw_msg(std::uint64_t salt, std::uint64_t i, std::size_t bytes) {
  Message m;
  m.uuid = derive_uuid(salt, 3, i);
  std::vector<std::uint8_t> payload(bytes);
  std::uint64_t state = mix_u64(salt, i);
  for (auto& b : payload) b = std::uint8_t(splitmix64(state) & 0xff);
  m.payload = std::make_shared<const std::vector<std::uint8_t>>(
      std::move(payload));
  return m;
}

// Orchestrator test bed: queues, a preloadable ring, and a scripted render
// consumer that turns every aligned pair straight into a final message.
struct OrchRig {
  MediaClock clock;
  Broker broker{clock};
  FrameRing ring;
  OrchestratorConfig cfg;
  std::unique_ptr<Orchestrator> orch;
  std::optional<DurationMs> forced_offset;  // reported instead of the measured
  std::vector<AlignedPairMsg> pairs;        // what reached the render stage

  explicit OrchRig(std::size_t ring_cap = 128) : ring(ring_cap) {
    for (const char* q : {kAudioOutputQueue, kLipsyncQueue, kFinalQueue})
      broker.declare_queue(q);
    cfg.facedetect = make_profile("facedetect", 0, 12);
  }

  void start() {
    orch = std::make_unique<Orchestrator>(clock, broker, ring, cfg);
    broker.subscribe(kLipsyncQueue, 64, [this](const Envelope& env) {
      AlignedPairMsg p = decode_aligned_pair(*env.msg.payload);
      pairs.push_back(p);
      FinalMsg f;
      f.uuid = p.uuid;
      f.birth = p.birth;
      f.begin = p.begin;
      f.end = p.end;
      f.source_duration_ms = p.source_duration_ms;
      f.frames_rendered = p.n_frames;
      f.offset_ms = forced_offset ? *forced_offset : p.offset_ms;
      broker.publish(kFinalQueue, {p.uuid, encode_final(f)});
      broker.ack(env.token);
    });
  }

  void load_frames(const SpeechPattern& pattern, DurationMs total_ms) {
    for (auto& f : render_pattern_frames(pattern, total_ms))
      ring.insert(std::move(f));
  }

  SynthAudioMsg synth_msg(const AudioBuffer& full, Timestamp begin,
                          Timestamp end, std::uint64_t idx, Timestamp birth) {
    SynthAudioMsg m;
    m.uuid = derive_uuid(900, 1, idx);
    m.birth = birth;
    m.begin = begin;
    m.end = end;
    m.source_duration_ms = end - begin;
    m.audio.sample_rate = full.sample_rate;
    m.audio.start = begin;
    m.audio.samples.assign(full.samples.begin() + begin * 16,
                           full.samples.begin() + end * 16);
    return m;
  }

  void publish_at(Timestamp when, SynthAudioMsg m) {
    clock.call_at(when, [this, m = std::move(m)] {
      broker.publish(kAudioOutputQueue, {m.uuid, encode_synth_audio(m)});
    });
  }
};

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("service charge is fixed plus rounded per-second cost") {
  CHECK(service_ms(make_profile("stt", 0, 520), 2300) == 1196);
  CHECK(service_ms(make_profile("stt", 0, 520), 700) == 364);
  CHECK(service_ms(make_profile("stt", 0, 520), 2000) == 1040);
  CHECK(service_ms(make_profile("mt", 5, 525), 700) == 373);  // 367.5 up
  CHECK(service_ms(make_profile("mt", 5, 525), 2000) == 1055);
  CHECK(service_ms(make_profile("tts", 0, 500), 2000) == 1000);
  CHECK(service_ms(make_profile("lipsync", 0, 530), 700) == 371);
  CHECK(service_ms(make_profile("lipsync", 0, 530), 2000) == 1060);
  CHECK(service_ms(make_profile("lipsync", 0, 530), 1700) == 901);
  CHECK(service_ms(make_profile("lipsync", 0, 530), 2300) == 1219);
  CHECK(service_ms(make_profile("facedetect", 0, 12), 2400) == 29);
  CHECK(service_ms(make_profile("facedetect", 0, 12), 2100) == 25);
  CHECK(service_ms(make_profile("facedetect", 0, 12), 800) == 10);
  CHECK(service_ms(make_profile("stt", 0, 780), 1000) == 780);
  CHECK(service_ms(make_profile("stt", 17, 0), 5000) == 17);
  CHECK(service_ms(make_profile("stt", 0, 0), 0) == 0);
  CHECK_THROWS(service_ms(make_profile("stt", 0, 500), -1));
  CHECK_THROWS(service_ms(make_profile("stt", -1, 500), 100));
}

TEST_CASE("jitter scales the whole charge inside its band, reproducibly") {
  StageProfile p = make_profile("tts", 0, 500, 0.03, 77);
  Uuid u = derive_uuid(4, 4, 4);
  DurationMs base = service_ms(p, 2000);
  REQUIRE(base == 1000);
  DurationMs j1 = service_ms(p, 2000, u);
  CHECK(j1 == service_ms(p, 2000, u));  // same draw every time
  CHECK(double(j1) >= 0.97 * double(base) - 0.5);
  CHECK(double(j1) <= 1.03 * double(base) + 0.5);

  StageProfile zero = p;
  zero.jitter = 0.0;
  CHECK(service_ms(zero, 2000, u) == base);

  // The draw keys on stage name, profile seed, and segment id.
  StageProfile other_name = p;
  other_name.name = "stt";
  StageProfile other_seed = p;
  other_seed.seed = 78;
  bool name_differs = false, seed_differs = false, uuid_differs = false;
  for (std::uint64_t i = 0; i < 16; ++i) {
    Uuid ui = derive_uuid(5, 5, i);
    name_differs |= service_ms(other_name, 2000, ui) != service_ms(p, 2000, ui);
    seed_differs |= service_ms(other_seed, 2000, ui) != service_ms(p, 2000, ui);
    uuid_differs |= service_ms(p, 2000, ui) != service_ms(p, 2000, u);
  }
  CHECK(name_differs);
  CHECK(seed_differs);
  CHECK(uuid_differs);

  StageProfile bad = p;
  bad.jitter = 1.0;
  CHECK_THROWS(service_ms(bad, 2000, u));
}

TEST_CASE("every payload kind roundtrips through its codec") {
  Uuid u = derive_uuid(21, 0, 1);

  SegmentMsg seg;
  seg.uuid = u;
  seg.birth = 42;
  seg.begin = 600;
  seg.end = 2900;
  seg.confidence = 0.7;
  seg.audio = render_pattern(SpeechPattern{}, 2300);
  seg.audio.start = 600;
  auto seg_bytes = encode_segment(seg);
  CHECK(wire_tag(*seg_bytes) == kTagSegment);
  SegmentMsg seg2 = decode_segment(*seg_bytes);
  CHECK(seg2.uuid == u);
  CHECK(seg2.birth == 42);
  CHECK(seg2.begin == 600);
  CHECK(seg2.end == 2900);
  CHECK(seg2.confidence == 0.7);
  CHECK(seg2.audio.sample_rate == 16000);
  CHECK(seg2.audio.start == 600);
  CHECK(seg2.audio.samples == seg.audio.samples);

  TextMsg text;
  text.uuid = u;
  text.birth = 43;
  text.begin = 0;
  text.end = 900;
  text.source_duration_ms = 900;
  text.tokens = {"alpha", "", "gamma"};
  auto tr_bytes = encode_transcript(text);
  CHECK(wire_tag(*tr_bytes) == kTagTranscript);
  TextMsg text2 = decode_transcript(*tr_bytes);
  CHECK(text2.tokens == text.tokens);
  CHECK(text2.source_duration_ms == 900);

  auto tl_bytes = encode_translation(text);
  CHECK(wire_tag(*tl_bytes) == kTagTranslation);
  CHECK(decode_translation(*tl_bytes).tokens == text.tokens);
  CHECK_THROWS(decode_transcript(*tl_bytes));  // tags do not interchange

  SynthAudioMsg synth;
  synth.uuid = u;
  synth.birth = 44;
  synth.begin = 100;
  synth.end = 500;
  synth.source_duration_ms = 400;
  synth.audio = render_pattern(SpeechPattern{}, 400);
  auto sy_bytes = encode_synth_audio(synth);
  CHECK(wire_tag(*sy_bytes) == kTagSynthAudio);
  SynthAudioMsg synth2 = decode_synth_audio(*sy_bytes);
  CHECK(synth2.audio.samples == synth.audio.samples);
  CHECK(synth2.source_duration_ms == 400);

  AlignedPairMsg pair;
  pair.uuid = u;
  pair.birth = 45;
  pair.begin = 0;
  pair.end = 700;
  pair.source_duration_ms = 700;
  pair.offset_ms = -35;
  pair.low_confidence = true;
  pair.n_frames = 22;
  pair.first_frame_ts = 33;
  pair.last_frame_ts = 733;
  pair.mel_frames = 40;
  auto pr_bytes = encode_aligned_pair(pair);
  CHECK(wire_tag(*pr_bytes) == kTagAlignedPair);
  AlignedPairMsg pair2 = decode_aligned_pair(*pr_bytes);
  CHECK(pair2.offset_ms == -35);
  CHECK(pair2.low_confidence);
  CHECK(pair2.n_frames == 22);
  CHECK(pair2.first_frame_ts == 33);
  CHECK(pair2.last_frame_ts == 733);
  CHECK(pair2.mel_frames == 40);

  FinalMsg fin;
  fin.uuid = u;
  fin.birth = 46;
  fin.begin = 0;
  fin.end = 700;
  fin.source_duration_ms = 700;
  fin.frames_rendered = 21;
  fin.offset_ms = 5;
  auto fi_bytes = encode_final(fin);
  CHECK(wire_tag(*fi_bytes) == kTagFinal);
  FinalMsg fin2 = decode_final(*fi_bytes);
  CHECK(fin2.frames_rendered == 21);
  CHECK(fin2.offset_ms == 5);

  // Truncation anywhere in the payload is an error, never garbage.
  std::vector<std::uint8_t> cut(seg_bytes->begin(),
                                seg_bytes->begin() + seg_bytes->size() / 2);
  CHECK_THROWS(decode_segment(cut));
  std::vector<std::uint8_t> tiny{1, 2};
  CHECK_THROWS(wire_tag(tiny));
}

TEST_CASE("model stand-ins preserve spans and transform deterministically") {
  SegmentMsg seg;
  seg.uuid = derive_uuid(8, 0, 0);
  seg.birth = 10;
  seg.begin = 600;
  seg.end = 2600;
  seg.audio = render_pattern(SpeechPattern{}, 2000);

  TextMsg t = mock_stt(seg);
  CHECK(t.tokens.size() == 6);  // one per full 300 ms
  CHECK(t.source_duration_ms == 2000);
  CHECK(t.begin == 600);
  CHECK(t.end == 2600);

  seg.end = 1499;  // 899 ms -> 2 tokens
  seg.begin = 600;
  CHECK(mock_stt(seg).tokens.size() == 2);

  TextMsg r = mock_mt(t);
  REQUIRE(r.tokens.size() == t.tokens.size());
  for (std::size_t i = 0; i < t.tokens.size(); ++i)
    CHECK(r.tokens[i] == t.tokens[t.tokens.size() - 1 - i]);

  SynthAudioMsg s = mock_tts(t, 1.0, 99);
  CHECK(s.audio.duration_ms() == 2000);
  CHECK(s.audio.start == 600);
  CHECK(s.source_duration_ms == 2000);
  SynthAudioMsg s085 = mock_tts(t, 0.85, 99);
  CHECK(s085.audio.duration_ms() == 1700);
  CHECK(mock_tts(t, 1.0, 99).audio.samples == s.audio.samples);
  CHECK_THROWS(mock_tts(t, 0.0));
  CHECK_THROWS(mock_tts(t, -1.0));
}

TEST_CASE("worker charges service time before releasing the message") {
  MediaClock clock;
  Broker broker(clock);
  broker.declare_queue("in");
  broker.declare_queue("out");
  StageWorker worker(
      clock, broker, "in", "out", make_profile("stt", 100, 500),
      [](const Envelope& env) {
        return StageWorker::Result{{env.msg.uuid, env.msg.payload}, 800};
      });
  std::vector<Timestamp> out_ts;
  broker.subscribe("out", 4, [&](const Envelope& env) {
    out_ts.push_back(clock.now());
    broker.ack(env.token);
  });
  broker.publish("in", raw_msg(1, 0, 16));
  clock.run_until_idle();
  REQUIRE(out_ts.size() == 1);
  CHECK(out_ts[0] == 500);  // 100 fixed + 500 * 0.8
  CHECK(worker.stats().processed == 1);
  CHECK(worker.stats().failed == 0);
  CHECK(worker.stats().busy_ms == 500);
  CHECK(broker.stats("in").acked == 1);
}

TEST_CASE("a full downstream queue backpressures the upstream ack") {
  MediaClock clock;
  Broker broker(clock);
  broker.declare_queue("in");
  QueueOptions small;
  small.budget_bytes = 40;  // exactly one message
  broker.declare_queue("out", small);
  StageWorker worker(
      clock, broker, "in", "out", make_profile("mt", 0, 0),
      [](const Envelope& env) {
        return StageWorker::Result{{env.msg.uuid, env.msg.payload}, 0};
      });
  broker.publish("in", raw_msg(2, 0, 40));
  broker.publish("in", raw_msg(2, 1, 40));
  clock.run_until_idle();
  // First result fills the byte budget; the second parks, so its upstream
  // delivery stays unacked and the input queue shows one in flight.
  CHECK(worker.stats().processed == 2);
  CHECK(broker.stats("in").acked == 1);
  CHECK(broker.stats("in").inflight == 1);
  CHECK(broker.stats("out").depth == 1);
  CHECK(broker.stats("out").used_bytes == 40);

  std::int64_t drained = 0;
  broker.subscribe("out", 1, [&](const Envelope& env) {
    drained += 1;
    broker.ack(env.token);
  });
  clock.run_until_idle();
  CHECK(drained == 2);
  CHECK(broker.stats("in").acked == 2);
  CHECK(broker.stats("in").inflight == 0);
  CHECK(broker.stats("out").used_bytes == 0);
  CHECK(broker.stats("out").max_used_bytes == 40);
}

TEST_CASE("a stage that keeps throwing dead-letters its input") {
  MediaClock clock;
  Broker broker(clock);
  broker.declare_queue("in");  // max_attempts 3
  broker.declare_queue("out");
  StageWorker worker(clock, broker, "in", "out",
                     make_profile("tts", 0, 0), [](const Envelope&) -> StageWorker::Result {
                       throw std::runtime_error("model exploded");
                     });
  broker.publish("in", raw_msg(3, 0, 8));
  clock.run_until_idle();
  CHECK(worker.stats().processed == 0);
  CHECK(worker.stats().failed == 3);
  CHECK(broker.stats("in").dead_lettered == 1);
  CHECK(broker.stats("in").redeliveries == 2);
  CHECK(broker.stats("out").published == 0);
  CHECK(broker.stats(Broker::dlq_name("in")).depth == 1);
}

TEST_CASE("orchestrator pairs audio with frames and reports in birth order") {
  OrchRig rig;
  SpeechPattern pattern;  // 600 silence, speech 600-2000, pause, speech 2600-
  AudioBuffer full = render_pattern(pattern, 3000);
  rig.load_frames(pattern, 3000);
  rig.start();
  rig.publish_at(0, rig.synth_msg(full, 0, 2300, 0, 0));
  rig.publish_at(10, rig.synth_msg(full, 2300, 3000, 1, 10));
  rig.clock.run_until_idle();

  const auto& st = rig.orch->stats();
  CHECK(st.completions == 2);
  CHECK(st.gathers == 2);
  CHECK(st.gather_retries == 0);
  CHECK(st.sync_failures == 0);
  CHECK(st.cap_drops == 0);
  CHECK(st.detector_calls > 0);  // simulation frames carry no face
  CHECK(st.max_abs_offset_ms == 0);

  // First segment: detect charge round(12 * 2400 / 1000) = 29 plus the 2 ms
  // alignment tick. The second is ready at 22 but holds for birth order.
  const auto& ev = rig.orch->events();
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::Aligned);
  CHECK(ev[0].segment == derive_uuid(900, 1, 0));
  CHECK(ev[0].ts_ms == 31);
  CHECK(ev[0].latency_ms == 31);
  CHECK(ev[0].offset_ms == 0);
  CHECK(ev[1].segment == derive_uuid(900, 1, 1));
  CHECK(ev[1].ts_ms == 31);
  CHECK(ev[1].latency_ms == 21);
  CHECK(st.max_sync_overhead_ms == 11);  // the held second segment

  REQUIRE(rig.pairs.size() == 2);
  CHECK(rig.pairs[0].n_frames == 71);  // 30 fps over [-50, 2350]
  CHECK(rig.pairs[1].n_frames == 22);
  CHECK(rig.pairs[0].mel_frames == 140);
  CHECK(rig.pairs[1].mel_frames == 40);
  CHECK(rig.broker.stats(kAudioOutputQueue).acked == 2);
  CHECK(rig.broker.stats(kFinalQueue).acked == 2);
}

TEST_CASE("a lone in-order segment costs exactly the alignment tick") {
  OrchRig rig;
  SpeechPattern pattern;
  AudioBuffer full = render_pattern(pattern, 3000);
  rig.load_frames(pattern, 3000);
  rig.start();
  rig.publish_at(0, rig.synth_msg(full, 0, 2300, 0, 0));
  rig.clock.run_until_idle();
  CHECK(rig.orch->stats().completions == 1);
  CHECK(rig.orch->stats().max_sync_overhead_ms == 2);
}

TEST_CASE("gathering retries until frames show up") {
  OrchRig rig;
  SpeechPattern pattern;
  AudioBuffer full = render_pattern(pattern, 1200);
  rig.start();  // ring empty at publish time
  rig.publish_at(0, rig.synth_msg(full, 0, 1000, 0, 0));
  rig.clock.call_at(150, [&] { rig.load_frames(pattern, 1200); });
  rig.clock.run_until_idle();

  const auto& st = rig.orch->stats();
  CHECK(st.gather_retries == 2);  // 100 ms miss, 300 ms hit
  CHECK(st.sync_failures == 0);
  CHECK(st.completions == 1);
  const auto& ev = rig.orch->events();
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].ts_ms == 315);  // 300 + round(12 * 1.1) + 2
  CHECK(ev[0].latency_ms == 315);
}

TEST_CASE("a segment with no frames fails sync without blocking the rest") {
  OrchRig rig;
  SpeechPattern pattern;
  AudioBuffer full = render_pattern(pattern, 3000);
  rig.load_frames(pattern, 3000);  // covers [0, 3000) only
  rig.start();
  SynthAudioMsg orphan = rig.synth_msg(full, 0, 1000, 0, 0);
  orphan.begin = 5000;  // span with no camera coverage
  orphan.end = 6000;
  orphan.audio.start = 5000;
  rig.publish_at(0, orphan);
  rig.publish_at(0, rig.synth_msg(full, 0, 1000, 1, 0));
  rig.clock.run_until_idle();

  const auto& st = rig.orch->stats();
  CHECK(st.gather_retries == 3);
  CHECK(st.sync_failures == 1);
  CHECK(st.completions == 1);
  const auto& ev = rig.orch->events();
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::SyncFailure);
  CHECK(ev[0].segment == orphan.uuid);
  CHECK(ev[0].ts_ms == 700);  // retries at 100, 300, 700
  CHECK(ev[1].kind == EventKind::Aligned);
  CHECK(ev[1].ts_ms == 700);  // held for order, released by the failure
  CHECK(st.max_sync_overhead_ms == 700 - 13);
  CHECK(rig.broker.stats(kAudioOutputQueue).dead_lettered == 1);
  CHECK(rig.broker.stats(kAudioOutputQueue).acked == 1);
  CHECK(rig.broker.stats(Broker::dlq_name(kAudioOutputQueue)).depth == 1);
}

TEST_CASE("memory caps drop the oldest unpublished segment") {
  OrchRig rig;
  SpeechPattern pattern;
  AudioBuffer full = render_pattern(pattern, 3000);
  rig.load_frames(pattern, 3000);
  rig.cfg.audio_cap_bytes = 40000;  // one 1 s segment fits, two do not
  rig.start();
  rig.publish_at(0, rig.synth_msg(full, 0, 1000, 0, 0));
  rig.publish_at(0, rig.synth_msg(full, 1000, 2000, 1, 0));
  rig.clock.run_until_idle();

  const auto& st = rig.orch->stats();
  CHECK(st.cap_drops == 1);
  CHECK(st.completions == 1);
  const auto& ev = rig.orch->events();
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].kind == EventKind::DeadLetter);
  CHECK(ev[0].segment == derive_uuid(900, 1, 0));  // oldest goes
  CHECK(ev[1].kind == EventKind::Aligned);
  CHECK(ev[1].segment == derive_uuid(900, 1, 1));
  CHECK(rig.broker.stats(kAudioOutputQueue).dead_lettered == 1);
}

TEST_CASE("repeated offsets accumulate into exactly one resync") {
  OrchRig rig(2048);
  SpeechPattern pattern;
  AudioBuffer full = render_pattern(pattern, 1200);
  rig.load_frames(pattern, 1200);
  rig.start();
  rig.forced_offset = 120;
  for (std::uint64_t i = 0; i < 12; ++i)
    rig.publish_at(0, rig.synth_msg(full, 0, 1000, i, 0));
  rig.clock.run_until_idle();

  const auto& st = rig.orch->stats();
  CHECK(st.completions == 12);
  CHECK(st.resyncs == 1);  // smoothed level first clears 100 on feed 9
  CHECK(st.max_abs_offset_ms == 120);
  const auto& ev = rig.orch->events();
  REQUIRE(ev.size() == 13);
  int aligned_before = 0;
  std::size_t resync_at = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (ev[i].kind == EventKind::Resync) {
      resync_at = i;
      break;
    }
    aligned_before += 1;
  }
  CHECK(aligned_before == 9);
  CHECK(ev[resync_at].offset_ms == 120);
}

TEST_CASE("events serialize to one stable json object per line") {
  Event e;
  e.ts_ms = 1234;
  e.kind = EventKind::Aligned;
  e.segment = derive_uuid(77, 0, 0);
  e.offset_ms = -3;
  e.latency_ms = 456;
  std::string line = event_to_ndjson(e);
  CHECK(line == "{\"ts_ms\":1234,\"kind\":\"aligned\",\"segment\":\"" +
                    e.segment.to_string() +
                    "\",\"offset_ms\":-3,\"latency_ms\":456}");
  auto j = nlohmann::json::parse(line);
  CHECK(j["ts_ms"] == 1234);
  CHECK(j["kind"] == "aligned");
  CHECK(j["segment"] == e.segment.to_string());
  CHECK(j["offset_ms"] == -3);
  CHECK(j["latency_ms"] == 456);

  Event f;
  f.ts_ms = 9;
  f.kind = EventKind::SyncFailure;
  f.segment = derive_uuid(77, 0, 1);
  TempDir tmp("events");
  write_events_ndjson(tmp.file("events.ndjson"), {e, f});
  std::string text = slurp_text(tmp.file("events.ndjson"));
  CHECK(text == event_to_ndjson(e) + "\n" + event_to_ndjson(f) + "\n");
  CHECK(std::string(event_kind_name(EventKind::Resync)) == "resync");
  CHECK(std::string(event_kind_name(EventKind::DeadLetter)) == "dead_letter");
}

TEST_CASE("published scenarios carry their calibrated profiles") {
  Scenario t3 = paper_table3_scenario();
  CHECK(t3.name == "paper-table3");
  CHECK(t3.clip_lengths_s == std::vector<double>{1, 3, 5, 8});
  CHECK(t3.repetitions == 10);
  CHECK(t3.jitter == 0.03);
  CHECK(t3.baseline_startup_ms == 1840);
  CHECK(t3.baseline_stt.per_sec_ms == 780);
  CHECK(t3.baseline_mt.per_sec_ms == 780);
  CHECK(t3.baseline_tts.per_sec_ms == 780);
  CHECK(t3.baseline_lipsync.per_sec_ms == 620);
  CHECK(t3.pipeline_startup_ms == 0);
  CHECK(t3.stt.per_sec_ms == 520);
  CHECK(t3.mt.fixed_ms == 5);
  CHECK(t3.mt.per_sec_ms == 525);
  CHECK(t3.tts.per_sec_ms == 500);
  CHECK(t3.lipsync.per_sec_ms == 530);
  CHECK(t3.facedetect.per_sec_ms == 12);
  CHECK(t3.align_charge_ms == 2);
  CHECK(t3.clip_lengths_ms() ==
        std::vector<DurationMs>{1000, 3000, 5000, 8000});

  Scenario lin = linear_sweep_scenario();
  CHECK(lin.name == "linear-sweep");
  CHECK(lin.clip_lengths_s == std::vector<double>{4, 8, 12, 16});
  CHECK(lin.jitter == 0.0);
  CHECK(lin.baseline_startup_ms == 0);
  CHECK(lin.stt.per_sec_ms == 900);
  CHECK(lin.mt.per_sec_ms == 350);
  CHECK(lin.tts.per_sec_ms == 500);
  CHECK(lin.lipsync.per_sec_ms == 250);
  CHECK(lin.facedetect.per_sec_ms == 40);

  CHECK(scenario_names() ==
        std::vector<std::string>{"paper-table3", "linear-sweep"});
  CHECK(scenario_by_name("paper-table3").name == "paper-table3");
  CHECK(scenario_by_name("linear-sweep").name == "linear-sweep");
  CHECK_THROWS(scenario_by_name("nope"));
  CHECK(parse_run_mode("baseline") == RunMode::Baseline);
  CHECK(parse_run_mode("pipeline") == RunMode::Pipeline);
  CHECK(parse_run_mode("both") == RunMode::Both);
  CHECK_THROWS(parse_run_mode("fast"));
  CHECK(std::string(run_mode_name(RunMode::Both)) == "both");
}

TEST_CASE("randomized scenarios stay on the grid and keep the baseline dominant") {
  for (std::uint64_t seed = 1; seed <= 24; ++seed) {
    Scenario sc = random_scenario(seed);
    CHECK(sc.jitter == 0.0);
    CHECK(sc.repetitions == 1);
    REQUIRE(sc.clip_lengths_s.size() == 1);
    DurationMs clip = sc.clip_lengths_ms()[0];
    CHECK(clip >= 2000);
    CHECK(clip <= 9500);
    CHECK(clip % 20 == 0);
    CHECK(pattern_ends_in_speech(sc.pattern, clip));

    CHECK(sc.pattern.lead_silence_ms >= 0);
    CHECK(sc.pattern.lead_silence_ms <= 600);
    CHECK(sc.pattern.lead_silence_ms % 20 == 0);
    CHECK(sc.pattern.tone_hz >= 150.0);
    CHECK(sc.pattern.tone_hz <= 400.0);
    REQUIRE(!sc.pattern.bursts.empty());
    CHECK(sc.pattern.bursts.size() <= 4);
    for (const auto& b : sc.pattern.bursts) {
      CHECK(b.speech_ms >= 600);
      CHECK(b.speech_ms <= 2000);
      CHECK(b.speech_ms % 20 == 0);
      CHECK(b.pause_ms >= 520);
      CHECK(b.pause_ms <= 960);
      CHECK(b.pause_ms % 40 == 0);
    }

    CHECK(sc.baseline_startup_ms == sc.pipeline_startup_ms);
    CHECK(sc.baseline_startup_ms >= 0);
    CHECK(sc.baseline_startup_ms <= 2000);
    for (const StageProfile* p : {&sc.stt, &sc.mt, &sc.tts, &sc.lipsync}) {
      CHECK(p->fixed_ms >= 0);
      CHECK(p->fixed_ms <= 200);
      CHECK(p->per_sec_ms >= 100);
      CHECK(p->per_sec_ms <= 900);
    }
    CHECK(sc.facedetect.fixed_ms <= 20);
    CHECK(sc.facedetect.per_sec_ms >= 10);
    CHECK(sc.facedetect.per_sec_ms <= 60);

    CHECK(sc.baseline_stt.per_sec_ms == sc.stt.per_sec_ms);
    CHECK(sc.baseline_mt.per_sec_ms == sc.mt.per_sec_ms);
    CHECK(sc.baseline_tts.per_sec_ms == sc.tts.per_sec_ms);
    CHECK(sc.baseline_lipsync.per_sec_ms ==
          sc.lipsync.per_sec_ms + sc.facedetect.per_sec_ms);
    CHECK(sc.baseline_lipsync.fixed_ms ==
          sc.lipsync.fixed_ms + sc.facedetect.fixed_ms + sc.align_charge_ms +
              DurationMs(std::ceil(sc.facedetect.per_sec_ms * 0.1)) + 2);
  }

  Scenario a = random_scenario(5);
  Scenario b = random_scenario(5);
  CHECK(a.stt.per_sec_ms == b.stt.per_sec_ms);
  CHECK(a.pattern.lead_silence_ms == b.pattern.lead_silence_ms);
  CHECK(a.clip_lengths_s == b.clip_lengths_s);
}

}  // TEST_SUITE

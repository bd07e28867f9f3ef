// Microbenchmarks for the hot paths: DSP, broker turnaround, frame lookups
// and one whole pipeline run as an end-to-end reference point.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "lipstream/align.hpp"
#include "lipstream/broker.hpp"
#include "lipstream/kalman.hpp"
#include "lipstream/mel.hpp"
#include "lipstream/rng.hpp"
#include "lipstream/runner.hpp"
#include "lipstream/scenario.hpp"
#include "lipstream/segmenter.hpp"
#include "lipstream/stage.hpp"
#include "lipstream/synth.hpp"
#include "lipstream/visual_mocks.hpp"

namespace {

using namespace lipstream;

AudioBuffer bench_clip(DurationMs ms) {
  SpeechPattern p;
  p.lead_silence_ms = 200;
  p.bursts = {BurstSpec{1400, 600}};
  return render_pattern(p, ms);
}

void BM_MelCompute(benchmark::State& state) {
  AudioBuffer audio = bench_clip(DurationMs(state.range(0)));
  MelConfig cfg;
  for (auto _ : state) {
    MelSpectrogram mel = compute_mel(audio, cfg);
    benchmark::DoNotOptimize(mel.data.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          mel_frame_count(std::int64_t(audio.samples.size())));
}
BENCHMARK(BM_MelCompute)->Arg(1000)->Arg(4000)->Arg(8000);

void BM_EnergyEnvelope(benchmark::State& state) {
  AudioBuffer audio = bench_clip(DurationMs(state.range(0)));
  for (auto _ : state) {
    auto env = energy_envelope_ms(audio);
    benchmark::DoNotOptimize(env.data());
  }
}
BENCHMARK(BM_EnergyEnvelope)->Arg(2000)->Arg(8000);

void BM_AlignEnvelopes(benchmark::State& state) {
  AudioBuffer audio = bench_clip(DurationMs(state.range(0)));
  std::vector<double> energy = energy_envelope_ms(audio);
  std::vector<double> motion(energy.size());
  for (std::size_t t = 0; t < motion.size(); ++t)
    motion[t] = t >= 20 ? energy[t - 20] : 0.0;
  for (auto _ : state) {
    AlignResult r = align_envelopes(energy, motion);
    benchmark::DoNotOptimize(r.offset_ms);
  }
}
BENCHMARK(BM_AlignEnvelopes)->Arg(2000)->Arg(8000);

void BM_Segmenter(benchmark::State& state) {
  AudioBuffer audio = bench_clip(8000);
  for (auto _ : state) {
    Segmenter seg(SegmenterConfig{});
    auto segs = seg.push(audio);
    auto tail = seg.finish();
    benchmark::DoNotOptimize(segs.size() + tail.size());
  }
  state.SetBytesProcessed(std::int64_t(state.iterations()) *
                          std::int64_t(audio.samples.size() * 2));
}
BENCHMARK(BM_Segmenter);

void BM_ServiceCharge(benchmark::State& state) {
  StageProfile p;
  p.name = "stt";
  p.fixed_ms = 5;
  p.per_sec_ms = 520.0;
  p.jitter = 0.03;
  p.seed = 42;
  std::uint64_t i = 0;
  for (auto _ : state) {
    Uuid u = derive_uuid(7, 1, i++);
    benchmark::DoNotOptimize(service_ms(p, 2300, u));
  }
}
BENCHMARK(BM_ServiceCharge);

void BM_BrokerRoundtrip(benchmark::State& state) {
  MediaClock clock;
  Broker broker(clock);
  broker.declare_queue("bench");
  std::int64_t delivered = 0;
  broker.subscribe("bench", 16, [&](const Envelope& env) {
    delivered += 1;
    broker.ack(env.token);
  });
  auto payload = std::make_shared<const std::vector<std::uint8_t>>(256, 0x5a);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Message m;
    m.uuid = derive_uuid(9, 2, i++);
    m.payload = payload;
    broker.publish("bench", m);
    clock.run_until_idle();
  }
  benchmark::DoNotOptimize(delivered);
  state.SetItemsProcessed(delivered);
}
BENCHMARK(BM_BrokerRoundtrip);

void BM_FrameRingWindow(benchmark::State& state) {
  FrameRing ring(300);
  auto frames = render_pattern_frames(SpeechPattern{}, 10000);
  for (auto& f : frames) ring.insert(f);
  Timestamp lo = 0;
  for (auto _ : state) {
    auto got = ring.window(lo, lo + 2400);
    benchmark::DoNotOptimize(got.size());
    lo = (lo + 100) % 7000;
  }
}
BENCHMARK(BM_FrameRingWindow);

void BM_KalmanUpdate(benchmark::State& state) {
  KalmanBoxFilter filter;
  std::int64_t i = 0;
  for (auto _ : state) {
    FaceBox box = mock_face_detect(i++, 99);
    benchmark::DoNotOptimize(filter.update(box, 1.0 / 30.0).vx);
  }
}
BENCHMARK(BM_KalmanUpdate);

void BM_PipelineClip(benchmark::State& state) {
  Scenario sc = paper_table3_scenario();
  sc.jitter = 0.0;
  DurationMs clip = DurationMs(state.range(0));
  for (auto _ : state) {
    ClipRunResult r = run_pipeline_clip(sc, clip, run_seed_for(sc.seed, clip, 0));
    benchmark::DoNotOptimize(r.clip_latency_ms);
  }
}
BENCHMARK(BM_PipelineClip)->Arg(3000)->Arg(8000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

#include "lipstream/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "lipstream/rng.hpp"

namespace lipstream {

RunMode parse_run_mode(const std::string& s) {
  if (s == "baseline") return RunMode::Baseline;
  if (s == "pipeline") return RunMode::Pipeline;
  if (s == "both") return RunMode::Both;
  throw std::invalid_argument("unknown mode: " + s +
                              " (expected baseline|pipeline|both)");
}

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::Baseline:
      return "baseline";
    case RunMode::Pipeline:
      return "pipeline";
    case RunMode::Both:
      return "both";
  }
  return "unknown";
}

std::vector<DurationMs> Scenario::clip_lengths_ms() const {
  std::vector<DurationMs> out;
  out.reserve(clip_lengths_s.size());
  for (double s : clip_lengths_s) {
    if (!(s > 0)) throw std::invalid_argument("clip length must be positive");
    out.push_back(std::llround(s * 1000.0));
  }
  return out;
}

namespace {

StageProfile profile(const char* name, DurationMs fixed, double per_sec) {
  StageProfile p;
  p.name = name;
  p.fixed_ms = fixed;
  p.per_sec_ms = per_sec;
  return p;
}

}  // namespace

Scenario paper_table3_scenario() {
  Scenario sc;
  sc.name = "paper-table3";
  sc.clip_lengths_s = {1, 3, 5, 8};
  sc.repetitions = 10;
  sc.jitter = 0.03;

  // Dense serial stack: one warm-up per clip, then every segment pays all
  // four stages back to back. Visual work rides inside the lipsync rate.
  sc.baseline_startup_ms = 1840;
  sc.baseline_stt = profile("stt", 0, 780);
  sc.baseline_mt = profile("mt", 0, 780);
  sc.baseline_tts = profile("tts", 0, 780);
  sc.baseline_lipsync = profile("lipsync", 0, 620);

  // Streaming stack: warm engines, per-stage rates fitted so the measured
  // clip latencies land on the published table.
  sc.pipeline_startup_ms = 0;
  sc.stt = profile("stt", 0, 520);
  sc.mt = profile("mt", 5, 525);
  sc.tts = profile("tts", 0, 500);
  sc.lipsync = profile("lipsync", 0, 530);
  sc.facedetect = profile("facedetect", 0, 12);
  return sc;
}

Scenario linear_sweep_scenario() {
  Scenario sc;
  sc.name = "linear-sweep";
  sc.clip_lengths_s = {4, 8, 12, 16};
  sc.repetitions = 1;
  sc.jitter = 0.0;

  sc.baseline_startup_ms = 0;
  sc.baseline_stt = profile("stt", 0, 900);
  sc.baseline_mt = profile("mt", 0, 350);
  sc.baseline_tts = profile("tts", 0, 500);
  sc.baseline_lipsync = profile("lipsync", 0, 250);

  sc.pipeline_startup_ms = 0;
  sc.stt = sc.baseline_stt;
  sc.mt = sc.baseline_mt;
  sc.tts = sc.baseline_tts;
  sc.lipsync = sc.baseline_lipsync;
  sc.facedetect = profile("facedetect", 0, 40);
  return sc;
}

std::vector<std::string> scenario_names() {
  return {"paper-table3", "linear-sweep"};
}

Scenario scenario_by_name(const std::string& name) {
  if (name == "paper-table3") return paper_table3_scenario();
  if (name == "linear-sweep") return linear_sweep_scenario();
  throw std::invalid_argument("unknown scenario: " + name);
}

Scenario random_scenario(std::uint64_t seed) {
  std::uint64_t state = mix_u64(seed, 0x5ce7a510u);
  auto pick = [&state](std::int64_t lo, std::int64_t hi, std::int64_t step) {
    std::uint64_t n = std::uint64_t((hi - lo) / step + 1);
    return lo + step * std::int64_t(splitmix64(state) % n);
  };

  Scenario sc;
  sc.name = "random-" + std::to_string(seed);
  sc.repetitions = 1;
  sc.seed = seed;
  sc.jitter = 0.0;

  sc.pattern.lead_silence_ms = pick(0, 600, 20);
  sc.pattern.tone_hz = double(pick(150, 400, 1));
  sc.pattern.bursts.clear();
  int n_bursts = int(pick(1, 4, 1));
  for (int i = 0; i < n_bursts; ++i) {
    BurstSpec b;
    b.speech_ms = pick(600, 2000, 20);
    b.pause_ms = pick(520, 960, 40);
    sc.pattern.bursts.push_back(b);
  }

  // Clips stay well under the forced-split cap and must end inside speech
  // so the tail always flushes.
  DurationMs clip = 0;
  for (int tries = 0; tries < 256; ++tries) {
    clip = pick(2000, 9500, 20);
    if (clip > sc.pattern.lead_silence_ms + 100 &&
        pattern_ends_in_speech(sc.pattern, clip))
      break;
    clip = 0;
  }
  if (clip == 0)
    throw std::runtime_error("random_scenario: no speech-final clip length");
  sc.clip_lengths_s = {double(clip) / 1000.0};

  DurationMs startup = pick(0, 2000, 1);
  sc.baseline_startup_ms = startup;
  sc.pipeline_startup_ms = startup;

  sc.stt = profile("stt", pick(0, 200, 1), double(pick(100, 900, 5)));
  sc.mt = profile("mt", pick(0, 200, 1), double(pick(100, 900, 5)));
  sc.tts = profile("tts", pick(0, 200, 1), double(pick(100, 900, 5)));
  sc.lipsync = profile("lipsync", pick(0, 200, 1), double(pick(100, 900, 5)));
  sc.facedetect = profile("facedetect", pick(0, 20, 1), double(pick(10, 60, 1)));

  // Baseline covers the pipeline's whole per-segment serial cost: same ATP
  // stages, lipsync widened by the visual rate plus slack for the +-50 ms
  // gather window, the alignment tick and rounding.
  sc.baseline_stt = sc.stt;
  sc.baseline_mt = sc.mt;
  sc.baseline_tts = sc.tts;
  sc.baseline_lipsync = sc.lipsync;
  sc.baseline_lipsync.per_sec_ms += sc.facedetect.per_sec_ms;
  sc.baseline_lipsync.fixed_ms +=
      sc.facedetect.fixed_ms + sc.align_charge_ms +
      DurationMs(std::ceil(sc.facedetect.per_sec_ms * 0.1)) + 2;
  return sc;
}

}  // namespace lipstream

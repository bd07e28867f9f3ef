#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipstream/orchestrator.hpp"
#include "lipstream/scenario.hpp"
#include "lipstream/segmenter.hpp"

namespace lipstream {

// Seed for one (clip, repetition) run; every jitter draw, id and synthesis
// choice inside the run derives from it.
std::uint64_t run_seed_for(std::uint64_t scenario_seed, DurationMs clip_ms,
                           int rep);

struct SegmentOutcome {
  Uuid uuid;
  Timestamp begin = 0;  // media span in the source clip
  Timestamp end = 0;
  DurationMs duration_ms = 0;
  double confidence = 1.0;
  bool forced = false;
  Timestamp birth = 0;          // clock time it entered the pipeline
  Timestamp completion_ts = 0;  // clock time its render finished; 0 if lost
  DurationMs latency_ms = 0;    // completion - birth
};

struct ClipRunResult {
  DurationMs clip_ms = 0;
  RunMode mode = RunMode::Pipeline;
  std::vector<SegmentOutcome> segments;
  std::int64_t completed = 0;
  DurationMs clip_latency_ms = 0;  // last completion, measured from epoch 0
  std::vector<Event> events;
  OrchestratorStats orch;  // zero-valued in baseline mode
  SegmenterMetrics segmenter;
  std::size_t queue_mem_hwm_bytes = 0;   // sum of per-queue high waters
  std::size_t buffer_mem_hwm_bytes = 0;  // orchestrator slot high waters
  double depth_time_avg = 0.0;           // segments in flight, time-averaged
};

// Source material for one run: the audio to segment and the camera track.
// frames may be empty; pipeline gathers then fail into sync-failure events.
struct ClipInput {
  AudioBuffer audio;
  std::vector<FrameRecord> frames;
  DurationMs clip_ms = 0;
};

// Renders the scenario's speech pattern and a matching frame track.
ClipInput synthetic_clip(const Scenario& sc, DurationMs clip_ms);

// One clip, one repetition, on its own clock and broker. Baseline runs the
// four stages strictly serially per segment with no queues; pipeline runs
// the full system. Virtual clock by default; real mode sleeps for real.
ClipRunResult run_baseline_input(
    const Scenario& sc, const ClipInput& input, std::uint64_t run_seed,
    MediaClock::Mode clock_mode = MediaClock::Mode::Virtual);
ClipRunResult run_pipeline_input(
    const Scenario& sc, const ClipInput& input, std::uint64_t run_seed,
    MediaClock::Mode clock_mode = MediaClock::Mode::Virtual);

// Same, over the scenario's own synthetic input.
ClipRunResult run_baseline_clip(
    const Scenario& sc, DurationMs clip_ms, std::uint64_t run_seed,
    MediaClock::Mode clock_mode = MediaClock::Mode::Virtual);
ClipRunResult run_pipeline_clip(
    const Scenario& sc, DurationMs clip_ms, std::uint64_t run_seed,
    MediaClock::Mode clock_mode = MediaClock::Mode::Virtual);

// Event-algebra prediction of both modes from profile arithmetic and the
// closed-form segment layout alone: no broker, no workers, no clock. Only
// defined for jitter-free scenarios (throws otherwise). A jitter-free run
// must reproduce these numbers exactly; that equality is the core
// correctness test of the whole concurrent machine.
struct OraclePrediction {
  std::vector<DurationMs> baseline_durations;  // baseline-mode segment table
  std::vector<DurationMs> pipeline_durations;  // semantic segment table
  std::vector<Timestamp> baseline_completions;
  std::vector<Timestamp> pipeline_completions;
  DurationMs baseline_latency_ms = 0;
  DurationMs pipeline_latency_ms = 0;
};
OraclePrediction oracle_simulate(const Scenario& sc, DurationMs clip_ms);

// Ordinary least squares of y over x. Throws below 3 points.
struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 1.0;
};
OlsFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y);

// 1 / (latency_s * peak_mem_gb), documented units (s*GB)^-1. Throws on
// non-positive inputs.
double efficiency(double latency_s, double peak_mem_gb);

// Sampled pipeline depth: number of segments born but not yet completed at
// t = 0, step, 2*step ... up to the last completion.
std::vector<int> depth_series(const std::vector<SegmentOutcome>& segments,
                              DurationMs step_ms = 100);

struct ReportRow {
  double clip_s = 0.0;
  RunMode mode = RunMode::Pipeline;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double speedup = 0.0;  // baseline mean over pipeline mean for this clip
  double depth_avg = 0.0;
  std::size_t mem_hwm_bytes = 0;
  double efficiency = 0.0;
};

struct RunReport {
  std::string scenario;
  std::uint64_t seed = 0;
  int repetitions = 1;
  double jitter = 0.0;
  std::vector<ReportRow> rows;  // clip-major, baseline row before pipeline
  bool has_baseline = false;
  bool has_pipeline = false;
  OlsFit baseline_fit;  // latency seconds over clip seconds
  OlsFit pipeline_fit;
};

// Runs every (clip, rep) the scenario asks for and aggregates.
RunReport run_scenario(const Scenario& sc);

std::string report_csv(const RunReport& r);      // machine: one row per line
std::string report_json(const RunReport& r);     // summary incl. fits
std::string report_gnuplot(const RunReport& r);  // clip_s vs latency columns
std::string report_table(const RunReport& r);    // human-oriented stdout

}  // namespace lipstream

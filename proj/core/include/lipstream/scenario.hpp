#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lipstream/segmenter.hpp"
#include "lipstream/stage.hpp"
#include "lipstream/synth.hpp"

namespace lipstream {

enum class RunMode { Baseline, Pipeline, Both };

RunMode parse_run_mode(const std::string& s);  // throws on unknown
const char* run_mode_name(RunMode m);

// Everything a benchmark run needs to replay exactly: the input generator,
// the segmenter setup and the per-mode cost model. Baseline and pipeline
// carry separate profiles; the baseline stands in for the dense serial
// stack, the pipeline for the streaming one, and their lipsync aggregates
// differ because the baseline folds the visual work into that stage.
struct Scenario {
  std::string name;
  std::vector<double> clip_lengths_s{1, 3, 5, 8};
  int repetitions = 10;
  std::uint64_t seed = 1337;
  RunMode mode = RunMode::Both;
  double jitter = 0.0;  // applied to every stage profile at run time

  SpeechPattern pattern;
  double fps = 30.0;
  SegmenterConfig segmenter;  // semantic settings; baseline mode relaxes them

  DurationMs baseline_startup_ms = 0;
  StageProfile baseline_stt;
  StageProfile baseline_mt;
  StageProfile baseline_tts;
  StageProfile baseline_lipsync;

  DurationMs pipeline_startup_ms = 0;
  StageProfile stt;
  StageProfile mt;
  StageProfile tts;
  StageProfile lipsync;
  StageProfile facedetect;  // billed on the gathered span
  DurationMs align_charge_ms = 2;

  std::vector<DurationMs> clip_lengths_ms() const;
};

// Calibrated reproduction of the published latency table (clips 1/3/5/8 s,
// 10 reps, 3% jitter).
Scenario paper_table3_scenario();
// Equal-cost sweep (clips 4/8/12/16 s, jitter free) whose fitted slopes are
// exact by construction: baseline = sum of per-second costs, pipeline = the
// largest one.
Scenario linear_sweep_scenario();

std::vector<std::string> scenario_names();
Scenario scenario_by_name(const std::string& name);  // throws on unknown

// Jitter-free randomized scenario for oracle sweeps. Pattern spans stay on
// the 20 ms analysis grid (pauses on 40 ms so midpoints stay on it), every
// clip ends inside speech, and the baseline profiles dominate the
// pipeline's per-segment serial cost so latency monotonicity holds.
Scenario random_scenario(std::uint64_t seed);

}  // namespace lipstream

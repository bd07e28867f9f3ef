#include "lipstream/runner.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "lipstream/align.hpp"
#include "lipstream/broker.hpp"
#include "lipstream/kalman.hpp"
#include "lipstream/log.hpp"
#include "lipstream/mel.hpp"
#include "lipstream/rng.hpp"
#include "lipstream/visual_mocks.hpp"
#include "lipstream/worker.hpp"

namespace lipstream {

namespace {

constexpr DurationMs kGatherMargin = 50;  // orchestrator default window

constexpr std::uint64_t kSegmentStream = 1;  // uuid stream id for segment ids

StageProfile with_jitter(StageProfile p, double jitter, std::uint64_t seed) {
  p.jitter = jitter;
  p.seed = seed;
  return p;
}

struct SegmentedClip {
  std::vector<RawSegment> segments;
  SegmenterMetrics metrics;
};

SegmentedClip segment_audio(const AudioBuffer& audio, SegmenterConfig cfg,
                            SegmenterMode mode) {
  SegmentedClip out;
  cfg.mode = mode;
  Segmenter seg(cfg);
  out.segments = seg.push(audio);
  auto tail = seg.finish();
  out.segments.insert(out.segments.end(), tail.begin(), tail.end());
  out.metrics = seg.metrics();
  return out;
}

void fill_outcomes(ClipRunResult& res, const std::vector<RawSegment>& raw,
                   std::uint64_t run_seed, Timestamp birth) {
  res.segments.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    SegmentOutcome& o = res.segments[i];
    o.uuid = derive_uuid(run_seed, kSegmentStream, i);
    o.begin = raw[i].begin;
    o.end = raw[i].end;
    o.duration_ms = raw[i].duration_ms();
    o.confidence = raw[i].confidence;
    o.forced = raw[i].cause == CutCause::Forced;
    o.birth = birth;
  }
}

void finish_depth(ClipRunResult& res) {
  std::int64_t busy = 0;
  for (const auto& o : res.segments)
    if (o.completion_ts > 0) busy += o.completion_ts - o.birth;
  if (res.clip_latency_ms > 0)
    res.depth_time_avg = double(busy) / double(res.clip_latency_ms);
}

// Upper bound on when a run settles: the fully serial cost of every
// segment, padded. Real-clock runs sleep until this horizon.
DurationMs serial_bound_ms(const Scenario& sc,
                           const std::vector<RawSegment>& raw, RunMode mode) {
  double total = 0;
  for (const auto& r : raw) {
    DurationMs d = r.duration_ms();
    if (mode == RunMode::Baseline) {
      total += double(service_ms(sc.baseline_stt, d) +
                      service_ms(sc.baseline_mt, d) +
                      service_ms(sc.baseline_tts, d) +
                      service_ms(sc.baseline_lipsync, d));
    } else {
      total += double(service_ms(sc.stt, d) + service_ms(sc.mt, d) +
                      service_ms(sc.tts, d) +
                      service_ms(sc.facedetect, d + 2 * kGatherMargin) +
                      sc.align_charge_ms + service_ms(sc.lipsync, d));
    }
  }
  DurationMs startup = mode == RunMode::Baseline ? sc.baseline_startup_ms
                                                 : sc.pipeline_startup_ms;
  return startup + DurationMs(std::llround(total * (1.0 + sc.jitter))) + 1000;
}

void drain(MediaClock& clock, DurationMs horizon) {
  if (clock.mode() == MediaClock::Mode::Virtual) {
    clock.run_until_idle();
    return;
  }
  using namespace std::chrono_literals;
  while (clock.now() < horizon) std::this_thread::sleep_for(20ms);
  for (int i = 0; i < 500 && clock.pending_timers() > 0; ++i)
    std::this_thread::sleep_for(20ms);
}

void insert_frames(FrameRing& ring, const std::vector<FrameRecord>& frames) {
  for (const auto& f : frames) ring.insert(f);
}

struct VisualPass {
  std::int64_t n_frames = 0;
  Timestamp first_ts = 0;
  Timestamp last_ts = 0;
  AlignResult align;
  std::int64_t mel_frames = 0;
};

// Detection, smoothing, mel and envelope alignment for one segment. Content
// work only; callers charge whatever service time their mode says.
VisualPass visual_pass(const FrameRing& ring, Timestamp begin, Timestamp end,
                       const AudioBuffer& synth, std::uint64_t seed) {
  VisualPass out;
  auto frames = ring.window(begin - kGatherMargin, end + kGatherMargin);
  out.n_frames = std::int64_t(frames.size());
  if (frames.size() < 2) return out;
  KalmanBoxFilter smoother;
  Timestamp prev = 0;
  for (auto& f : frames) {
    FaceBox box = f.face ? *f.face : mock_face_detect(f.frame_index, seed);
    double dt_s = smoother.initialized() ? double(f.ts - prev) / 1000.0 : 0.0;
    f.face = smoother.update(box, dt_s).box;
    prev = f.ts;
  }
  out.first_ts = frames.front().ts;
  out.last_ts = frames.back().ts;
  out.mel_frames = compute_mel(synth).n_frames;
  auto energy = energy_envelope_ms(synth);
  auto motion = motion_envelope_ms(frames, begin, end - begin);
  out.align = align_envelopes(energy, motion);
  return out;
}

}  // namespace

std::uint64_t run_seed_for(std::uint64_t scenario_seed, DurationMs clip_ms,
                           int rep) {
  return mix_u64(mix_u64(scenario_seed, std::uint64_t(clip_ms)),
                 std::uint64_t(rep));
}

ClipInput synthetic_clip(const Scenario& sc, DurationMs clip_ms) {
  ClipInput in;
  in.audio = render_pattern(sc.pattern, clip_ms);
  in.frames = render_pattern_frames(sc.pattern, clip_ms, sc.fps);
  in.clip_ms = clip_ms;
  return in;
}

ClipRunResult run_baseline_input(const Scenario& sc, const ClipInput& input,
                                 std::uint64_t run_seed,
                                 MediaClock::Mode clock_mode) {
  ClipRunResult res;
  res.clip_ms = input.clip_ms;
  res.mode = RunMode::Baseline;

  SegmentedClip cut =
      segment_audio(input.audio, sc.segmenter, SegmenterMode::Baseline);
  res.segmenter = cut.metrics;
  fill_outcomes(res, cut.segments, run_seed, sc.baseline_startup_ms);

  FrameRing ring(std::max<std::size_t>(input.frames.size(), 16));
  insert_frames(ring, input.frames);

  // Whole-clip batch buffering: the serial stack holds everything at once.
  res.buffer_mem_hwm_bytes = input.audio.samples.size() * 2;
  for (const auto& f : input.frames)
    res.buffer_mem_hwm_bytes += std::size_t(f.pix_w) * std::size_t(f.pix_h) * 3;

  const StageProfile stt = with_jitter(sc.baseline_stt, sc.jitter, run_seed);
  const StageProfile mt = with_jitter(sc.baseline_mt, sc.jitter, run_seed);
  const StageProfile tts = with_jitter(sc.baseline_tts, sc.jitter, run_seed);
  const StageProfile lips =
      with_jitter(sc.baseline_lipsync, sc.jitter, run_seed);

  MediaClock clock(clock_mode);
  const std::size_t n = cut.segments.size();

  // One segment at a time: run the whole chain's content, charge the four
  // stages back to back, only then start the next segment.
  std::function<void(std::size_t)> start_segment = [&](std::size_t i) {
    const RawSegment& r = cut.segments[i];
    SegmentOutcome& o = res.segments[i];
    SegmentMsg m;
    m.uuid = o.uuid;
    m.birth = o.birth;
    m.begin = r.begin;
    m.end = r.end;
    m.confidence = r.confidence;
    m.audio = r.audio;
    TextMsg transcript = mock_stt(m);
    TextMsg translation = mock_mt(transcript);
    SynthAudioMsg synth = mock_tts(translation, 1.0, run_seed);
    VisualPass vis = visual_pass(ring, r.begin, r.end, synth.audio, run_seed);
    if (vis.n_frames >= 2)
      mock_lipsync(wav2lip_fp32(), r.end - r.begin,
                   vis.last_ts - vis.first_ts, vis.n_frames);
    else
      log_warn("baseline: no frames for segment ", m.uuid.to_string());
    DurationMs d = r.duration_ms();
    DurationMs svc = service_ms(stt, d, m.uuid) + service_ms(mt, d, m.uuid) +
                     service_ms(tts, d, m.uuid) + service_ms(lips, d, m.uuid);
    clock.call_after(svc, [&, i, vis] {
      SegmentOutcome& done = res.segments[i];
      done.completion_ts = clock.now();
      done.latency_ms = done.completion_ts - done.birth;
      res.completed += 1;
      res.clip_latency_ms = done.completion_ts;
      res.events.push_back({done.completion_ts, EventKind::Aligned, done.uuid,
                            vis.align.offset_ms, done.latency_ms});
      if (i + 1 < n) start_segment(i + 1);
    });
  };

  if (n > 0)
    clock.call_at(sc.baseline_startup_ms, [&] { start_segment(0); });
  drain(clock, serial_bound_ms(sc, cut.segments, RunMode::Baseline));
  finish_depth(res);
  return res;
}

ClipRunResult run_pipeline_input(const Scenario& sc, const ClipInput& input,
                                 std::uint64_t run_seed,
                                 MediaClock::Mode clock_mode) {
  ClipRunResult res;
  res.clip_ms = input.clip_ms;
  res.mode = RunMode::Pipeline;

  SegmentedClip cut =
      segment_audio(input.audio, sc.segmenter, SegmenterMode::Semantic);
  res.segmenter = cut.metrics;
  fill_outcomes(res, cut.segments, run_seed, sc.pipeline_startup_ms);

  MediaClock clock(clock_mode);
  Broker broker(clock);
  for (const char* q : {kAudioQueue, kTextQueue, kTranslationQueue,
                        kAudioOutputQueue, kLipsyncQueue, kFinalQueue})
    broker.declare_queue(q);

  FrameRing ring(std::max<std::size_t>(input.frames.size(), 16));
  insert_frames(ring, input.frames);

  StageWorker stt_worker(
      clock, broker, kAudioQueue, kTextQueue,
      with_jitter(sc.stt, sc.jitter, run_seed), [](const Envelope& env) {
        SegmentMsg m = decode_segment(*env.msg.payload);
        TextMsg t = mock_stt(m);
        return StageWorker::Result{{env.msg.uuid, encode_transcript(t)},
                                   m.duration_ms()};
      });
  StageWorker mt_worker(
      clock, broker, kTextQueue, kTranslationQueue,
      with_jitter(sc.mt, sc.jitter, run_seed), [](const Envelope& env) {
        TextMsg t = decode_transcript(*env.msg.payload);
        TextMsg out = mock_mt(t);
        return StageWorker::Result{{env.msg.uuid, encode_translation(out)},
                                   t.source_duration_ms};
      });
  StageWorker tts_worker(
      clock, broker, kTranslationQueue, kAudioOutputQueue,
      with_jitter(sc.tts, sc.jitter, run_seed),
      [run_seed](const Envelope& env) {
        TextMsg t = decode_translation(*env.msg.payload);
        SynthAudioMsg s = mock_tts(t, 1.0, run_seed);
        return StageWorker::Result{{env.msg.uuid, encode_synth_audio(s)},
                                   t.source_duration_ms};
      });
  StageWorker lipsync_worker(
      clock, broker, kLipsyncQueue, kFinalQueue,
      with_jitter(sc.lipsync, sc.jitter, run_seed), [](const Envelope& env) {
        AlignedPairMsg p = decode_aligned_pair(*env.msg.payload);
        LipsyncRender render =
            mock_lipsync(wav2lip_trt_fp16(), p.end - p.begin,
                         p.last_frame_ts - p.first_frame_ts, p.n_frames);
        FinalMsg f;
        f.uuid = p.uuid;
        f.birth = p.birth;
        f.begin = p.begin;
        f.end = p.end;
        f.source_duration_ms = p.source_duration_ms;
        f.frames_rendered = render.frames;
        f.offset_ms = p.offset_ms;
        return StageWorker::Result{{env.msg.uuid, encode_final(f)},
                                   p.source_duration_ms};
      });

  OrchestratorConfig ocfg;
  ocfg.facedetect = with_jitter(sc.facedetect, sc.jitter, run_seed);
  ocfg.align_charge_ms = sc.align_charge_ms;
  ocfg.gather_margin_ms = kGatherMargin;
  ocfg.seed = run_seed;
  Orchestrator orch(clock, broker, ring, ocfg);

  std::vector<SegmentMsg> msgs(cut.segments.size());
  for (std::size_t i = 0; i < cut.segments.size(); ++i) {
    SegmentMsg& m = msgs[i];
    m.uuid = res.segments[i].uuid;
    m.birth = res.segments[i].birth;
    m.begin = cut.segments[i].begin;
    m.end = cut.segments[i].end;
    m.confidence = cut.segments[i].confidence;
    m.audio = cut.segments[i].audio;
  }
  clock.call_at(sc.pipeline_startup_ms, [&] {
    for (const auto& m : msgs)
      broker.publish(kAudioQueue, {m.uuid, encode_segment(m)});
  });

  drain(clock, serial_bound_ms(sc, cut.segments, RunMode::Pipeline));

  res.events = orch.events();
  res.orch = orch.stats();
  res.completed = res.orch.completions;
  res.clip_latency_ms = res.orch.last_completion_ts;

  std::unordered_map<Uuid, std::size_t, UuidHash> index;
  for (std::size_t i = 0; i < res.segments.size(); ++i)
    index.emplace(res.segments[i].uuid, i);
  for (const auto& e : res.events) {
    if (e.kind != EventKind::Aligned) continue;
    auto it = index.find(e.segment);
    if (it == index.end()) continue;
    res.segments[it->second].completion_ts = e.ts_ms;
    res.segments[it->second].latency_ms = e.latency_ms;
  }

  for (const char* q : {kAudioQueue, kTextQueue, kTranslationQueue,
                        kAudioOutputQueue, kLipsyncQueue, kFinalQueue})
    res.queue_mem_hwm_bytes += broker.stats(q).max_used_bytes;
  res.buffer_mem_hwm_bytes =
      res.orch.audio_hwm_bytes + res.orch.frame_hwm_bytes;
  finish_depth(res);
  return res;
}

ClipRunResult run_baseline_clip(const Scenario& sc, DurationMs clip_ms,
                                std::uint64_t run_seed,
                                MediaClock::Mode clock_mode) {
  return run_baseline_input(sc, synthetic_clip(sc, clip_ms), run_seed,
                            clock_mode);
}

ClipRunResult run_pipeline_clip(const Scenario& sc, DurationMs clip_ms,
                                std::uint64_t run_seed,
                                MediaClock::Mode clock_mode) {
  return run_pipeline_input(sc, synthetic_clip(sc, clip_ms), run_seed,
                            clock_mode);
}

OraclePrediction oracle_simulate(const Scenario& sc, DurationMs clip_ms) {
  if (sc.jitter != 0.0)
    throw std::invalid_argument("oracle_simulate: scenario must be jitter-free");

  OraclePrediction out;
  constexpr DurationMs kNoCap = std::numeric_limits<DurationMs>::max() / 4;
  out.baseline_durations = expected_segment_durations(
      sc.pattern, clip_ms, sc.segmenter.min_silence_ms, 0, kNoCap);
  out.pipeline_durations = expected_segment_durations(
      sc.pattern, clip_ms, sc.segmenter.min_silence_ms,
      sc.segmenter.min_segment_ms, sc.segmenter.max_segment_ms);

  Timestamp t = sc.baseline_startup_ms;
  for (DurationMs d : out.baseline_durations) {
    t += service_ms(sc.baseline_stt, d) + service_ms(sc.baseline_mt, d) +
         service_ms(sc.baseline_tts, d) + service_ms(sc.baseline_lipsync, d);
    out.baseline_completions.push_back(t);
  }

  // Four coupled recurrences: each stage is one serial server, a segment
  // enters the next stage when both it and the server are free. The pair
  // charge (detection over the gathered span plus the alignment tick) runs
  // concurrently per segment; render dispatch preserves birth order.
  Timestamp a = sc.pipeline_startup_ms, b = a, c = a, e = a;
  for (DurationMs d : out.pipeline_durations) {
    a += service_ms(sc.stt, d);
    b = std::max(b, a) + service_ms(sc.mt, d);
    c = std::max(c, b) + service_ms(sc.tts, d);
    Timestamp pair = c + service_ms(sc.facedetect, d + 2 * kGatherMargin) +
                     sc.align_charge_ms;
    e = std::max(e, pair) + service_ms(sc.lipsync, d);
    out.pipeline_completions.push_back(e);
  }

  if (!out.baseline_completions.empty())
    out.baseline_latency_ms = out.baseline_completions.back();
  if (!out.pipeline_completions.empty())
    out.pipeline_latency_ms = out.pipeline_completions.back();
  return out;
}

OlsFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("fit_scaling: size mismatch");
  if (x.size() < 3)
    throw std::invalid_argument("fit_scaling: need at least 3 points");
  const double n = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_scaling: degenerate x");
  OlsFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
    ss_tot += (y[i] - my) * (y[i] - my);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double efficiency(double latency_s, double peak_mem_gb) {
  if (!(latency_s > 0) || !(peak_mem_gb > 0))
    throw std::invalid_argument("efficiency: inputs must be positive");
  return 1.0 / (latency_s * peak_mem_gb);
}

std::vector<int> depth_series(const std::vector<SegmentOutcome>& segments,
                              DurationMs step_ms) {
  if (step_ms <= 0) throw std::invalid_argument("depth_series: bad step");
  Timestamp last = 0;
  for (const auto& o : segments) last = std::max(last, o.completion_ts);
  std::vector<int> out;
  for (Timestamp t = 0; t <= last; t += step_ms) {
    int depth = 0;
    for (const auto& o : segments)
      if (o.birth <= t && (o.completion_ts == 0 || o.completion_ts > t))
        depth += 1;
    out.push_back(depth);
  }
  return out;
}

namespace {

struct ClipAggregate {
  std::vector<double> latencies;
  std::size_t mem_hwm = 0;
  double depth_avg = 0;
};

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / double(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / double(v.size() - 1));
}

}  // namespace

RunReport run_scenario(const Scenario& sc) {
  RunReport rep;
  rep.scenario = sc.name;
  rep.seed = sc.seed;
  rep.repetitions = sc.repetitions;
  rep.jitter = sc.jitter;
  rep.has_baseline = sc.mode != RunMode::Pipeline;
  rep.has_pipeline = sc.mode != RunMode::Baseline;
  if (sc.repetitions < 1)
    throw std::invalid_argument("run_scenario: repetitions must be positive");

  const auto clips_ms = sc.clip_lengths_ms();
  std::vector<double> xs, yb, yp;
  for (std::size_t ci = 0; ci < clips_ms.size(); ++ci) {
    ClipAggregate base, pipe;
    for (int rep_i = 0; rep_i < sc.repetitions; ++rep_i) {
      std::uint64_t seed = run_seed_for(sc.seed, clips_ms[ci], rep_i);
      if (rep.has_baseline) {
        auto r = run_baseline_clip(sc, clips_ms[ci], seed);
        base.latencies.push_back(double(r.clip_latency_ms));
        base.mem_hwm = std::max(
            base.mem_hwm, r.queue_mem_hwm_bytes + r.buffer_mem_hwm_bytes);
        base.depth_avg = r.depth_time_avg;
      }
      if (rep.has_pipeline) {
        auto r = run_pipeline_clip(sc, clips_ms[ci], seed);
        pipe.latencies.push_back(double(r.clip_latency_ms));
        pipe.mem_hwm = std::max(
            pipe.mem_hwm, r.queue_mem_hwm_bytes + r.buffer_mem_hwm_bytes);
        pipe.depth_avg = r.depth_time_avg;
      }
    }
    double bmean = mean_of(base.latencies);
    double pmean = mean_of(pipe.latencies);
    double speedup =
        rep.has_baseline && rep.has_pipeline && pmean > 0 ? bmean / pmean : 0;
    auto make_row = [&](RunMode mode, const ClipAggregate& agg, double mean) {
      ReportRow row;
      row.clip_s = sc.clip_lengths_s[ci];
      row.mode = mode;
      row.mean_ms = mean;
      row.std_ms = sample_std(agg.latencies, mean);
      row.speedup = speedup;
      row.depth_avg = agg.depth_avg;
      row.mem_hwm_bytes = agg.mem_hwm;
      if (mean > 0 && agg.mem_hwm > 0)
        row.efficiency =
            efficiency(mean / 1000.0, double(agg.mem_hwm) / 1e9);
      rep.rows.push_back(row);
    };
    if (rep.has_baseline) make_row(RunMode::Baseline, base, bmean);
    if (rep.has_pipeline) make_row(RunMode::Pipeline, pipe, pmean);
    xs.push_back(sc.clip_lengths_s[ci]);
    yb.push_back(bmean / 1000.0);
    yp.push_back(pmean / 1000.0);
  }

  if (xs.size() >= 3) {
    if (rep.has_baseline) rep.baseline_fit = fit_scaling(xs, yb);
    if (rep.has_pipeline) rep.pipeline_fit = fit_scaling(xs, yp);
  }
  return rep;
}

std::string report_csv(const RunReport& r) {
  std::string out = "clip_s,mode,mean_ms,std_ms,speedup\n";
  char line[160];
  for (const auto& row : r.rows) {
    std::snprintf(line, sizeof line, "%g,%s,%.3f,%.3f,%.4f\n", row.clip_s,
                  run_mode_name(row.mode), row.mean_ms, row.std_ms,
                  row.speedup);
    out += line;
  }
  return out;
}

std::string report_json(const RunReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  j["seed"] = r.seed;
  j["repetitions"] = r.repetitions;
  j["jitter"] = r.jitter;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"clip_s", row.clip_s},
                         {"mode", run_mode_name(row.mode)},
                         {"mean_ms", row.mean_ms},
                         {"std_ms", row.std_ms},
                         {"speedup", row.speedup},
                         {"depth_avg", row.depth_avg},
                         {"mem_hwm_bytes", row.mem_hwm_bytes},
                         {"efficiency", row.efficiency}});
  }
  auto fit_json = [](const OlsFit& f) {
    return nlohmann::json{{"slope_s_per_s", f.slope},
                          {"intercept_s", f.intercept},
                          {"r2", f.r2}};
  };
  if (r.has_baseline) j["fit"]["baseline"] = fit_json(r.baseline_fit);
  if (r.has_pipeline) j["fit"]["pipeline"] = fit_json(r.pipeline_fit);
  return j.dump(2) + "\n";
}

std::string report_gnuplot(const RunReport& r) {
  std::string out = "# clip_s baseline_ms pipeline_ms speedup\n";
  std::map<double, std::pair<double, double>> by_clip;  // clip -> (b, p)
  std::map<double, double> speedup;
  for (const auto& row : r.rows) {
    auto& entry = by_clip[row.clip_s];
    if (row.mode == RunMode::Baseline) entry.first = row.mean_ms;
    if (row.mode == RunMode::Pipeline) entry.second = row.mean_ms;
    speedup[row.clip_s] = row.speedup;
  }
  char line[160];
  for (const auto& [clip, means] : by_clip) {
    auto cell = [](double v, char* buf, std::size_t cap) {
      if (v > 0)
        std::snprintf(buf, cap, "%.3f", v);
      else
        std::snprintf(buf, cap, "-");
      return buf;
    };
    char b[32], p[32], s[32];
    std::snprintf(line, sizeof line, "%g %s %s %s\n", clip,
                  cell(means.first, b, sizeof b),
                  cell(means.second, p, sizeof p),
                  cell(speedup[clip], s, sizeof s));
    out += line;
  }
  return out;
}

std::string report_table(const RunReport& r) {
  char line[200];
  std::snprintf(line, sizeof line,
                "scenario %s  seed %llu  reps %d  jitter %.1f%%\n",
                r.scenario.c_str(), (unsigned long long)r.seed, r.repetitions,
                r.jitter * 100.0);
  std::string out = line;
  out += "  clip_s        baseline_ms        pipeline_ms  speedup\n";
  std::map<double, std::array<double, 4>> by_clip;  // b_mean b_std p_mean p_std
  std::map<double, double> speedup;
  for (const auto& row : r.rows) {
    auto& e = by_clip[row.clip_s];
    if (row.mode == RunMode::Baseline) {
      e[0] = row.mean_ms;
      e[1] = row.std_ms;
    } else {
      e[2] = row.mean_ms;
      e[3] = row.std_ms;
    }
    speedup[row.clip_s] = row.speedup;
  }
  for (const auto& [clip, e] : by_clip) {
    auto cell = [](double mean, double std, char* buf, std::size_t cap) {
      if (mean > 0)
        std::snprintf(buf, cap, "%10.1f +-%6.1f", mean, std);
      else
        std::snprintf(buf, cap, "%19s", "-");
      return buf;
    };
    char b[40], p[40], s[16];
    if (speedup[clip] > 0)
      std::snprintf(s, sizeof s, "%6.2fx", speedup[clip]);
    else
      std::snprintf(s, sizeof s, "%7s", "-");
    std::snprintf(line, sizeof line, "  %6g  %s  %s  %s\n", clip,
                  cell(e[0], e[1], b, sizeof b), cell(e[2], e[3], p, sizeof p),
                  s);
    out += line;
  }
  auto fit_line = [&](const char* name, const OlsFit& f) {
    std::snprintf(line, sizeof line,
                  "  fit %s: %.4f s/s + %.4f s (r2 %.6f)\n", name, f.slope,
                  f.intercept, f.r2);
    out += line;
  };
  if (by_clip.size() >= 3) {
    if (r.has_baseline) fit_line("baseline", r.baseline_fit);
    if (r.has_pipeline) fit_line("pipeline", r.pipeline_fit);
  }
  return out;
}

}  // namespace lipstream

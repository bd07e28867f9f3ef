#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lipstream/config.hpp"
#include "lipstream/frame_ring.hpp"
#include "lipstream/log.hpp"
#include "lipstream/runner.hpp"
#include "lipstream/wav.hpp"

namespace {

using namespace lipstream;

constexpr const char* kVersion = "0.1.0";

// "synthetic:8s" / "synthetic:2500ms" -> clip length; anything else is a
// file path.
std::optional<DurationMs> parse_synthetic(const std::string& input) {
  const std::string prefix = "synthetic:";
  if (input.rfind(prefix, 0) != 0) return std::nullopt;
  std::string spec = input.substr(prefix.size());
  double scale = 0;
  if (spec.size() > 2 && spec.substr(spec.size() - 2) == "ms") {
    scale = 1.0;
    spec = spec.substr(0, spec.size() - 2);
  } else if (!spec.empty() && spec.back() == 's') {
    scale = 1000.0;
    spec = spec.substr(0, spec.size() - 1);
  }
  if (scale == 0 || spec.empty())
    throw std::invalid_argument("bad synthetic spec: " + input +
                                " (want synthetic:<N>s or synthetic:<N>ms)");
  std::size_t pos = 0;
  double value = std::stod(spec, &pos);
  if (pos != spec.size() || !(value > 0))
    throw std::invalid_argument("bad synthetic length: " + input);
  return DurationMs(llround(value * scale));
}

void apply_stage_overrides(const Config& cfg, const std::string& prefix,
                           StageProfile& p) {
  p.fixed_ms = cfg.get_int(prefix + ".fixed_ms", p.fixed_ms);
  p.per_sec_ms = cfg.get_double(prefix + ".per_sec_ms", p.per_sec_ms);
}

// Dotted-key overrides on top of a named scenario. Unset keys keep the
// scenario's calibrated values, so an empty config changes nothing.
void apply_config(Scenario& sc, const Config& cfg) {
  sc.jitter = cfg.get_double("jitter", sc.jitter);
  sc.repetitions = int(cfg.get_int("reps", sc.repetitions));
  sc.fps = cfg.get_double("fps", sc.fps);

  sc.segmenter.min_silence_ms =
      cfg.get_int("vad.silence_ms", sc.segmenter.min_silence_ms);
  sc.segmenter.vad.speech_threshold_db = cfg.get_double(
      "vad.threshold_db", sc.segmenter.vad.speech_threshold_db);
  sc.segmenter.min_segment_ms =
      cfg.get_int("segment.min_ms", sc.segmenter.min_segment_ms);
  sc.segmenter.max_segment_ms =
      cfg.get_int("segment.max_ms", sc.segmenter.max_segment_ms);

  sc.pattern.lead_silence_ms =
      cfg.get_int("pattern.lead_silence_ms", sc.pattern.lead_silence_ms);
  sc.pattern.tone_hz = cfg.get_double("pattern.tone_hz", sc.pattern.tone_hz);
  if (cfg.has("pattern.speech_ms") || cfg.has("pattern.pause_ms")) {
    BurstSpec b;
    b.speech_ms = cfg.get_int("pattern.speech_ms", b.speech_ms);
    b.pause_ms = cfg.get_int("pattern.pause_ms", b.pause_ms);
    sc.pattern.bursts = {b};
  }

  sc.baseline_startup_ms =
      cfg.get_int("baseline.startup_ms", sc.baseline_startup_ms);
  apply_stage_overrides(cfg, "baseline.stt", sc.baseline_stt);
  apply_stage_overrides(cfg, "baseline.mt", sc.baseline_mt);
  apply_stage_overrides(cfg, "baseline.tts", sc.baseline_tts);
  apply_stage_overrides(cfg, "baseline.lipsync", sc.baseline_lipsync);

  sc.pipeline_startup_ms =
      cfg.get_int("pipeline.startup_ms", sc.pipeline_startup_ms);
  apply_stage_overrides(cfg, "pipeline.stt", sc.stt);
  apply_stage_overrides(cfg, "pipeline.mt", sc.mt);
  apply_stage_overrides(cfg, "pipeline.tts", sc.tts);
  apply_stage_overrides(cfg, "pipeline.lipsync", sc.lipsync);
  apply_stage_overrides(cfg, "pipeline.facedetect", sc.facedetect);
  sc.align_charge_ms = cfg.get_int("pipeline.align_ms", sc.align_charge_ms);

  if (cfg.has("clips_s")) {
    sc.clip_lengths_s.clear();
    std::string list = cfg.get_str("clips_s", "");
    std::size_t start = 0;
    while (start <= list.size()) {
      std::size_t comma = list.find(',', start);
      std::string item = list.substr(
          start, comma == std::string::npos ? comma : comma - start);
      if (!item.empty()) sc.clip_lengths_s.push_back(std::stod(item));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (sc.clip_lengths_s.empty())
      throw std::invalid_argument("clips_s: empty list");
  }
}

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot create " + path.string());
  out << body;
}

void write_manifest(const std::filesystem::path& out_dir,
                    const std::string& command, const std::string& input,
                    const std::string& mode, const std::string& clock,
                    std::uint64_t seed, const Config& cfg) {
  nlohmann::json j;
  j["version"] = kVersion;
  j["command"] = command;
  j["input"] = input;
  j["mode"] = mode;
  j["clock"] = clock;
  j["seed"] = seed;
  char fp[32];
  std::snprintf(fp, sizeof fp, "%016llx",
                (unsigned long long)cfg.fingerprint());
  j["config_fingerprint"] = fp;
  write_file(out_dir / "manifest.json", j.dump(2) + "\n");
}

std::string metrics_csv(const ClipRunResult& r) {
  char line[128];
  std::string out = "metric,value\n";
  auto add_int = [&](const char* k, long long v) {
    std::snprintf(line, sizeof line, "%s,%lld\n", k, v);
    out += line;
  };
  auto add_dbl = [&](const char* k, double v) {
    std::snprintf(line, sizeof line, "%s,%.6f\n", k, v);
    out += line;
  };
  out += std::string("mode,") + run_mode_name(r.mode) + "\n";
  add_int("clip_ms", r.clip_ms);
  add_int("segments", (long long)r.segments.size());
  add_int("completed", r.completed);
  add_int("clip_latency_ms", r.clip_latency_ms);
  add_dbl("depth_avg", r.depth_time_avg);
  add_int("queue_mem_hwm_bytes", (long long)r.queue_mem_hwm_bytes);
  add_int("buffer_mem_hwm_bytes", (long long)r.buffer_mem_hwm_bytes);
  add_int("sync_failures", r.orch.sync_failures);
  add_int("gather_retries", r.orch.gather_retries);
  add_int("cap_drops", r.orch.cap_drops);
  add_int("resyncs", r.orch.resyncs);
  add_int("detector_calls", r.orch.detector_calls);
  add_int("max_abs_offset_ms", r.orch.max_abs_offset_ms);
  add_int("cuts_pause", r.segmenter.cuts_pause);
  add_int("cuts_forced", r.segmenter.cuts_forced);
  add_int("cuts_eos", r.segmenter.cuts_eos);
  add_int("scorer_calls", r.segmenter.scorer_calls);
  return out;
}

std::string segments_csv(const ClipRunResult& r) {
  std::string out =
      "index,uuid,begin_ms,end_ms,duration_ms,confidence,forced,birth_ms,"
      "completion_ms,latency_ms\n";
  char line[256];
  for (std::size_t i = 0; i < r.segments.size(); ++i) {
    const SegmentOutcome& o = r.segments[i];
    std::snprintf(line, sizeof line,
                  "%zu,%s,%lld,%lld,%lld,%.4f,%d,%lld,%lld,%lld\n", i,
                  o.uuid.to_string().c_str(), (long long)o.begin,
                  (long long)o.end, (long long)o.duration_ms, o.confidence,
                  o.forced ? 1 : 0, (long long)o.birth,
                  (long long)o.completion_ts, (long long)o.latency_ms);
    out += line;
  }
  return out;
}

std::string depth_csv(const ClipRunResult& r) {
  std::string out = "t_ms,depth\n";
  auto series = depth_series(r.segments);
  char line[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::snprintf(line, sizeof line, "%lld,%d\n", (long long)(i * 100),
                  series[i]);
    out += line;
  }
  return out;
}

struct CommonArgs {
  std::string input;
  std::string frames_path;
  std::string config_path;
  std::string mode = "pipeline";
  std::string clock = "virtual";
  std::string out_dir = "lipstream-out";
  std::uint64_t seed = 1337;
};

Config load_config(const std::string& path) {
  if (path.empty()) return Config{};
  return Config::from_file(path);
}

ClipInput load_input(const CommonArgs& args, const Scenario& sc) {
  if (auto clip_ms = parse_synthetic(args.input))
    return synthetic_clip(sc, *clip_ms);
  ClipInput in;
  in.audio = read_wav(args.input);
  in.clip_ms = in.audio.duration_ms();
  if (!args.frames_path.empty()) in.frames = read_frame_csv(args.frames_path);
  return in;
}

int cmd_run(const CommonArgs& args) {
  Config cfg = load_config(args.config_path);
  Scenario sc = paper_table3_scenario();
  apply_config(sc, cfg);
  sc.seed = args.seed;

  RunMode mode = parse_run_mode(args.mode);
  if (mode == RunMode::Both)
    throw std::invalid_argument("run takes --mode baseline or pipeline");
  MediaClock::Mode clock = args.clock == "real" ? MediaClock::Mode::Real
                                                : MediaClock::Mode::Virtual;

  ClipInput input = load_input(args, sc);
  std::uint64_t run_seed = run_seed_for(sc.seed, input.clip_ms, 0);
  ClipRunResult res =
      mode == RunMode::Baseline
          ? run_baseline_input(sc, input, run_seed, clock)
          : run_pipeline_input(sc, input, run_seed, clock);

  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_events_ndjson((out / "events.ndjson").string(), res.events);
  write_file(out / "metrics.csv", metrics_csv(res));
  write_file(out / "segments.csv", segments_csv(res));
  write_file(out / "depth.csv", depth_csv(res));
  write_manifest(out, "run", args.input, args.mode, args.clock, args.seed,
                 cfg);

  std::printf("%s clip %lld ms: %lld/%zu segments, latency %lld ms\n",
              run_mode_name(mode), (long long)res.clip_ms,
              (long long)res.completed, res.segments.size(),
              (long long)res.clip_latency_ms);
  std::printf("artifacts in %s\n", out.string().c_str());

  for (const auto& e : res.events)
    if (e.kind == EventKind::SyncFailure) return 2;
  return 0;
}

int cmd_bench(const CommonArgs& args, const std::string& scenario_name,
              bool seed_given) {
  Config cfg = load_config(args.config_path);
  Scenario sc = scenario_by_name(scenario_name);
  apply_config(sc, cfg);
  if (seed_given) sc.seed = args.seed;
  sc.mode = parse_run_mode(args.mode);

  RunReport report = run_scenario(sc);

  std::filesystem::path out(args.out_dir);
  std::filesystem::create_directories(out);
  write_file(out / "report.csv", report_csv(report));
  write_file(out / "report.json", report_json(report));
  write_file(out / "report.dat", report_gnuplot(report));
  write_manifest(out, "bench", scenario_name, args.mode, "virtual", sc.seed,
                 cfg);

  std::fputs(report_table(report).c_str(), stdout);
  std::printf("artifacts in %s\n", out.string().c_str());
  return 0;
}

RunReport report_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  RunReport r;
  r.scenario = j.at("scenario").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.repetitions = j.at("repetitions").get<int>();
  r.jitter = j.at("jitter").get<double>();
  for (const auto& row_j : j.at("rows")) {
    ReportRow row;
    row.clip_s = row_j.at("clip_s").get<double>();
    row.mode = parse_run_mode(row_j.at("mode").get<std::string>());
    row.mean_ms = row_j.at("mean_ms").get<double>();
    row.std_ms = row_j.at("std_ms").get<double>();
    row.speedup = row_j.at("speedup").get<double>();
    row.depth_avg = row_j.value("depth_avg", 0.0);
    row.mem_hwm_bytes = row_j.value("mem_hwm_bytes", std::size_t(0));
    row.efficiency = row_j.value("efficiency", 0.0);
    r.rows.push_back(row);
    if (row.mode == RunMode::Baseline) r.has_baseline = true;
    if (row.mode == RunMode::Pipeline) r.has_pipeline = true;
  }
  auto load_fit = [&](const char* key, OlsFit& fit) {
    if (!j.contains("fit") || !j["fit"].contains(key)) return;
    const auto& f = j["fit"][key];
    fit.slope = f.value("slope_s_per_s", 0.0);
    fit.intercept = f.value("intercept_s", 0.0);
    fit.r2 = f.value("r2", 1.0);
  };
  load_fit("baseline", r.baseline_fit);
  load_fit("pipeline", r.pipeline_fit);
  return r;
}

int cmd_report(const std::string& input, const std::string& out_dir) {
  std::string path = input;
  if (path.empty())
    path = (std::filesystem::path(out_dir) / "report.json").string();
  RunReport r = report_from_json(path);
  std::fputs(report_table(r).c_str(), stdout);
  return 0;
}

int cmd_segment(const CommonArgs& args, const std::string& seg_mode) {
  Config cfg = load_config(args.config_path);
  Scenario sc = paper_table3_scenario();
  apply_config(sc, cfg);

  ClipInput input = load_input(args, sc);
  SegmenterConfig seg_cfg = sc.segmenter;
  seg_cfg.mode = seg_mode == "baseline" ? SegmenterMode::Baseline
                                        : SegmenterMode::Semantic;
  Segmenter seg(seg_cfg);
  auto segments = seg.push(input.audio);
  auto tail = seg.finish();
  segments.insert(segments.end(), tail.begin(), tail.end());

  for (const auto& s : segments)
    std::printf("%lld %lld %lld %.4f %s\n", (long long)s.begin,
                (long long)s.end, (long long)s.duration_ms(), s.confidence,
                s.cause == CutCause::Forced ? "forced" : "-");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"streaming speech translation pipeline: run, bench, inspect"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string scenario_name = "paper-table3";
  std::string seg_mode = "semantic";
  std::string report_input;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    auto* in = cmd->add_option("--input", args.input,
                               "synthetic:<N>s, synthetic:<N>ms or WAV path");
    if (needs_input) in->required();
    cmd->add_option("--frames", args.frames_path,
                    "frame CSV for WAV input (frame_index,ts_ms,cx,cy,w,h,"
                    "mouth_motion)");
    cmd->add_option("--config", args.config_path,
                    "dotted-key config file (defaults reproduce the "
                    "calibrated setup)");
    cmd->add_option("--out", args.out_dir, "artifact directory");
    cmd->add_option("--seed", args.seed, "run seed")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* run = app.add_subcommand("run", "run one clip end to end");
  add_common(run, true);
  run->add_option("--mode", args.mode, "baseline | pipeline");
  run->add_option("--clock", args.clock, "virtual | real")
      ->check(CLI::IsMember({"virtual", "real"}));

  CLI::App* bench =
      app.add_subcommand("bench", "run a calibrated scenario and report");
  add_common(bench, false);
  bench->add_option("--scenario", scenario_name, "paper-table3 | linear-sweep");
  bench->add_option("--mode", args.mode, "baseline | pipeline | both");

  CLI::App* report =
      app.add_subcommand("report", "render a saved report.json");
  report->add_option("--input", report_input, "path to report.json");
  report->add_option("--out", args.out_dir,
                     "artifact directory holding report.json");

  CLI::App* segment =
      app.add_subcommand("segment", "print the segment table for an input");
  add_common(segment, true);
  segment->add_option("--mode", seg_mode, "semantic | baseline")
      ->check(CLI::IsMember({"semantic", "baseline"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(args);
    if (bench->parsed()) {
      if (bench->count("--mode") == 0) args.mode = "both";
      return cmd_bench(args, scenario_name, seed_given);
    }
    if (report->parsed()) return cmd_report(report_input, args.out_dir);
    if (segment->parsed()) return cmd_segment(args, seg_mode);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}

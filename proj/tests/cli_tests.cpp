// End-to-end checks of the lipstream binary: exit codes, artifacts and the
// printed tables, driven through a real subprocess.

#define DOCTEST_CONFIG_IMPLEMENT
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lipstream/frame_ring.hpp"
#include "lipstream/scenario.hpp"
#include "lipstream/synth.hpp"
#include "lipstream/wav.hpp"
#include "test_util.hpp"

namespace {

std::string g_bin;

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the binary with a shell-quoted argument line, capturing both streams.
CliResult run_cli(const std::string& args, const TempDir& tmp) {
  std::string out_path = tmp.file("cli-stdout.txt");
  std::string err_path = tmp.file("cli-stderr.txt");
  std::string cmd =
      "\"" + g_bin + "\" " + args + " >" + out_path + " 2>" + err_path;
  int raw = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp_text(out_path);
  r.err = slurp_text(err_path);
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

const char* kArtifacts[] = {"manifest.json", "metrics.csv", "segments.csv",
                            "depth.csv", "events.ndjson"};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run writes the full artifact set and reruns byte-identically") {
  TempDir tmp("cli-run");
  std::string a = tmp.file("a"), b = tmp.file("b");
  CliResult r1 = run_cli(
      "run --input synthetic:3s --mode pipeline --out " + a, tmp);
  REQUIRE(r1.code == 0);
  CHECK(contains(r1.out, "pipeline clip 3000 ms"));
  for (const char* name : kArtifacts)
    CHECK_MESSAGE(std::filesystem::exists(a + "/" + name), name);

  CliResult r2 = run_cli(
      "run --input synthetic:3s --mode pipeline --out " + b, tmp);
  REQUIRE(r2.code == 0);
  for (const char* name : kArtifacts)
    CHECK_MESSAGE(slurp_bytes(a + "/" + name) == slurp_bytes(b + "/" + name),
                  name);

  nlohmann::json manifest;
  std::ifstream(a + "/manifest.json") >> manifest;
  CHECK(manifest.at("command") == "run");
  CHECK(manifest.at("mode") == "pipeline");
  CHECK(manifest.at("seed") == 1337);
}

TEST_CASE("baseline mode runs and labels its metrics") {
  TempDir tmp("cli-base");
  std::string out = tmp.file("out");
  CliResult r = run_cli(
      "run --input synthetic:3s --mode baseline --out " + out, tmp);
  REQUIRE(r.code == 0);
  std::string metrics = slurp_text(out + "/metrics.csv");
  CHECK(contains(metrics, "mode,baseline"));
  CHECK(contains(metrics, "sync_failures,0"));
}

TEST_CASE("a wav with a frame track runs the pipeline cleanly") {
  using namespace lipstream;
  TempDir tmp("cli-wav");
  SpeechPattern pattern = paper_table3_scenario().pattern;
  write_wav(tmp.file("clip.wav"), render_pattern(pattern, 3000));
  write_frame_csv(tmp.file("frames.csv"),
                  render_pattern_frames(pattern, 3000));
  std::string out = tmp.file("out");
  CliResult r = run_cli("run --input " + tmp.file("clip.wav") + " --frames " +
                            tmp.file("frames.csv") + " --out " + out,
                        tmp);
  REQUIRE(r.code == 0);
  CHECK(contains(slurp_text(out + "/metrics.csv"), "sync_failures,0"));
}

TEST_CASE("a wav without frames fails sync and exits 2") {
  using namespace lipstream;
  TempDir tmp("cli-nofr");
  SpeechPattern pattern = paper_table3_scenario().pattern;
  write_wav(tmp.file("clip.wav"), render_pattern(pattern, 3000));
  std::string out = tmp.file("out");
  CliResult r = run_cli(
      "run --input " + tmp.file("clip.wav") + " --out " + out, tmp);
  CHECK(r.code == 2);
  CHECK(contains(slurp_text(out + "/events.ndjson"), "sync_failure"));
}

TEST_CASE("a truncated wav is rejected with a byte diagnostic") {
  using namespace lipstream;
  TempDir tmp("cli-trunc");
  write_wav(tmp.file("clip.wav"), render_pattern(SpeechPattern{}, 1000));
  auto bytes = slurp_bytes(tmp.file("clip.wav"));
  bytes.resize(bytes.size() / 2);
  std::ofstream(tmp.file("cut.wav"), std::ios::binary)
      .write(reinterpret_cast<const char*>(bytes.data()),
             std::streamsize(bytes.size()));
  CliResult r = run_cli(
      "run --input " + tmp.file("cut.wav") + " --out " + tmp.file("out"), tmp);
  CHECK(r.code == 1);
  CHECK(contains(r.err, "byte"));
}

TEST_CASE("argument errors exit 1 and help exits 0") {
  TempDir tmp("cli-args");
  CHECK(run_cli("run --input synthetic:1s --bogus-flag", tmp).code == 1);
  CHECK(run_cli("", tmp).code == 1);
  CHECK(run_cli("run --input synthetic:1s --mode both", tmp).code == 1);
  CHECK(run_cli("run --input synthetic:nope --out " + tmp.file("o"), tmp)
            .code == 1);
  CHECK(run_cli("--help", tmp).code == 0);
  CliResult help = run_cli("run --help", tmp);
  CHECK(help.code == 0);
  CHECK(contains(help.out, "--mode"));
}

TEST_CASE("segment prints the calibrated table for a synthetic clip") {
  TempDir tmp("cli-seg");
  CliResult r = run_cli("segment --input synthetic:8s", tmp);
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);
  const long long want[] = {2300, 2000, 2000, 1700};
  long long cursor = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    long long begin = 0, end = 0, dur = 0;
    REQUIRE(std::sscanf(lines[i].c_str(), "%lld %lld %lld", &begin, &end,
                        &dur) == 3);
    CHECK(begin == cursor);
    CHECK(dur == want[i]);
    cursor = end;
  }
  CHECK(cursor == 8000);
}

TEST_CASE("segment marks forced splits on unbroken speech") {
  TempDir tmp("cli-forced");
  std::ofstream(tmp.file("cont.cfg"))
      << "pattern.lead_silence_ms = 0\n"
      << "pattern.speech_ms = 12000\n"
      << "pattern.pause_ms = 0\n";
  CliResult r = run_cli(
      "segment --input synthetic:12s --config " + tmp.file("cont.cfg"), tmp);
  REQUIRE(r.code == 0);
  auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(contains(lines[0], "0 10000 10000"));
  CHECK(contains(lines[0], "forced"));
  CHECK(contains(lines[1], "10000 12000 2000"));
}

TEST_CASE("segment modes differ on short bursts") {
  TempDir tmp("cli-modes");
  std::ofstream(tmp.file("fix.cfg")) << "pattern.lead_silence_ms = 600\n"
                                     << "pattern.speech_ms = 800\n"
                                     << "pattern.pause_ms = 600\n";
  CliResult naive = run_cli("segment --input synthetic:5600ms --config " +
                                tmp.file("fix.cfg") + " --mode baseline",
                            tmp);
  CliResult smart = run_cli("segment --input synthetic:5600ms --config " +
                                tmp.file("fix.cfg") + " --mode semantic",
                            tmp);
  REQUIRE(naive.code == 0);
  REQUIRE(smart.code == 0);
  auto nl = lines_of(naive.out), sl = lines_of(smart.out);
  REQUIRE(nl.size() == 4);
  REQUIRE(sl.size() == 2);
  CHECK(contains(nl[0], "0 1700 1700"));
  CHECK(contains(sl[0], "0 3100 3100"));
}

TEST_CASE("segment emits nothing for silence") {
  using namespace lipstream;
  TempDir tmp("cli-sil");
  write_wav(tmp.file("sil.wav"), make_silence(2000));
  CliResult r = run_cli("segment --input " + tmp.file("sil.wav"), tmp);
  CHECK(r.code == 0);
  CHECK(lines_of(r.out).empty());
}

TEST_CASE("bench produces reports whose fits match the sweep design") {
  TempDir tmp("cli-bench");
  std::string out = tmp.file("out");
  CliResult r = run_cli("bench --scenario linear-sweep --out " + out, tmp);
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "linear-sweep"));
  CHECK(contains(r.out, "fit baseline"));

  std::string csv = slurp_text(out + "/report.csv");
  CHECK(lines_of(csv)[0] == "clip_s,mode,mean_ms,std_ms,speedup");
  CHECK(lines_of(csv).size() == 9);

  nlohmann::json j;
  std::ifstream(out + "/report.json") >> j;
  CHECK(std::abs(j["fit"]["baseline"]["slope_s_per_s"].get<double>() - 2.0) <
        1e-9);
  CHECK(std::abs(j["fit"]["pipeline"]["slope_s_per_s"].get<double>() - 0.9) <
        1e-9);
  CHECK(std::filesystem::exists(out + "/report.dat"));

  CliResult rep = run_cli("report --input " + out + "/report.json", tmp);
  CHECK(rep.code == 0);
  CHECK(contains(rep.out, "linear-sweep"));
  CHECK(run_cli("report --input " + tmp.file("missing.json"), tmp).code == 1);
}

TEST_CASE("the real clock runs a tiny profile to completion") {
  TempDir tmp("cli-real");
  std::ofstream(tmp.file("tiny.cfg")) << "jitter = 0\n"
                                      << "pipeline.stt.per_sec_ms = 5\n"
                                      << "pipeline.stt.fixed_ms = 1\n"
                                      << "pipeline.mt.per_sec_ms = 5\n"
                                      << "pipeline.mt.fixed_ms = 1\n"
                                      << "pipeline.tts.per_sec_ms = 5\n"
                                      << "pipeline.tts.fixed_ms = 1\n"
                                      << "pipeline.lipsync.per_sec_ms = 5\n"
                                      << "pipeline.lipsync.fixed_ms = 1\n"
                                      << "pipeline.facedetect.per_sec_ms = 2\n";
  std::string out = tmp.file("out");
  CliResult r = run_cli("run --input synthetic:2s --clock real --config " +
                            tmp.file("tiny.cfg") + " --out " + out,
                        tmp);
  REQUIRE(r.code == 0);
  std::string metrics = slurp_text(out + "/metrics.csv");
  CHECK(contains(metrics, "sync_failures,0"));
  CHECK(contains(metrics, "completed,1"));
}

TEST_CASE("a malformed config is refused") {
  TempDir tmp("cli-cfg");
  std::ofstream(tmp.file("bad.cfg")) << "this line has no equals sign\n";
  CliResult r = run_cli("run --input synthetic:1s --config " +
                            tmp.file("bad.cfg") + " --out " + tmp.file("o"),
                        tmp);
  CHECK(r.code == 1);
  CHECK(contains(r.err, "config"));
}

}  // TEST_SUITE("cli")

int main(int argc, char** argv) {
  std::vector<const char*> rest;
  for (int i = 0; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg.rfind("--bin=", 0) == 0)
      g_bin = arg.substr(6);
    else
      rest.push_back(argv[i]);
  }
  if (g_bin.empty()) {
    std::fprintf(stderr, "usage: cli_tests --bin=<lipstream binary>\n");
    return 1;
  }
  doctest::Context ctx;
  ctx.applyCommandLine(int(rest.size()), rest.data());
  return ctx.run();
}

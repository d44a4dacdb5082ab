// Copyright 2026 The asrkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "asrkit/asrkit.hpp"
#include "cli.hpp"
#include "fixtures.hpp"
#include "json.hpp"

namespace asrkit {
namespace {

using nlohmann::json;
using testing::TempDir;

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path &p, const std::string &text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<json> jsonl(const std::string &text) {
  std::vector<json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

void write_model(const std::filesystem::path &p, const ToyTransducerModel &m) {
  const auto bytes = serialize_model(m);
  write_file_atomic(p, std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
}

void expect_header(const json &j, const std::string &subcommand) {
  EXPECT_EQ(j.at("schema_version"), 1);
  const auto &p = j.at("provenance");
  EXPECT_EQ(p.at("tool"), "asrkit");
  EXPECT_EQ(p.at("subcommand"), subcommand);
  EXPECT_EQ(p.at("config_hash").get<std::string>().size(), 16u);
}

TEST(Cli, WerIdenticalInputsIsZero) {
  TempDir dir;
  spit(dir / "ref.jsonl", R"({"audio_path":"a.wav","text":"hello world","set":"s1"}
{"audio_path":"b.wav","text":"good morning","set":"s2"}
)");
  const auto r = run_cli({"wer", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "ref.jsonl").string(),
                          "--per-file", (dir / "pf.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  expect_header(doc, "wer");
  EXPECT_EQ(doc["corpus"]["wer"], 0.0);
  EXPECT_EQ(doc["macro_average_wer"], 0.0);
  const std::string csv = slurp(dir / "pf.csv");
  EXPECT_EQ(csv.rfind("# {", 0), 0u);
  EXPECT_NE(csv.find("a.wav,s1,2,0,0,0,0"), std::string::npos);
}

TEST(Cli, WerCountsAndMissingHypothesis) {
  TempDir dir;
  spit(dir / "ref.jsonl", R"({"id":"x","text":"a b c d"}
{"id":"y","text":"e f"}
)");
  spit(dir / "hyp.jsonl", R"({"id":"x","text":"a B, c"}
)");
  const auto r = run_cli({"wer", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "hyp.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["corpus"]["deletions"], 3);
  EXPECT_DOUBLE_EQ(doc["corpus"]["wer"].get<double>(), 0.5);
  EXPECT_NE(r.err.find("no hypothesis for y"), std::string::npos);
}

TEST(Cli, ExitCodesAndNoPartialOutput) {
  TempDir dir;
  spit(dir / "ref.jsonl", R"({"id":"x","text":"a"})""\n");
  const auto out = dir / "summary.json";
  const auto bogus = run_cli({"wer", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "ref.jsonl").string(),
                              "--summary", out.string(), "--bogus"});
  EXPECT_EQ(bogus.code, 1);
  EXPECT_FALSE(std::filesystem::exists(out));
  EXPECT_EQ(run_cli({}).code, 1);
  EXPECT_EQ(run_cli({"wer", "--ref", (dir / "ref.jsonl").string()}).code, 1);
  EXPECT_EQ(run_cli({"wer", "--ref", (dir / "nope.jsonl").string(), "--hyp", (dir / "ref.jsonl").string()}).code, 1);
  EXPECT_EQ(run_cli({"halluc", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "ref.jsonl").string(), "--n",
                     "0"})
                .code,
            1);

  spit(dir / "bad.bin", "junk");
  spit(dir / "f.bin", "");
  const auto runtime = run_cli({"decode-sim", "--model", (dir / "bad.bin").string(), "--frames",
                                (dir / "f.bin").string(), "--out", (dir / "o.jsonl").string()});
  EXPECT_EQ(runtime.code, 2);
  EXPECT_FALSE(std::filesystem::exists(dir / "o.jsonl"));
  EXPECT_FALSE(runtime.err.empty());
}

TEST(Cli, HallucAndAmbient) {
  TempDir dir;
  spit(dir / "ref.jsonl", R"({"id":"x","text":"a b","duration_s":900})""\n");
  spit(dir / "hyp.jsonl", R"({"id":"x","text":"a b c d e"})""\n");
  const auto r = run_cli({"halluc", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "hyp.jsonl").string(),
                          "--n", "1..4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  expect_header(doc, "halluc");
  ASSERT_EQ(doc["rates"].size(), 4u);
  EXPECT_DOUBLE_EQ(doc["rates"][2]["fr_per_hour"].get<double>(), 4.0);
  EXPECT_DOUBLE_EQ(doc["rates"][3]["fr_per_hour"].get<double>(), 0.0);

  spit(dir / "amb.jsonl", R"({"id":"1","text":""}
{"id":"2","text":"thank you for watching"}
{"id":"3","text":" "}
{"id":"4","text":"you"}
)");
  const auto a = run_cli({"ambient", "--hyp", (dir / "amb.jsonl").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  const auto amb = json::parse(a.out);
  EXPECT_DOUBLE_EQ(amb["non_blank_rate"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(amb["frac_ge_10_chars"].get<double>(), 0.25);
}

TEST(Cli, TsEvalReportsBias) {
  TempDir dir;
  spit(dir / "ref.jsonl",
       R"({"id":"x","words":[{"text":"a","start_s":1.0},{"text":"b","start_s":2.0},{"text":"c","start_s":3.0}]})"
       "\n");
  spit(dir / "hyp.jsonl",
       R"({"id":"x","words":[{"text":"a","start_s":1.1},{"text":"b","start_s":2.1},{"text":"c","start_s":3.1}]})"
       "\n");
  const auto r = run_cli({"ts-eval", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "hyp.jsonl").string(),
                          "--tolerances", "0.05,0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.out.rfind("# ", 0), 0u);
  const auto prov = json::parse(r.out.substr(2, r.out.find('\n') - 2));
  EXPECT_NEAR(prov["median_bias_s"].get<double>(), 0.1, 1e-9);
  EXPECT_NE(r.out.find("0.05,0\n"), std::string::npos);
  EXPECT_NE(r.out.find("0.2,1\n"), std::string::npos);
  EXPECT_EQ(run_cli({"ts-eval", "--ref", (dir / "ref.jsonl").string(), "--hyp", (dir / "hyp.jsonl").string(),
                     "--tolerances", "0.2,0.1"})
                .code,
            1);
}

TEST(Cli, ChunkLongTone) {
  TempDir dir;
  write_wav(synth_audio(std::vector{SynthSegment::tone(440.0, 90.0, 0.5)}, 8000), dir / "long.wav");
  const auto r = run_cli({"chunk", "--in", (dir / "long.wav").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = jsonl(r.out);
  ASSERT_EQ(lines.size(), 4u);
  expect_header(lines[0], "chunk");
  EXPECT_DOUBLE_EQ(lines[1]["end_s"].get<double>(), 32.0);
  EXPECT_DOUBLE_EQ(lines[3]["end_s"].get<double>(), 90.0);
}

TEST(Cli, FilterModes) {
  TempDir dir;
  write_wav(synth_audio(std::vector{SynthSegment::tone(300.0, 10.0, 0.5)}, 8000), dir / "ok.wav");
  write_wav(synth_audio(std::vector{SynthSegment::tone(300.0, 4.0, 0.5)}, 8000), dir / "short.wav");
  write_wav(synth_audio(std::vector{SynthSegment::tone(300.0, 2.0, 0.5), SynthSegment::silence(10.0)}, 8000),
            dir / "quiet.wav");
  spit(dir / "m.jsonl", R"({"audio_path":"ok.wav"}
{"audio_path":"short.wav"}
{"audio_path":"quiet.wav"}
)");
  const auto r = run_cli({"filter", "--manifest", (dir / "m.jsonl").string(), "--mode", "unsupervised", "--out",
                          (dir / "kept.jsonl").string(), "--rejected", (dir / "rej.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kept = jsonl(slurp(dir / "kept.jsonl"));
  const auto rej = jsonl(slurp(dir / "rej.jsonl"));
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[1]["audio_path"], "ok.wav");
  ASSERT_EQ(rej.size(), 3u);
  EXPECT_EQ(rej[1]["reason"], "too_short");
  EXPECT_EQ(rej[2]["reason"], "low_speech_ratio");

  spit(dir / "p.jsonl", R"({"id":"1","hyp_a":"a b c d e","hyp_b":"a b c d x"}
{"id":"2","hyp_a":"a b c d e","hyp_b":"a b c x y"}
)");
  const auto p = run_cli({"filter", "--manifest", (dir / "p.jsonl").string(), "--mode", "pseudo", "--out",
                          (dir / "pk.jsonl").string(), "--rejected", (dir / "pr.jsonl").string()});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_EQ(jsonl(slurp(dir / "pk.jsonl"))[1]["id"], "1");
  EXPECT_EQ(jsonl(slurp(dir / "pr.jsonl"))[1]["reason"], "pseudo_label_disagreement");
  EXPECT_EQ(run_cli({"filter", "--manifest", (dir / "p.jsonl").string(), "--mode", "other", "--out",
                     (dir / "x.jsonl").string()})
                .code,
            1);
}

TEST(Cli, DecodeSimMatchesLibrary) {
  TempDir dir;
  std::mt19937_64 rng(3);
  auto model = random_model(5, 4, 9, rng, 2.0);
  write_model(dir / "m.bin", model);
  const auto feats = encode_feature_matrix(model.encoder_out);
  write_file_atomic(dir / "f.bin", std::string_view(reinterpret_cast<const char *>(feats.data()), feats.size()));
  const auto r = run_cli({"decode-sim", "--model", (dir / "m.bin").string(), "--frames", (dir / "f.bin").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = jsonl(r.out);
  ASSERT_EQ(lines.size(), 2u);
  model.encoder_out = decode_feature_matrix(feats);
  EXPECT_EQ(lines[1]["tokens"].get<std::vector<int>>(), greedy_decode(model).tokens);
}

TEST(Cli, RnntCheckSmall) {
  const auto r = run_cli({"rnnt-check", "--seed", "7", "--trials", "10", "--enum-trials", "3", "--grad-trials", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_TRUE(doc["passed"].get<bool>());
  EXPECT_EQ(doc["provenance"]["seed"], 7);
}

TEST(Cli, BestrqTargetsDeterministic) {
  TempDir dir;
  std::mt19937_64 rng(4);
  Matrix feats(400, 6);
  std::normal_distribution<double> g;
  for (auto &x : feats.data()) x = g(rng);
  const auto bytes = encode_feature_matrix(feats);
  write_file_atomic(dir / "f.bin", std::string_view(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
  auto go = [&](const std::string &seed, const std::string &name) {
    return run_cli({"bestrq-targets", "--features", (dir / "f.bin").string(), "--seed", seed, "--p-mask", "0.02",
                    "--heads", "2", "--codebook-size", "64", "--out", (dir / name).string(), "--masked-out",
                    (dir / (name + ".masked")).string()});
  };
  ASSERT_EQ(go("5", "a.bin").code, 0);
  ASSERT_EQ(go("5", "b.bin").code, 0);
  ASSERT_EQ(go("6", "c.bin").code, 0);
  EXPECT_EQ(slurp(dir / "a.bin"), slurp(dir / "b.bin"));
  EXPECT_EQ(slurp(dir / "a.bin.masked"), slurp(dir / "b.bin.masked"));
  EXPECT_EQ(slurp(dir / "a.bin.provenance.json"), slurp(dir / "b.bin.provenance.json"));
  EXPECT_NE(slurp(dir / "a.bin"), slurp(dir / "c.bin"));

  const std::string t = slurp(dir / "a.bin");
  std::int32_t hdr[3];
  std::memcpy(hdr, t.data(), 12);
  EXPECT_EQ(hdr[0], 2);
  EXPECT_EQ(hdr[2], 64);
  EXPECT_EQ(t.size(), 12u + 4u * static_cast<std::size_t>(hdr[1]) * 3u);
  EXPECT_LE(hdr[1], 8 * 10);
  const auto side = json::parse(slurp(dir / "a.bin.provenance.json"));
  expect_header(side, "bestrq-targets");
  EXPECT_EQ(side["starts"].size(), 8u);
}

TEST(Cli, CsBuildWritesAudioAndManifest) {
  TempDir dir;
  std::filesystem::create_directories(dir / "en");
  std::filesystem::create_directories(dir / "es");
  std::string a, b;
  for (int i = 0; i < 3; ++i) {
    write_wav(synth_audio(std::vector{SynthSegment::tone(300.0 + 50 * i, 12.0, 0.3)}, 8000),
              dir / "en" / ("a" + std::to_string(i) + ".wav"));
    write_wav(synth_audio(std::vector{SynthSegment::tone(700.0 + 50 * i, 9.0, 0.3)}, 8000),
              dir / "es" / ("b" + std::to_string(i) + ".wav"));
    a += R"({"audio_path":"a)" + std::to_string(i) + R"(.wav","text":"one","duration_s":12,"language":"en"})" "\n";
    b += R"({"audio_path":"b)" + std::to_string(i) + R"(.wav","text":"dos","duration_s":9,"language":"es"})" "\n";
  }
  spit(dir / "en" / "m.jsonl", a);
  spit(dir / "es" / "m.jsonl", b);
  auto go = [&](const std::string &out) {
    return run_cli({"cs-build", "--pool-a", (dir / "en" / "m.jsonl").string(), "--pool-b",
                    (dir / "es" / "m.jsonl").string(), "--count", "3", "--seed", "11", "--out-dir",
                    (dir / out).string()});
  };
  ASSERT_EQ(go("o1").code, 0);
  ASSERT_EQ(go("o2").code, 0);
  const std::string m1 = slurp(dir / "o1" / "manifest.jsonl");
  const auto lines = jsonl(m1);
  ASSERT_EQ(lines.size(), 4u);
  expect_header(lines[0], "cs-build");
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(lines[i]["language"], "en-es");
    const auto wav = read_wav(dir / "o1" / lines[i]["audio_path"].get<std::string>());
    EXPECT_NEAR(wav.duration_s(), lines[i]["total_s"].get<double>(), 1e-9);
    EXPECT_GT(wav.duration_s(), lines[i]["target_s"].get<double>());
    EXPECT_EQ(slurp(dir / "o1" / lines[i]["audio_path"].get<std::string>()),
              slurp(dir / "o2" / lines[i]["audio_path"].get<std::string>()));
  }
}

TEST(Cli, RtfAndToyModel) {
  TempDir dir;
  write_wav(synth_audio(std::vector{SynthSegment::tone(300.0, 5.0, 0.5)}, 8000), dir / "x.wav");
  spit(dir / "m.jsonl", R"({"audio_path":"x.wav","duration_s":5,"language":"en"})""\n");
  const auto r = run_cli({"rtf", "--manifest", (dir / "m.jsonl").string(), "--seed", "1", "--stages",
                          "read,chunk,decode"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = json::parse(r.out);
  EXPECT_EQ(doc["stages"].size(), 3u);
  EXPECT_DOUBLE_EQ(doc["audio_s_total"].get<double>(), 5.0);
  EXPECT_GE(doc["rtf"].get<double>(), 0.0);
  EXPECT_EQ(run_cli({"rtf", "--manifest", (dir / "m.jsonl").string()}).code, 1);
  EXPECT_EQ(run_cli({"rtf", "--manifest", (dir / "m.jsonl").string(), "--seed", "1", "--stages", "fly"}).code, 1);

  ASSERT_EQ(run_cli({"toy-model", "--preset", "onset", "--out", (dir / "onset.bin").string()}).code, 0);
  const auto onset = deserialize_model(read_file_bytes(dir / "onset.bin"));
  EXPECT_EQ(onset.all_values(), testing::onset_model().all_values());
  ASSERT_EQ(run_cli({"toy-model", "--seed", "3", "--vocab", "6", "--dim", "3", "--out", (dir / "r.bin").string()})
                .code,
            0);
  EXPECT_EQ(deserialize_model(read_file_bytes(dir / "r.bin")).vocab_size, 6u);
  EXPECT_EQ(run_cli({"toy-model", "--out", (dir / "r2.bin").string()}).code, 1);
}

class CliPipeline : public ::testing::Test {
 protected:
  void SetUp() override {
    write_model(dir_ / "onset.bin", testing::onset_model());
    std::mt19937_64 rng(5);
    write_model(dir_ / "random.bin", random_model(6, 3, 1, rng, 2.0));
  }
  CliResult pipeline(const std::string &wav, const std::string &model, const std::string &out = "") {
    std::vector<std::string> args = {"pipeline", "--in", (dir_ / wav).string(), "--model", (dir_ / model).string()};
    if (!out.empty()) args.insert(args.end(), {"--out", (dir_ / out).string()});
    return run_cli(args);
  }
  TempDir dir_;
};

TEST_F(CliPipeline, MonotoneTimestampsAndDeterminism) {
  std::mt19937_64 rng(6);
  const auto f = testing::random_long_form(rng);
  write_wav(f.audio, dir_ / "long.wav");
  ASSERT_EQ(pipeline("long.wav", "random.bin", "a.jsonl").code, 0);
  ASSERT_EQ(pipeline("long.wav", "random.bin", "b.jsonl").code, 0);
  EXPECT_EQ(slurp(dir_ / "a.jsonl"), slurp(dir_ / "b.jsonl"));
  const auto lines = jsonl(slurp(dir_ / "a.jsonl"));
  ASSERT_EQ(lines.size(), 2u);
  expect_header(lines[0], "pipeline");
  double last = 0.0;
  for (const auto &w : lines[1]["words"]) {
    EXPECT_GE(w["start_s"].get<double>(), last);
    last = w["start_s"].get<double>();
  }
  EXPECT_GE(lines[1]["chunks"].size(), 2u);
}

TEST_F(CliPipeline, SilentAudioGivesEmptyTranscript) {
  write_wav(synth_audio(std::vector{SynthSegment::silence(40.0)}, 8000), dir_ / "silent.wav");
  const auto r = pipeline("silent.wav", "onset.bin");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto lines = jsonl(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1]["text"], "");
  EXPECT_TRUE(lines[1]["words"].empty());
}

TEST_F(CliPipeline, SingleChunkEqualsDirectDecode) {
  const auto audio = synth_audio(std::vector{SynthSegment::silence(1.0), SynthSegment::noise(0.5, 1, 2.0),
                                             SynthSegment::silence(1.0), SynthSegment::noise(0.5, 2, 2.0)},
                                 8000);
  write_wav(audio, dir_ / "short.wav");
  const auto r = pipeline("short.wav", "onset.bin");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rec = jsonl(r.out)[1];
  ASSERT_EQ(rec["chunks"].size(), 1u);
  auto m = testing::onset_model();
  m.encoder_out = frame_features(read_wav(dir_ / "short.wav").samples, 8000, 0.04, 3);
  const auto d = greedy_decode(m);
  ASSERT_EQ(rec["words"].size(), d.tokens.size());
  ASSERT_EQ(d.tokens.size(), 10u);
  for (std::size_t i = 0; i < d.tokens.size(); ++i)
    EXPECT_NEAR(rec["words"][i]["start_s"].get<double>(), std::max(0.0, d.timestamps_s[i] - 0.065), 1e-12);
}

TEST(Cli, ConfigHashIgnoresOutputPaths) {
  TempDir dir;
  spit(dir / "r.jsonl", R"({"id":"x","text":"a","duration_s":10})""\n");
  const std::string ref = (dir / "r.jsonl").string();
  ASSERT_EQ(run_cli({"halluc", "--ref", ref, "--hyp", ref, "--out", (dir / "1.json").string()}).code, 0);
  ASSERT_EQ(run_cli({"halluc", "--ref", ref, "--hyp", ref, "--out", (dir / "2.json").string()}).code, 0);
  ASSERT_EQ(run_cli({"halluc", "--ref", ref, "--hyp", ref, "--n", "3", "--out", (dir / "3.json").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "1.json"), slurp(dir / "2.json"));
  const auto h1 = json::parse(slurp(dir / "1.json"))["provenance"]["config_hash"];
  const auto h3 = json::parse(slurp(dir / "3.json"))["provenance"]["config_hash"];
  EXPECT_NE(h1, h3);
}

}  // namespace
}  // namespace asrkit

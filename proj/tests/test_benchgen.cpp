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

#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "asrkit/benchgen.hpp"
#include "fixtures.hpp"

namespace asrkit {
namespace {

using testing::uniform_pool;
using testing::varied_pool;

std::size_t word_count(const std::string &s) {
  std::istringstream in(s);
  std::size_t n = 0;
  for (std::string w; in >> w;) ++n;
  return n;
}

void check_sample(const CsSample &s, const CsPool &a, const CsPool &b) {
  ASSERT_FALSE(s.parts.empty());
  EXPECT_GE(s.target_s, 30.0);
  EXPECT_LE(s.target_s, 180.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.parts.size(); ++i) {
    sum += s.parts[i].entry.duration_s;
    if (i > 0) EXPECT_NE(s.parts[i].language, s.parts[i - 1].language);
    const CsPool &pool = s.parts[i].language == a.language ? a : b;
    EXPECT_NE(std::find(pool.entries.begin(), pool.entries.end(), s.parts[i].entry), pool.entries.end());
  }
  EXPECT_NEAR(s.total_s, sum, 1e-9);
  EXPECT_GT(s.total_s, s.target_s);
  EXPECT_LE(s.total_s - s.parts.back().entry.duration_s, s.target_s);
}

TEST(CsBuild, SinglePartWhenFileExceedsTarget) {
  const auto a = uniform_pool("en", 1, 200.0), b = uniform_pool("es", 1, 200.0);
  for (const auto &s : build_cs_set(a, b, 50, 1)) {
    EXPECT_EQ(s.parts.size(), 1u);
    EXPECT_EQ(s.total_s, 200.0);
  }
}

TEST(CsBuild, UniformTenSecondParts) {
  const auto a = uniform_pool("en", 5, 10.0), b = uniform_pool("de", 5, 10.0);
  for (const auto &s : build_cs_set(a, b, 300, 2)) {
    check_sample(s, a, b);
    EXPECT_EQ(s.parts.size(), static_cast<std::size_t>(std::floor(s.target_s / 10.0)) + 1);
    if (s.target_s > 30.0 && s.target_s < 40.0) EXPECT_EQ(s.parts.size(), 4u);
  }
}

TEST(CsBuild, InvariantsOnVariedPools) {
  std::mt19937_64 rng(3);
  const auto a = varied_pool("en", 40, rng), b = varied_pool("fr", 40, rng);
  const auto set = build_cs_set(a, b, 1000, 4);
  for (const auto &s : set) {
    check_sample(s, a, b);
    EXPECT_GE(s.parts.size(), 2u);
    EXPECT_LE(s.parts.size(), 61u);
    std::size_t words = 0;
    for (const auto &p : s.parts) words += word_count(p.entry.transcript);
    EXPECT_EQ(word_count(s.transcript()), words);
  }
}

TEST(CsBuild, LongUtterancePartCounts) {
  // Utterance lengths between 10 and 60 s.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dur(10.0, 60.0);
  CsPool a{"en", {}}, b{"ja", {}};
  for (int i = 0; i < 100; ++i) {
    a.entries.push_back({"a" + std::to_string(i), "x", dur(rng)});
    b.entries.push_back({"b" + std::to_string(i), "y", dur(rng)});
  }
  for (const auto &s : build_cs_set(a, b, 500, 6)) {
    EXPECT_GE(s.parts.size(), 1u);
    EXPECT_LE(s.parts.size(), 19u);
  }
}

TEST(CsBuild, CountOneDeterminismAndTargetMean) {
  const auto a = uniform_pool("en", 3, 7.0), b = uniform_pool("es", 3, 9.0);
  EXPECT_EQ(build_cs_set(a, b, 1, 9).size(), 1u);
  EXPECT_EQ(build_cs_set(a, b, 250, 42), build_cs_set(a, b, 250, 42));
  EXPECT_NE(build_cs_set(a, b, 20, 42), build_cs_set(a, b, 20, 43));
  const auto set = build_cs_set(a, b, 250, 42);
  double mean = 0.0;
  for (const auto &s : set) mean += s.target_s / 250.0;
  EXPECT_GE(mean, 95.0);
  EXPECT_LE(mean, 115.0);
  // A longer set shares its prefix.
  const auto longer = build_cs_set(a, b, 260, 42);
  for (std::size_t i = 0; i < 250; ++i) EXPECT_EQ(longer[i], set[i]);
}

TEST(CsBuild, Errors) {
  const auto ok = uniform_pool("en", 2, 5.0);
  EXPECT_THROW(build_cs_set(ok, CsPool{"es", {}}, 1, 0), Error);
  auto zero = uniform_pool("es", 2, 5.0);
  zero.entries[1].duration_s = 0.0;
  EXPECT_THROW(build_cs_set(ok, zero, 1, 0), Error);
}

TEST(CsBuild, JsonLayout) {
  const auto a = uniform_pool("en", 2, 20.0), b = uniform_pool("es", 2, 20.0);
  const auto s = build_cs_set(a, b, 1, 7)[0];
  const auto j = cs_sample_to_json(s);
  EXPECT_EQ(j["parts"].size(), s.parts.size());
  EXPECT_EQ(j["text"], s.transcript());
  double offset = 0.0;
  for (const auto &p : j["parts"]) {
    EXPECT_DOUBLE_EQ(p["start_s"].get<double>(), offset);
    offset += p["duration_s"].get<double>();
  }
  EXPECT_DOUBLE_EQ(j["total_s"].get<double>(), offset);
}

TEST(Concat, Fixtures) {
  CsSample s;
  s.parts = {{"en", {"one", "a", 1.0}}, {"es", {"two", "b", 1.0}}};
  auto reader = [](const std::string &path) {
    return synth_audio({SynthSegment::tone(path == "one" ? 300.0 : 500.0, 1.0)}, 16000);
  };
  const auto c = concat_sample_audio(s, reader);
  EXPECT_EQ(c.audio.samples.size(), 32000u);
  EXPECT_EQ(c.part_offsets, (std::vector<std::size_t>{0, 16000}));
  const auto second = reader("two");
  EXPECT_TRUE(std::equal(second.samples.begin(), second.samples.end(), c.audio.samples.begin() + 16000));

  auto mixed = [](const std::string &path) {
    return synth_audio({SynthSegment::silence(1.0)}, path == "one" ? 16000 : 8000);
  };
  try {
    concat_sample_audio(s, mixed);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.code(), Errc::SampleRateMismatch);
  }
}

TEST(Rtf, Arithmetic) {
  EXPECT_DOUBLE_EQ(rtf(30.0, 600.0), 0.05);
  EXPECT_NEAR(rtf(3.2e-3, 1.0) + rtf(2.5e-3, 1.0), 5.7e-3, 1e-15);
  EXPECT_EQ(rtf(0.0, 10.0), 0.0);
  EXPECT_THROW(rtf(1.0, 0.0), Error);
  EXPECT_THROW(rtf(-1.0, 1.0), Error);
}

std::vector<ManifestEntry> one_second_manifest(std::size_t n) {
  std::vector<ManifestEntry> m;
  for (std::size_t i = 0; i < n; ++i) m.push_back({"f" + std::to_string(i) + ".wav", "", 1.0, "en"});
  return m;
}

TEST(Rtf, Workloads) {
  const auto manifest = one_second_manifest(5);
  const std::vector<RtfStage> noop = {{"noop", [](const ManifestEntry &) {}}};
  EXPECT_LT(rtf_bench(noop, manifest).rtf, 1e-3);

  const std::vector<RtfStage> sleepy = {
      {"sleep", [](const ManifestEntry &) { std::this_thread::sleep_for(std::chrono::milliseconds(10)); }}};
  const auto r = rtf_bench(sleepy, manifest);
  EXPECT_GE(r.rtf, 0.009);
  EXPECT_LE(r.rtf, 0.05);
  EXPECT_DOUBLE_EQ(r.audio_s_total, 5.0);

  const std::vector<RtfStage> two = {
      {"a", [](const ManifestEntry &) { std::this_thread::sleep_for(std::chrono::milliseconds(4)); }},
      {"b", [](const ManifestEntry &) { std::this_thread::sleep_for(std::chrono::milliseconds(2)); }}};
  const auto t = rtf_bench(two, manifest);
  ASSERT_EQ(t.stages.size(), 2u);
  EXPECT_LE(std::abs(t.stages[0].rtf + t.stages[1].rtf - t.rtf), 0.02 * t.rtf);
  EXPECT_GT(t.stages[0].wall_s, t.stages[1].wall_s);
}

TEST(Rtf, FailuresCarryPartialReport) {
  const auto manifest = one_second_manifest(3);
  int calls = 0;
  const std::vector<RtfStage> flaky = {{"flaky", [&](const ManifestEntry &) {
                                          if (++calls == 2) throw std::runtime_error("boom");
                                        }}};
  try {
    rtf_bench(flaky, manifest);
    FAIL();
  } catch (const WorkloadError &e) {
    EXPECT_EQ(e.code(), Errc::WorkloadFailure);
    EXPECT_EQ(e.partial().stages.size(), 1u);
    EXPECT_DOUBLE_EQ(e.partial().audio_s_total, 3.0);
  }
  EXPECT_THROW(rtf_bench(flaky, std::vector<ManifestEntry>{}), Error);
}

}  // namespace
}  // namespace asrkit

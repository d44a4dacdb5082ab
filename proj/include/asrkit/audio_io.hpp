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

// Minimal PCM16 WAV reader/writer, test-signal synthesis and JSONL manifests.

#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "asrkit/error.hpp"
#include "asrkit/io_util.hpp"
#include "json.hpp"

namespace asrkit {

/// Mono audio. Samples are kept in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 16000;

  double duration_s() const {
    return static_cast<double>(samples.size()) / static_cast<double>(sample_rate_hz);
  }
};

namespace wav_detail {

inline bool fourcc_is(std::span<const std::uint8_t> b, std::size_t off, const char *tag) {
  return std::equal(tag, tag + 4, b.begin() + static_cast<std::ptrdiff_t>(off),
                    [](char c, std::uint8_t x) { return static_cast<std::uint8_t>(c) == x; });
}

}  // namespace wav_detail

/// Parses an in-memory RIFF/WAVE image. Never reads past the buffer or past a
/// declared chunk size.
inline AudioBuffer parse_wav(std::span<const std::uint8_t> bytes) {
  using wav_detail::fourcc_is;
  if (bytes.size() < 12 || !fourcc_is(bytes, 0, "RIFF") || !fourcc_is(bytes, 8, "WAVE"))
    throw Error(Errc::NotWav, "missing RIFF/WAVE magic");

  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = le::load<std::uint32_t>(bytes, pos + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;

    if (fourcc_is(bytes, pos, "fmt ")) {
      if (chunk_size < 16 || available < 16)
        throw Error(Errc::Truncated, "fmt chunk shorter than 16 bytes");
      const auto format = le::load<std::uint16_t>(bytes, body);
      channels = le::load<std::uint16_t>(bytes, body + 2);
      sample_rate = le::load<std::uint32_t>(bytes, body + 4);
      const auto bits = le::load<std::uint16_t>(bytes, body + 14);
      if (format != 1) throw Error(Errc::UnsupportedFormat, "audio format code " + std::to_string(format));
      if (bits != 16) throw Error(Errc::UnsupportedFormat, std::to_string(bits) + " bits per sample");
      if (channels != 1 && channels != 2)
        throw Error(Errc::UnsupportedFormat, std::to_string(channels) + " channels");
      if (sample_rate == 0 || sample_rate > 1'000'000)
        throw Error(Errc::UnsupportedFormat, "sample rate " + std::to_string(sample_rate));
      have_fmt = true;
    } else if (fourcc_is(bytes, pos, "data")) {
      if (!have_fmt) throw Error(Errc::NotWav, "data chunk before fmt chunk");
      if (available < chunk_size)
        throw Error(Errc::Truncated, "data chunk declares " + std::to_string(chunk_size) +
                                         " bytes, " + std::to_string(available) + " present");
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t frames = chunk_size / frame_bytes;
      AudioBuffer out;
      out.sample_rate_hz = static_cast<int>(sample_rate);
      out.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const std::size_t at = body + i * frame_bytes;
        if (channels == 1) {
          out.samples[i] = le::load<std::int16_t>(bytes, at) / 32768.0;
        } else {
          const int l = le::load<std::int16_t>(bytes, at);
          const int r = le::load<std::int16_t>(bytes, at + 2);
          out.samples[i] = (l + r) / 2.0 / 32768.0;
        }
      }
      return out;
    }

    // RIFF chunks are word aligned.
    const std::size_t advance = 8 + static_cast<std::size_t>(chunk_size) + (chunk_size & 1u);
    if (advance > bytes.size() - pos) break;
    pos += advance;
  }
  if (!have_fmt) throw Error(Errc::NotWav, "no fmt chunk");
  throw Error(Errc::Truncated, "no data chunk");
}

inline AudioBuffer read_wav(const std::filesystem::path &path) {
  return parse_wav(read_file_bytes(path));
}

inline std::vector<std::uint8_t> encode_wav(const AudioBuffer &buffer) {
  const auto n = buffer.samples.size();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  auto tag = [&](const char *t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  le::append<std::uint32_t>(out, 36 + data_bytes);
  tag("WAVE");
  tag("fmt ");
  le::append<std::uint32_t>(out, 16);
  le::append<std::uint16_t>(out, 1);  // PCM
  le::append<std::uint16_t>(out, 1);  // mono
  le::append<std::uint32_t>(out, static_cast<std::uint32_t>(buffer.sample_rate_hz));
  le::append<std::uint32_t>(out, static_cast<std::uint32_t>(buffer.sample_rate_hz) * 2);
  le::append<std::uint16_t>(out, 2);
  le::append<std::uint16_t>(out, 16);
  tag("data");
  le::append<std::uint32_t>(out, data_bytes);
  for (double s : buffer.samples) {
    const double scaled = std::round(s * 32768.0);
    le::append<std::int16_t>(out, static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0)));
  }
  return out;
}

inline void write_wav(const AudioBuffer &buffer, const std::filesystem::path &path) {
  if (buffer.sample_rate_hz <= 0) throw Error(Errc::InvalidArgument, "sample rate must be positive");
  write_file_atomic(path, encode_wav(buffer));
}

/// One segment of a synthetic test signal.
struct SynthSegment {
  enum class Kind { Silence, Tone, Noise };
  Kind kind = Kind::Silence;
  double dur_s = 0.0;
  double freq_hz = 0.0;
  double amplitude = 1.0;
  std::uint64_t seed = 0;

  static SynthSegment silence(double dur_s) { return {Kind::Silence, dur_s, 0.0, 0.0, 0}; }
  static SynthSegment tone(double freq_hz, double dur_s, double amplitude = 1.0) {
    return {Kind::Tone, dur_s, freq_hz, amplitude, 0};
  }
  static SynthSegment noise(double amplitude, std::uint64_t seed, double dur_s) {
    return {Kind::Noise, dur_s, 0.0, amplitude, seed};
  }
};

inline AudioBuffer synth_audio(std::span<const SynthSegment> segments, int sample_rate_hz) {
  if (sample_rate_hz <= 0) throw Error(Errc::InvalidSpec, "sample rate must be positive");
  AudioBuffer out;
  out.sample_rate_hz = sample_rate_hz;
  const double nyquist = sample_rate_hz / 2.0;
  for (const auto &seg : segments) {
    if (!(seg.dur_s > 0.0) || !std::isfinite(seg.dur_s))
      throw Error(Errc::InvalidSpec, "segment duration must be positive");
    if (seg.amplitude < 0.0 || seg.amplitude > 1.0)
      throw Error(Errc::InvalidSpec, "amplitude outside [0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(seg.dur_s * sample_rate_hz));
    switch (seg.kind) {
      case SynthSegment::Kind::Silence:
        out.samples.insert(out.samples.end(), n, 0.0);
        break;
      case SynthSegment::Kind::Tone: {
        if (!(seg.freq_hz > 0.0) || seg.freq_hz >= nyquist)
          throw Error(Errc::InvalidSpec, "tone frequency must lie in (0, Nyquist)");
        const double w = 2.0 * std::numbers::pi * seg.freq_hz / sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i)
          out.samples.push_back(seg.amplitude * std::sin(w * static_cast<double>(i)));
        break;
      }
      case SynthSegment::Kind::Noise: {
        std::mt19937_64 rng(seg.seed);
        std::uniform_real_distribution<double> dist(-seg.amplitude, seg.amplitude);
        for (std::size_t i = 0; i < n; ++i) out.samples.push_back(dist(rng));
        break;
      }
    }
  }
  return out;
}

inline AudioBuffer synth_audio(std::initializer_list<SynthSegment> segments, int sample_rate_hz) {
  return synth_audio(std::span<const SynthSegment>(segments.begin(), segments.size()), sample_rate_hz);
}

// ---------------------------------------------------------------------------
// Manifests: one JSON object per line.

struct ManifestEntry {
  std::string audio_path;
  std::string text;
  double duration_s = 0.0;
  std::string language;
};

inline void validate(const ManifestEntry &e) {
  if (!(e.duration_s > 0.0) || !std::isfinite(e.duration_s))
    throw Error(Errc::InvalidSpec, "manifest entry " + e.audio_path + ": duration_s must be > 0");
  if (e.language.empty() ||
      std::any_of(e.language.begin(), e.language.end(), [](unsigned char c) { return std::isupper(c) || std::isspace(c); }))
    throw Error(Errc::InvalidSpec, "manifest entry " + e.audio_path + ": language must be a non-empty lowercase tag");
}

inline nlohmann::json to_json(const ManifestEntry &e) {
  return {{"audio_path", e.audio_path}, {"text", e.text}, {"duration_s", e.duration_s}, {"language", e.language}};
}

inline ManifestEntry manifest_entry_from_json(const nlohmann::json &j) {
  ManifestEntry e;
  try {
    e.audio_path = j.at("audio_path").get<std::string>();
    e.text = j.value("text", std::string());
    e.duration_s = j.at("duration_s").get<double>();
    e.language = j.at("language").get<std::string>();
  } catch (const nlohmann::json::exception &ex) {
    throw Error(Errc::ParseError, std::string("manifest entry: ") + ex.what());
  }
  validate(e);
  return e;
}

/// Reads every JSON object line. Blank lines and provenance header lines
/// (objects carrying a "provenance" key) are skipped.
inline std::vector<nlohmann::json> read_jsonl(const std::filesystem::path &path) {
  std::istringstream in(read_file_text(path));
  std::vector<nlohmann::json> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &ex) {
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + ex.what());
    }
    if (!j.is_object())
      throw Error(Errc::ParseError, path.string() + ":" + std::to_string(line_no) + ": not an object");
    if (j.contains("provenance")) continue;
    out.push_back(std::move(j));
  }
  return out;
}

inline std::vector<ManifestEntry> read_manifest(const std::filesystem::path &path) {
  std::vector<ManifestEntry> out;
  for (const auto &j : read_jsonl(path)) out.push_back(manifest_entry_from_json(j));
  return out;
}

inline std::string manifest_to_jsonl(std::span<const ManifestEntry> entries) {
  std::string out;
  for (const auto &e : entries) out += to_json(e).dump() + "\n";
  return out;
}

}  // namespace asrkit

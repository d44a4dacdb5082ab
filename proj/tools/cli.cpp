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

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <random>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asrkit/asrkit.hpp"
#include "asrkit/rnnt_check.hpp"
#include "json.hpp"

namespace asrkit::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Bad flag values or inconsistent options; maps to exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string &msg) {
  if (!ok) throw ValidationError(msg);
}

// ---------------------------------------------------------------------------
// Provenance

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

const std::set<std::string> kOutputOptions = {"--out", "--per-file", "--summary", "--rejected", "--out-dir",
                                              "--masked-out"};

/// Hash over every non-output option (given value or default), in declaration
/// order. Output locations are excluded so the same run written to two places
/// produces identical bytes.
std::string config_hash(const CLI::App &app) {
  std::string canon;
  for (const CLI::Option *opt : app.get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help" || name == "-h" || kOutputOptions.count(name)) continue;
    std::string value;
    if (opt->count() > 0) {
      for (const auto &r : opt->results()) value += r + ",";
    } else {
      value = opt->get_default_str();
    }
    canon += name + "=" + value + ";";
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(canon);
  return os.str();
}

json provenance(const CLI::App &sub, std::optional<std::uint64_t> seed) {
  json p = {{"tool", "asrkit"},
            {"version", kToolVersion},
            {"subcommand", sub.get_name()},
            {"config_hash", config_hash(sub)}};
  p["seed"] = seed ? json(*seed) : json(nullptr);
  return p;
}

json with_header(const json &prov) { return {{"schema_version", kSchemaVersion}, {"provenance", prov}}; }

std::string provenance_line(const json &prov) {
  return json{{"schema_version", kSchemaVersion}, {"provenance", prov}}.dump() + "\n";
}

std::string csv_comment(const json &prov) { return "# " + prov.dump() + "\n"; }

void emit_json(const json &doc, const std::string &path, std::ostream &out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty() || path == "-")
    out << text;
  else
    write_file_atomic(path, text);
}

// ---------------------------------------------------------------------------
// Record helpers

fs::path resolve(const fs::path &manifest, const std::string &p) {
  const fs::path path(p);
  if (path.is_absolute()) return path;
  return manifest.parent_path() / path;
}

std::string record_key(const json &j) {
  if (j.contains("audio_path") && j["audio_path"].is_string()) return j["audio_path"].get<std::string>();
  if (j.contains("id") && j["id"].is_string()) return j["id"].get<std::string>();
  throw Error(Errc::ParseError, "record without audio_path or id: " + j.dump());
}

std::string string_field(const json &j, const char *key) {
  if (!j.contains(key)) return {};
  if (!j[key].is_string()) throw Error(Errc::ParseError, std::string("field ") + key + " must be a string");
  return j[key].get<std::string>();
}

double number_field(const json &j, const char *key) {
  if (!j.contains(key) || !j[key].is_number())
    throw Error(Errc::ParseError, std::string("record ") + record_key(j) + " lacks numeric " + key);
  return j[key].get<double>();
}

std::map<std::string, json> index_by_key(const std::vector<json> &records) {
  std::map<std::string, json> out;
  for (const auto &j : records) out.emplace(record_key(j), j);
  return out;
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string fmt_double(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

json wer_json(const WerStats &s) {
  return {{"wer", s.wer},           {"substitutions", s.substitutions}, {"deletions", s.deletions},
          {"insertions", s.insertions}, {"matches", s.matches},     {"n_ref", s.n_ref}};
}

std::vector<TimedWord> timed_words(const json &record) {
  std::vector<TimedWord> out;
  if (!record.contains("words")) return out;
  for (const auto &w : record.at("words")) {
    const auto norm = normalize_words(w.at("text").get<std::string>());
    if (norm.empty()) continue;
    out.push_back({norm.front(), w.at("start_s").get<double>()});
  }
  return out;
}

/// "1..9", "5" or "1,3,5".
std::vector<std::size_t> parse_n_list(const std::string &spec) {
  std::vector<std::size_t> out;
  auto to_n = [&](const std::string &s) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception &) {
      throw ValidationError("bad --n value '" + spec + "'");
    }
    require(pos == s.size() && v >= 1, "bad --n value '" + spec + "'");
    return static_cast<std::size_t>(v);
  };
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const auto lo = to_n(spec.substr(0, dots)), hi = to_n(spec.substr(dots + 2));
    require(lo <= hi, "empty --n range");
    for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_n(item));
  require(!out.empty(), "empty --n list");
  return out;
}

std::vector<double> parse_double_list(const std::string &spec, const char *what) {
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      require(pos == item.size(), std::string("bad ") + what + " '" + spec + "'");
    } catch (const std::invalid_argument &) {
      throw ValidationError(std::string("bad ") + what + " '" + spec + "'");
    } catch (const std::out_of_range &) {
      throw ValidationError(std::string("bad ") + what + " '" + spec + "'");
    }
  }
  require(!out.empty(), std::string("empty ") + what);
  return out;
}

std::vector<std::string> split_csv(const std::string &spec) {
  std::vector<std::string> out;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

// Shared VAD flags.
void add_vad_options(CLI::App *app, VadConfig &vad) {
  app->add_option("--min-chunk", vad.min_chunk_s, "Minimum chunk length before a silence cut (s)")->capture_default_str();
  app->add_option("--max-chunk", vad.max_chunk_s, "Maximum chunk length (s)")->capture_default_str();
  app->add_option("--min-silence", vad.min_silence_s, "Minimum silence for a cut (s)")->capture_default_str();
  app->add_option("--frame-ms", vad.frame_ms, "VAD frame length (ms)")->capture_default_str();
  app->add_option("--threshold-db", vad.energy_threshold_dbfs, "Speech energy threshold (dBFS)")->capture_default_str();
  app->add_option("--hangover", vad.hangover_frames, "Hangover frames after speech")->capture_default_str();
}

void validate_decode(const DecodeOptions &d) {
  require(d.frame_duration_s > 0.0 && std::isfinite(d.frame_duration_s), "--frame-duration must be positive");
}

// ---------------------------------------------------------------------------
// Subcommands

struct Options {
  // shared
  std::string ref, hyp, out, manifest, model, in, features;
  std::optional<std::uint64_t> seed;

  // wer
  std::string per_file, summary;
  // halluc
  std::string n_spec = "5";
  // ts-eval
  std::string tolerances = "0.02,0.05,0.1,0.2,0.5";
  // filter
  std::string mode, rejected;
  // decode / pipeline
  DecodeOptions decode;
  double bias = kDefaultTimestampBiasS;
  double frontend_db = -40.0;
  // vad
  VadConfig vad;
  // rnnt-check
  RnntCheckConfig rnnt;
  std::string report_format = "json";
  // bestrq
  MaskConfig mask;
  std::size_t heads = kDefaultHeads, codebook_size = kDefaultCodebookSize, codebook_dim = kDefaultCodeDim;
  std::string masked_out;
  // cs-build
  std::string pool_a, pool_b, out_dir;
  std::size_t count = 250;
  bool no_audio = false;
  // rtf
  std::string stages = "chunk,decode";
  // toy-model
  std::size_t vocab = 8, dim = 8, frames = 1;
  double scale = 1.0;
  std::string preset = "random";
};

void cmd_wer(const CLI::App &sub, const Options &o, std::ostream &out, std::ostream &err) {
  const auto refs = read_jsonl(o.ref);
  const auto hyps = index_by_key(read_jsonl(o.hyp));

  std::string csv = csv_comment(provenance(sub, std::nullopt));
  csv += "audio_path,set,n_ref,substitutions,deletions,insertions,wer\n";
  std::vector<std::pair<Words, Words>> all;
  std::map<std::string, std::vector<std::pair<Words, Words>>> by_set;
  for (const auto &r : refs) {
    const std::string key = record_key(r);
    const std::string set = r.contains("set") ? string_field(r, "set") : "all";
    std::string hyp_text;
    if (auto it = hyps.find(key); it != hyps.end())
      hyp_text = string_field(it->second, "text");
    else
      err << "warning: no hypothesis for " << key << ", scoring as empty\n";
    Words rw = normalize_words(string_field(r, "text")), hw = normalize_words(hyp_text);
    const WerStats s = wer(align_words(rw, hw));
    csv += csv_field(key) + "," + csv_field(set) + "," + std::to_string(s.n_ref) + "," +
           std::to_string(s.substitutions) + "," + std::to_string(s.deletions) + "," +
           std::to_string(s.insertions) + "," + fmt_double(s.wer) + "\n";
    by_set[set].emplace_back(rw, hw);
    all.emplace_back(std::move(rw), std::move(hw));
  }
  const WerStats corpus = corpus_wer(all);
  json sets = json::object();
  std::vector<double> set_wers;
  for (const auto &[name, pairs] : by_set) {
    try {
      const WerStats s = corpus_wer(pairs);
      sets[name] = wer_json(s);
      set_wers.push_back(s.wer);
    } catch (const Error &e) {
      if (e.code() != Errc::AllEmptyReferences) throw;
      err << "warning: set " << name << " has no reference words, excluded from macro average\n";
    }
  }
  json summary = with_header(provenance(sub, std::nullopt));
  summary["n_files"] = refs.size();
  summary["corpus"] = wer_json(corpus);
  summary["sets"] = sets;
  summary["macro_average_wer"] = macro_average(set_wers);

  if (!o.per_file.empty()) write_file_atomic(o.per_file, csv);
  emit_json(summary, o.summary, out);
}

/// Ref and hyp records paired by key, with audio hours from the reference.
std::vector<TimedAlignment> aligned_corpus(const std::string &ref_path, const std::string &hyp_path,
                                           std::ostream &err) {
  const auto refs = read_jsonl(ref_path);
  const auto hyps = index_by_key(read_jsonl(hyp_path));
  std::vector<TimedAlignment> corpus;
  for (const auto &r : refs) {
    const std::string key = record_key(r);
    std::string hyp_text;
    if (auto it = hyps.find(key); it != hyps.end())
      hyp_text = string_field(it->second, "text");
    else
      err << "warning: no hypothesis for " << key << ", scoring as empty\n";
    corpus.push_back({align_words(normalize_words(string_field(r, "text")), normalize_words(hyp_text)),
                      number_field(r, "duration_s") / 3600.0});
  }
  return corpus;
}

void cmd_halluc(const CLI::App &sub, const Options &o, std::ostream &out, std::ostream &err) {
  const auto ns = parse_n_list(o.n_spec);
  const auto corpus = aligned_corpus(o.ref, o.hyp, err);
  json rates = json::array();
  double hours = 0.0;
  for (std::size_t n : ns) {
    const HallucReport r = halluc_report(corpus, n);
    hours = r.total_hours;
    rates.push_back({{"n", n}, {"fr_per_hour", r.fr_per_hour}, {"or_per_hour", r.or_per_hour},
                     {"hr_per_hour", r.hr_per_hour}});
  }
  json doc = with_header(provenance(sub, std::nullopt));
  doc["total_hours"] = hours;
  doc["n_files"] = corpus.size();
  doc["rates"] = rates;
  emit_json(doc, o.out, out);
}

void cmd_ambient(const CLI::App &sub, const Options &o, std::ostream &out) {
  std::vector<std::string> texts;
  for (const auto &j : read_jsonl(o.hyp)) texts.push_back(string_field(j, "text"));
  const AmbientStats s = ambient_stats(texts);
  json doc = with_header(provenance(sub, std::nullopt));
  doc["n_responses"] = texts.size();
  doc["non_blank_rate"] = s.non_blank_rate;
  doc["mean_chars"] = s.mean_chars;
  doc["median_chars"] = s.median_chars;
  doc["frac_ge_10_chars"] = s.frac_ge_10_chars;
  emit_json(doc, o.out, out);
}

void cmd_ts_eval(const CLI::App &sub, const Options &o, std::ostream &out, std::ostream &err) {
  auto tolerances = parse_double_list(o.tolerances, "--tolerances");
  require(std::is_sorted(tolerances.begin(), tolerances.end()), "--tolerances must be ascending");
  require(std::all_of(tolerances.begin(), tolerances.end(), [](double t) { return t > 0.0; }),
          "--tolerances must be positive");
  const auto refs = read_jsonl(o.ref);
  const auto hyps = index_by_key(read_jsonl(o.hyp));
  std::vector<double> deltas;
  std::size_t matched = 0, total = 0;
  for (const auto &r : refs) {
    const std::string key = record_key(r);
    std::vector<TimedWord> hyp_words;
    if (auto it = hyps.find(key); it != hyps.end())
      hyp_words = timed_words(it->second);
    else
      err << "warning: no hypothesis for " << key << "\n";
    const auto res = timestamp_deltas(timed_words(r), hyp_words);
    deltas.insert(deltas.end(), res.deltas_s.begin(), res.deltas_s.end());
    matched += res.matched;
    total += res.total_ref;
  }
  const auto curve = accuracy_curve(deltas, tolerances);
  json prov = provenance(sub, std::nullopt);
  prov["matched"] = matched;
  prov["total_ref"] = total;
  prov["median_bias_s"] = estimate_bias(deltas);
  std::string csv = csv_comment(prov) + "tolerance_s,fraction\n";
  for (const auto &[t, f] : curve) csv += fmt_double(t) + "," + fmt_double(f) + "\n";
  if (o.out.empty() || o.out == "-")
    out << csv;
  else
    write_file_atomic(o.out, csv);
}

void cmd_chunk(const CLI::App &sub, const Options &o, std::ostream &out) {
  const AudioBuffer audio = read_wav(o.in);
  std::vector<ChunkSpec> chunks;
  if (!audio.samples.empty()) chunks = chunk_audio(audio, detect_speech(audio, o.vad), o.vad);
  std::string text = provenance_line(provenance(sub, std::nullopt));
  for (std::size_t i = 0; i < chunks.size(); ++i)
    text += json{{"index", i}, {"start_s", chunks[i].start_s}, {"end_s", chunks[i].end_s},
                 {"padded_len_s", chunks[i].padded_len_s}}
                .dump() +
            "\n";
  if (o.out.empty() || o.out == "-")
    out << text;
  else
    write_file_atomic(o.out, text);
}

void cmd_filter(const CLI::App &sub, const Options &o) {
  require(o.mode == "unsupervised" || o.mode == "pseudo", "--mode must be unsupervised or pseudo");
  const auto records = read_jsonl(o.manifest);
  const json prov = provenance(sub, std::nullopt);
  std::string kept = provenance_line(prov), rejected = provenance_line(prov);
  for (auto j : records) {
    FilterVerdict v;
    if (o.mode == "unsupervised") {
      const AudioBuffer audio = read_wav(resolve(o.manifest, string_field(j, "audio_path")));
      const double dur = audio.duration_s();
      const double ratio =
          audio.samples.empty() ? 0.0 : speech_existence_ratio(detect_speech(audio, o.vad), dur);
      v = filter_unsupervised(dur, ratio);
      j["speech_ratio"] = ratio;
    } else {
      const std::string a = j.contains("hyp_a") ? string_field(j, "hyp_a") : string_field(j, "text");
      if (!j.contains("hyp_b")) throw Error(Errc::ParseError, "pseudo mode needs hyp_b in " + record_key(j));
      const Words wa = normalize_words(a), wb = normalize_words(string_field(j, "hyp_b"));
      v = filter_pseudolabel(wa, wb);
      j["pseudo_wer"] = wer(align_words(wa, wb)).wer;
    }
    if (v.keep) {
      kept += j.dump() + "\n";
    } else {
      j["reason"] = std::string(reason_name(v.reason));
      rejected += j.dump() + "\n";
    }
  }
  write_file_atomic(o.out, kept);
  if (!o.rejected.empty()) write_file_atomic(o.rejected, rejected);
}

json decode_json(const DecodeResult &d, const std::vector<std::string> &vocab) {
  std::string text;
  for (int t : d.tokens) text += (text.empty() ? "" : " ") + token_text(t, vocab);
  return {{"tokens", d.tokens}, {"frame_indices", d.frame_indices}, {"timestamps_s", d.timestamps_s}, {"text", text}};
}

void cmd_decode_sim(const CLI::App &sub, const Options &o, std::ostream &out) {
  validate_decode(o.decode);
  ToyTransducerModel model = deserialize_model(read_file_bytes(o.model));
  Matrix frames = decode_feature_matrix(read_file_bytes(o.features));
  if (frames.cols() != model.hidden_dim)
    throw Error(Errc::DimensionMismatch, "frames have D=" + std::to_string(frames.cols()) + ", model d=" +
                                             std::to_string(model.hidden_dim));
  model.encoder_out = std::move(frames);
  const DecodeResult d = greedy_decode(model, o.decode);
  const std::string text = provenance_line(provenance(sub, std::nullopt)) + decode_json(d, {}).dump() + "\n";
  if (o.out.empty() || o.out == "-")
    out << text;
  else
    write_file_atomic(o.out, text);
}

int cmd_rnnt_check(const CLI::App &sub, const Options &o, std::ostream &out) {
  require(o.report_format == "json" || o.report_format == "text", "--report must be json or text");
  require(o.rnnt.max_t >= 1 && o.rnnt.max_v >= 2 && o.rnnt.max_d >= 1, "need max-t >= 1, max-v >= 2, max-d >= 1");
  require(o.rnnt.enum_max_t_plus_u >= 2 && o.rnnt.enum_max_t_plus_u <= 14, "--enum-max must lie in [2, 14]");
  RnntCheckConfig cfg = o.rnnt;
  cfg.seed = *o.seed;
  const RnntCheckReport r = run_rnnt_check(cfg);
  json doc = with_header(provenance(sub, o.seed));
  doc["oracle"] = {{"trials", r.trials}, {"max_rel_err", r.max_loss_rel_err}, {"tolerance", cfg.loss_rel_tol}};
  doc["enumeration"] = {{"trials", r.enum_trials}, {"max_abs_err", r.max_enum_abs_err}, {"tolerance", cfg.enum_abs_tol}};
  doc["gradient"] = {{"trials", r.grad_trials},
                     {"entries", r.grad_entries},
                     {"max_rel_err", r.max_grad_rel_err},
                     {"fd_step", cfg.fd_step},
                     {"tolerance", cfg.grad_rel_tol}};
  doc["passed"] = r.passed;
  if (o.report_format == "json") {
    emit_json(doc, o.out, out);
  } else {
    std::ostringstream os;
    os << "oracle      trials=" << r.trials << " max_rel_err=" << r.max_loss_rel_err << "\n"
       << "enumeration trials=" << r.enum_trials << " max_abs_err=" << r.max_enum_abs_err << "\n"
       << "gradient    trials=" << r.grad_trials << " entries=" << r.grad_entries
       << " max_rel_err=" << r.max_grad_rel_err << "\n"
       << (r.passed ? "PASS" : "FAIL") << "\n";
    if (o.out.empty() || o.out == "-")
      out << os.str();
    else
      write_file_atomic(o.out, os.str());
  }
  return r.passed ? kOk : kRuntimeError;
}

void cmd_bestrq(const CLI::App &sub, const Options &o) {
  MaskConfig mask = o.mask;
  mask.seed = *o.seed;
  mask.validate();
  require(o.heads >= 1 && o.codebook_size >= 1 && o.codebook_dim >= 1, "quantizer sizes must be positive");
  const Matrix feats = decode_feature_matrix(read_file_bytes(o.features));
  require(feats.rows() >= 1, "feature matrix has no frames");

  // Bank and mask draws use independent streams derived from the one seed.
  const QuantizerBank bank = make_quantizer_bank(feats.cols(), mask.seed, o.heads, o.codebook_dim, o.codebook_size);
  std::mt19937_64 mask_rng(mask.seed ^ 0x9e3779b97f4a7c15ull);
  const MaskPlan plan = sample_masks(feats.rows(), mask, mask_rng);
  const auto labels = quantize_targets(feats, plan, bank);
  write_file_atomic(o.out, encode_targets(plan.masked, labels, o.codebook_size));

  if (!o.masked_out.empty()) {
    const Matrix masked = apply_mask(feats, plan, mask.sigma, mask_rng);
    write_file_atomic(o.masked_out, encode_feature_matrix(masked));
  }
  json side = with_header(provenance(sub, o.seed));
  side["frames"] = feats.rows();
  side["feature_dim"] = feats.cols();
  side["starts"] = plan.starts;
  side["masked_frames"] = plan.masked.size();
  side["heads"] = o.heads;
  side["codebook_size"] = o.codebook_size;
  side["codebook_dim"] = o.codebook_dim;
  write_file_atomic(o.out + ".provenance.json", side.dump(2) + "\n");
}

CsPool load_pool(const std::string &path) {
  CsPool pool;
  for (const auto &e : read_manifest(path)) {
    if (pool.language.empty()) pool.language = e.language;
    pool.entries.push_back({resolve(path, e.audio_path).string(), e.text, e.duration_s});
  }
  pool.validate();
  return pool;
}

void cmd_cs_build(const CLI::App &sub, const Options &o) {
  require(o.count >= 1, "--count must be >= 1");
  const CsPool a = load_pool(o.pool_a), b = load_pool(o.pool_b);
  const auto samples = build_cs_set(a, b, o.count, *o.seed);
  fs::create_directories(o.out_dir);
  std::string manifest = provenance_line(provenance(sub, o.seed));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "cs_%04zu.wav", i);
    json j = cs_sample_to_json(samples[i]);
    j["audio_path"] = name;
    j["language"] = a.language + "-" + b.language;
    j["duration_s"] = samples[i].total_s;
    if (!o.no_audio) {
      const auto cat = concat_sample_audio(samples[i], [](const std::string &p) { return read_wav(p); });
      write_wav(cat.audio, fs::path(o.out_dir) / name);
      j["duration_s"] = cat.audio.duration_s();
      j["part_offsets"] = cat.part_offsets;
    }
    manifest += j.dump() + "\n";
  }
  write_file_atomic(fs::path(o.out_dir) / "manifest.jsonl", manifest);
}

ToyTransducerModel load_or_make_model(const Options &o) {
  if (!o.model.empty()) return deserialize_model(read_file_bytes(o.model));
  std::mt19937_64 rng(*o.seed);
  return random_model(8, 8, 1, rng);
}

void cmd_rtf(const CLI::App &sub, const Options &o, std::ostream &out) {
  require(!o.model.empty() || o.seed.has_value(), "rtf needs --model or --seed");
  validate_decode(o.decode);
  const auto stage_names = split_csv(o.stages);
  require(!stage_names.empty(), "--stages is empty");
  for (const auto &s : stage_names)
    require(s == "read" || s == "chunk" || s == "decode", "unknown stage '" + s + "' (read, chunk, decode)");
  const auto manifest = read_manifest(o.manifest);
  const ToyTransducerModel model = load_or_make_model(o);

  // State handed from one stage to the next for the current file.
  AudioBuffer audio;
  std::vector<ChunkSpec> chunks;
  bool loaded = false;
  auto ensure_audio = [&](const ManifestEntry &e) {
    if (!loaded) {
      audio = read_wav(resolve(o.manifest, e.audio_path));
      loaded = true;
      chunks.clear();
    }
  };
  std::vector<RtfStage> stages;
  for (const auto &name : stage_names) {
    if (name == "read") {
      stages.push_back({name, [&](const ManifestEntry &e) {
                          loaded = false;
                          ensure_audio(e);
                        }});
    } else if (name == "chunk") {
      stages.push_back({name, [&](const ManifestEntry &e) {
                          ensure_audio(e);
                          chunks = audio.samples.empty() ? std::vector<ChunkSpec>{}
                                                         : chunk_audio(audio, detect_speech(audio, o.vad), o.vad);
                        }});
    } else {
      stages.push_back({name, [&](const ManifestEntry &e) {
                          ensure_audio(e);
                          if (chunks.empty() && !audio.samples.empty())
                            chunks.push_back({0.0, audio.duration_s(), audio.duration_s()});
                          std::vector<Matrix> batch;
                          std::vector<std::size_t> lengths;
                          for (const auto &c : chunks) {
                            const auto b = static_cast<std::size_t>(std::llround(c.start_s * audio.sample_rate_hz));
                            const auto en = std::min(audio.samples.size(),
                                                     static_cast<std::size_t>(std::llround(c.end_s * audio.sample_rate_hz)));
                            batch.push_back(frame_features({audio.samples.data() + b, en - b}, audio.sample_rate_hz,
                                                           o.decode.frame_duration_s, model.hidden_dim));
                            lengths.push_back(batch.back().rows());
                          }
                          (void)batched_greedy_decode(model, batch, lengths, o.decode);
                        }});
    }
  }
  // A new file starts with nothing loaded.
  std::vector<RtfStage> wrapped;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    auto inner = stages[i].run;
    const bool first = i == 0;
    wrapped.push_back({stages[i].name, [&loaded, inner, first](const ManifestEntry &e) {
                         if (first) loaded = false;
                         inner(e);
                       }});
  }
  const RtfReport r = rtf_bench(wrapped, manifest);
  json doc = with_header(provenance(sub, o.seed));
  doc["wall_s_total"] = r.wall_s_total;
  doc["audio_s_total"] = r.audio_s_total;
  doc["rtf"] = r.rtf;
  json st = json::array();
  for (const auto &s : r.stages) st.push_back({{"name", s.name}, {"wall_s", s.wall_s}, {"rtf", s.rtf}});
  doc["stages"] = st;
  emit_json(doc, o.out, out);
}

void cmd_pipeline(const CLI::App &sub, const Options &o, std::ostream &out) {
  validate_decode(o.decode);
  const AudioBuffer audio = read_wav(o.in);
  const ToyTransducerModel model = deserialize_model(read_file_bytes(o.model));
  PipelineConfig cfg;
  cfg.vad = o.vad;
  cfg.decode = o.decode;
  cfg.bias_offset_s = o.bias;
  cfg.frontend_threshold_dbfs = o.frontend_db;
  const PipelineResult r = run_pipeline(audio, model, cfg);

  json words = json::array();
  for (const auto &w : r.transcript.words) words.push_back({{"text", w.text}, {"start_s", w.start_s}});
  json chunks = json::array();
  for (const auto &c : r.chunks) chunks.push_back({{"start_s", c.start_s}, {"end_s", c.end_s}});
  const json rec = {{"audio_path", o.in}, {"duration_s", audio.duration_s()}, {"text", r.transcript.text},
                    {"words", words},     {"chunks", chunks}};
  const std::string text = provenance_line(provenance(sub, std::nullopt)) + rec.dump() + "\n";
  if (o.out.empty() || o.out == "-")
    out << text;
  else
    write_file_atomic(o.out, text);
}

/// Chunk-local onset model: the prediction network is identically zero, and
/// token 1 wins exactly on frames whose onset feature is set.
ToyTransducerModel onset_model() {
  auto m = ToyTransducerModel::zeros(2, 3, 1);
  m.joiner_weight(1, 1) = 10.0;
  m.joiner_bias[1] = -5.0;
  return m;
}

void cmd_toy_model(const CLI::App &, const Options &o) {
  require(o.preset == "random" || o.preset == "onset", "--preset must be random or onset");
  ToyTransducerModel m;
  if (o.preset == "onset") {
    m = onset_model();
  } else {
    require(o.seed.has_value(), "--preset random needs --seed");
    require(o.vocab >= 2 && o.dim >= 1, "need --vocab >= 2 and --dim >= 1");
    require(o.scale > 0.0 && std::isfinite(o.scale), "--scale must be positive");
    std::mt19937_64 rng(*o.seed);
    m = random_model(o.vocab, o.dim, o.frames, rng, o.scale);
  }
  write_file_atomic(o.out, serialize_model(m));
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"asrkit: long-form ASR evaluation and transducer toolkit", "asrkit"};
  app.require_subcommand(1);
  Options o;

  auto *wer_cmd = app.add_subcommand("wer", "Per-file and corpus WER with macro average over sets");
  wer_cmd->add_option("--ref", o.ref, "Reference JSONL")->required()->check(CLI::ExistingFile);
  wer_cmd->add_option("--hyp", o.hyp, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  wer_cmd->add_option("--per-file", o.per_file, "Per-file CSV output");
  wer_cmd->add_option("--summary", o.summary, "Summary JSON output (default stdout)");

  auto *halluc_cmd = app.add_subcommand("halluc", "Fabrication / omission / hallucination rates per hour");
  halluc_cmd->add_option("--ref", o.ref, "Reference JSONL with duration_s")->required()->check(CLI::ExistingFile);
  halluc_cmd->add_option("--hyp", o.hyp, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  halluc_cmd->add_option("--n", o.n_spec, "Run thresholds: 5, 1..9 or 1,3,5")->capture_default_str();
  halluc_cmd->add_option("--out", o.out, "Report JSON (default stdout)");

  auto *ambient_cmd = app.add_subcommand("ambient", "Non-blank response statistics on non-speech audio");
  ambient_cmd->add_option("--hyp", o.hyp, "Hypothesis JSONL")->required()->check(CLI::ExistingFile);
  ambient_cmd->add_option("--out", o.out, "Stats JSON (default stdout)");

  auto *ts_cmd = app.add_subcommand("ts-eval", "Word timestamp accuracy curve");
  ts_cmd->add_option("--ref", o.ref, "Reference JSONL with words[]")->required()->check(CLI::ExistingFile);
  ts_cmd->add_option("--hyp", o.hyp, "Hypothesis JSONL with words[]")->required()->check(CLI::ExistingFile);
  ts_cmd->add_option("--tolerances", o.tolerances, "Comma-separated tolerances (s)")->capture_default_str();
  ts_cmd->add_option("--out", o.out, "Curve CSV (default stdout)");

  auto *chunk_cmd = app.add_subcommand("chunk", "Split a WAV into silence-aligned chunks");
  chunk_cmd->add_option("--in", o.in, "Input WAV")->required()->check(CLI::ExistingFile);
  chunk_cmd->add_option("--out", o.out, "Chunks JSONL (default stdout)");
  add_vad_options(chunk_cmd, o.vad);

  auto *filter_cmd = app.add_subcommand("filter", "Corpus filtering (speech ratio + duration, or pseudo-label WER)");
  filter_cmd->add_option("--manifest", o.manifest, "Input JSONL")->required()->check(CLI::ExistingFile);
  filter_cmd->add_option("--mode", o.mode, "unsupervised | pseudo")->required();
  filter_cmd->add_option("--out", o.out, "Kept records JSONL")->required();
  filter_cmd->add_option("--rejected", o.rejected, "Rejected records JSONL");
  add_vad_options(filter_cmd, o.vad);

  auto *decode_cmd = app.add_subcommand("decode-sim", "Greedy decode precomputed frames with a toy model");
  decode_cmd->add_option("--model", o.model, "model.bin")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--frames", o.features, "feats.bin")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--out", o.out, "Hypothesis JSONL (default stdout)");
  decode_cmd->add_option("--frame-duration", o.decode.frame_duration_s, "Seconds per encoder frame")->capture_default_str();
  decode_cmd->add_option("--max-symbols", o.decode.max_tokens_per_frame, "Token cap per frame")->capture_default_str();

  auto *rnnt_cmd = app.add_subcommand("rnnt-check", "Cross-check loss routes and gradients on random instances");
  rnnt_cmd->add_option("--trials", o.rnnt.trials, "Oracle-equivalence trials")->capture_default_str();
  rnnt_cmd->add_option("--max-t", o.rnnt.max_t)->capture_default_str();
  rnnt_cmd->add_option("--max-u", o.rnnt.max_u)->capture_default_str();
  rnnt_cmd->add_option("--max-v", o.rnnt.max_v)->capture_default_str();
  rnnt_cmd->add_option("--max-d", o.rnnt.max_d)->capture_default_str();
  rnnt_cmd->add_option("--enum-trials", o.rnnt.enum_trials)->capture_default_str();
  rnnt_cmd->add_option("--enum-max", o.rnnt.enum_max_t_plus_u, "Largest T+U for enumeration")->capture_default_str();
  rnnt_cmd->add_option("--grad-trials", o.rnnt.grad_trials)->capture_default_str();
  rnnt_cmd->add_option("--seed", o.seed)->required();
  rnnt_cmd->add_option("--report", o.report_format, "json | text")->capture_default_str();
  rnnt_cmd->add_option("--out", o.out, "Report path (default stdout)");

  auto *bestrq_cmd = app.add_subcommand("bestrq-targets", "Mask frames and emit frozen-quantizer targets");
  bestrq_cmd->add_option("--features", o.features, "feats.bin")->required()->check(CLI::ExistingFile);
  bestrq_cmd->add_option("--seed", o.seed)->required();
  bestrq_cmd->add_option("--p-mask", o.mask.p_mask)->capture_default_str();
  bestrq_cmd->add_option("--span", o.mask.n_span)->capture_default_str();
  bestrq_cmd->add_option("--sigma", o.mask.sigma, "Mask-fill standard deviation")->capture_default_str();
  bestrq_cmd->add_option("--heads", o.heads)->capture_default_str();
  bestrq_cmd->add_option("--codebook-size", o.codebook_size)->capture_default_str();
  bestrq_cmd->add_option("--codebook-dim", o.codebook_dim)->capture_default_str();
  bestrq_cmd->add_option("--out", o.out, "targets.bin")->required();
  bestrq_cmd->add_option("--masked-out", o.masked_out, "Optional masked feats.bin");

  auto *cs_cmd = app.add_subcommand("cs-build", "Build a synthetic code-switching set");
  cs_cmd->add_option("--pool-a", o.pool_a, "First-language manifest")->required()->check(CLI::ExistingFile);
  cs_cmd->add_option("--pool-b", o.pool_b, "Second-language manifest")->required()->check(CLI::ExistingFile);
  cs_cmd->add_option("--count", o.count)->capture_default_str();
  cs_cmd->add_option("--seed", o.seed)->required();
  cs_cmd->add_option("--out-dir", o.out_dir)->required();
  cs_cmd->add_flag("--no-audio", o.no_audio, "Write the manifest only");

  auto *rtf_cmd = app.add_subcommand("rtf", "Real-time factor of pipeline stages over a manifest");
  rtf_cmd->add_option("--manifest", o.manifest)->required()->check(CLI::ExistingFile);
  rtf_cmd->add_option("--stages", o.stages, "Comma list of read, chunk, decode")->capture_default_str();
  rtf_cmd->add_option("--model", o.model, "model.bin (default: random toy model from --seed)")->check(CLI::ExistingFile);
  rtf_cmd->add_option("--seed", o.seed);
  rtf_cmd->add_option("--frame-duration", o.decode.frame_duration_s)->capture_default_str();
  rtf_cmd->add_option("--max-symbols", o.decode.max_tokens_per_frame)->capture_default_str();
  rtf_cmd->add_option("--out", o.out, "Report JSON (default stdout)");
  add_vad_options(rtf_cmd, o.vad);

  auto *pipe_cmd = app.add_subcommand("pipeline", "Segment, decode and merge a long recording");
  pipe_cmd->add_option("--in", o.in, "Input WAV")->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--model", o.model, "model.bin")->required()->check(CLI::ExistingFile);
  pipe_cmd->add_option("--out", o.out, "Hypothesis JSONL (default stdout)");
  pipe_cmd->add_option("--bias", o.bias, "Timestamp bias correction (s)")->capture_default_str();
  pipe_cmd->add_option("--frame-duration", o.decode.frame_duration_s)->capture_default_str();
  pipe_cmd->add_option("--max-symbols", o.decode.max_tokens_per_frame)->capture_default_str();
  pipe_cmd->add_option("--frontend-db", o.frontend_db, "Front-end loudness threshold (dBFS)")->capture_default_str();
  add_vad_options(pipe_cmd, o.vad);

  auto *toy_cmd = app.add_subcommand("toy-model", "Write a toy transducer model.bin");
  toy_cmd->add_option("--preset", o.preset, "random | onset")->capture_default_str();
  toy_cmd->add_option("--vocab", o.vocab)->capture_default_str();
  toy_cmd->add_option("--dim", o.dim)->capture_default_str();
  toy_cmd->add_option("--frames", o.frames)->capture_default_str();
  toy_cmd->add_option("--scale", o.scale)->capture_default_str();
  toy_cmd->add_option("--seed", o.seed);
  toy_cmd->add_option("--out", o.out)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError &e) {
    const CLI::App *sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << "error: " << e.what() << "\n";
    if (sub != &app) err << "run '" << sub->get_name() << " --help' for usage\n";
    return kValidationError;
  }

  const CLI::App *sub = app.get_subcommands().front();
  const std::string name = sub->get_name();
  try {
    if (name == "chunk" || name == "filter" || name == "rtf" || name == "pipeline") o.vad.validate();

    int code = kOk;
    if (name == "wer") cmd_wer(*sub, o, out, err);
    else if (name == "halluc") cmd_halluc(*sub, o, out, err);
    else if (name == "ambient") cmd_ambient(*sub, o, out);
    else if (name == "ts-eval") cmd_ts_eval(*sub, o, out, err);
    else if (name == "chunk") cmd_chunk(*sub, o, out);
    else if (name == "filter") cmd_filter(*sub, o);
    else if (name == "decode-sim") cmd_decode_sim(*sub, o, out);
    else if (name == "rnnt-check") code = cmd_rnnt_check(*sub, o, out);
    else if (name == "bestrq-targets") cmd_bestrq(*sub, o);
    else if (name == "cs-build") cmd_cs_build(*sub, o);
    else if (name == "rtf") cmd_rtf(*sub, o, out);
    else if (name == "pipeline") cmd_pipeline(*sub, o, out);
    else if (name == "toy-model") cmd_toy_model(*sub, o);
    return code;
  } catch (const ValidationError &e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  } catch (const Error &e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::InvalidArgument ? kValidationError : kRuntimeError;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace asrkit::cli

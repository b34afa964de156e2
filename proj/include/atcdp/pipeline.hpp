// Copyright 2022-2024  atcdp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ATCDP_PIPELINE_HPP
#define ATCDP_PIPELINE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "atcdp/annotation.hpp"
#include "atcdp/callsign.hpp"
#include "atcdp/cnet.hpp"
#include "atcdp/eld.hpp"
#include "atcdp/error.hpp"
#include "atcdp/job_settings.hpp"
#include "atcdp/lexicon.hpp"
#include "atcdp/metrics.hpp"
#include "atcdp/quality.hpp"
#include "atcdp/rttm.hpp"
#include "atcdp/signal.hpp"
#include "atcdp/tagger.hpp"
#include "atcdp/textnorm.hpp"
#include "atcdp/wave.hpp"

namespace atcdp::pipeline {

struct RecordingInput {
  std::string wav_id;
  std::string path;  // mono 16-bit PCM WAV
};

/// External data consumed (not computed) by the pipeline: recognizer
/// confusion networks, diarization, designator telephony, normalization
/// rules, tag grammar, ELD vocabulary and optional surveillance context.
struct PipelineExternal {
  std::map<std::string, std::vector<formats::ConfusionNetwork>> cnets;  // by wav_id
  std::map<std::string, std::vector<formats::RttmSegment>> rttm;        // by file_id
  callsign::DesignatorTable designators;
  textnorm::RuleTable rules = textnorm::default_rules();
  tagger::TagGrammar grammar = tagger::default_tag_grammar();
  std::optional<lexicon::Lexicon> eld_lexicon;  // defaults to the closed ATC grammar vocabulary
  std::optional<callsign::SurveillanceContext> context;
};

struct PipelineConfig {
  formats::JobSettings settings;
  quality::SelectionPolicy policy;
  signal::SegmentationConfig segmentation;
  signal::GainConfig gain;
  uint64_t seed = 0;
  int jobs = 1;
};

/// Terminal state of one recording.
struct RecordingOutcome {
  std::string wav_id;
  bool processed = false;
  std::string reject_reason;  // io_error | too_short | too_long | low_snr | non_english
  bool no_cnet = false;       // processed through signal stages only

  double audio_len = 0.0;
  std::vector<TimeSegment> vad;
  signal::SnrEstimate snr;
  formats::AnnotationDoc doc;
  quality::MetadataRecord meta;
  double score = 0.0;
  std::vector<callsign::TokenSeq> boost_ngrams;            // per-utterance boosting list
  std::vector<std::pair<size_t, callsign::Match>> matches;  // (segment index, top match)
};

/// Breakdown of data-flow yield from raw recordings to the annotation pick.
struct PipelineReport {
  long input_count = 0;
  double input_hours = 0.0;
  // fixed reason order keeps renderings deterministic
  std::vector<std::pair<std::string, long>> rejected = {
      {"io_error", 0}, {"too_short", 0}, {"too_long", 0}, {"low_snr", 0}, {"non_english", 0}};
  long processed_count = 0;
  long selected_for_annotation_count = 0;
  double selected_hours = 0.0;
  uint64_t seed = 0;

  long& reason(const std::string& r) {
    for (auto& [name, count] : rejected)
      if (name == r) return count;
    throw InvalidInput("unknown rejection reason: " + r);
  }

  long total_rejected() const {
    long n = 0;
    for (const auto& [name, count] : rejected) n += count;
    return n;
  }
};

struct PipelineResult {
  std::vector<RecordingOutcome> outcomes;  // sorted by wav_id
  std::vector<quality::MetadataRecord> selected;
  quality::FilterResult selection;
  PipelineReport report;
};

namespace detail {

// Vocabulary of the closed ATC grammar: rule-table replacement tokens,
// alphabet and digit words, and the bundled telephony designators. Used as
// the default ELD lexicon so junk recognizer output scores low.
inline lexicon::Lexicon grammar_lexicon(const textnorm::RuleTable& rules,
                                        const callsign::DesignatorTable& designators) {
  lexicon::Lexicon lex;
  for (const auto& rule : rules.rules())
    for (const auto& tok : rule.replacement) lex.add(tok, lexicon::Source::Manual);
  for (auto w : icao::kAlphabet) lex.add(std::string(w), lexicon::Source::Manual);
  for (auto w : icao::kDigitWords) lex.add(std::string(w), lexicon::Source::Manual);
  for (const auto& t : designators.telephony_tokens()) lex.add(t, lexicon::Source::Designators);
  return lex;
}

inline formats::ConfusionNetwork merge_networks(
    const std::vector<formats::ConfusionNetwork>& nets) {
  formats::ConfusionNetwork merged;
  if (!nets.empty()) {
    merged.wav_id = nets.front().wav_id;
    merged.channel = nets.front().channel;
  }
  for (const auto& n : nets)
    merged.bins.insert(merged.bins.end(), n.bins.begin(), n.bins.end());
  std::stable_sort(merged.bins.begin(), merged.bins.end(),
                   [](const formats::Bin& a, const formats::Bin& b) { return a.t_begin < b.t_begin; });
  return merged;
}

// Index of the segment whose interval contains the bin center, else the
// nearest segment by center distance (ties to the earlier one).
inline size_t assign_segment(const std::vector<TimeSegment>& segs, double center) {
  for (size_t i = 0; i < segs.size(); ++i)
    if (center >= segs[i].start && center <= segs[i].end) return i;
  size_t best = 0;
  double best_dist = std::numeric_limits<double>::max();
  for (size_t i = 0; i < segs.size(); ++i) {
    double mid = 0.5 * (segs[i].start + segs[i].end);
    double dist = std::fabs(mid - center);
    if (dist < best_dist - 1e-12) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

inline std::string format_hours(double hours) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", hours);
  return buf;
}

inline std::string format_pct(long part, long whole) {
  char buf[32];
  if (whole <= 0) return "0.0%";
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * static_cast<double>(part) / whole);
  return buf;
}

}  // namespace detail

/// Runs the fixed stage order on one recording:
/// length gate -> segmentation -> gain -> SNR gate -> speaker segments
/// (RTTM or single-speaker) -> CNET ingestion -> ELD gate -> normalization
/// -> tagging -> callsign matching -> quality scoring.
inline RecordingOutcome process_recording(const RecordingInput& input,
                                          const PipelineExternal& ext,
                                          const PipelineConfig& cfg,
                                          const lexicon::Lexicon& eld_lex) {
  RecordingOutcome out;
  out.wav_id = input.wav_id;

  Waveform w;
  try {
    w = read_wav(input.path);
  } catch (const Error&) {
    out.reject_reason = "io_error";
    return out;
  }
  out.audio_len = w.duration();

  if (out.audio_len < cfg.settings.min_audio_len) {
    out.reject_reason = "too_short";
    return out;
  }
  if (out.audio_len > cfg.settings.max_audio_len) {
    out.reject_reason = "too_long";
    return out;
  }

  out.vad = signal::segment_by_energy(w, cfg.segmentation);
  Waveform gained = signal::apply_segment_gain(w, cfg.gain);

  // SNR over speech only (VAD approximates the tight speech-activity preset)
  Waveform speech;
  speech.sample_rate = gained.sample_rate;
  for (const auto& seg : out.vad) {
    auto a = static_cast<size_t>(seg.start * gained.sample_rate);
    auto b = std::min(gained.samples.size(), static_cast<size_t>(seg.end * gained.sample_rate));
    for (size_t i = a; i < b; ++i) speech.samples.push_back(gained.samples[i]);
  }
  try {
    out.snr = speech.samples.size() >= 4000 ? signal::estimate_wada_snr(speech)
                                            : signal::estimate_wada_snr(gained);
  } catch (const InvalidInput&) {
    out.snr = {static_cast<double>(signal::kWadaSnrMinDb), true};  // silence: no measurable speech
  }
  if (out.snr.value_db < cfg.settings.min_snr) {
    out.reject_reason = "low_snr";
    return out;
  }

  // speaker segments: external diarization when available, else the VAD
  // segments under a single-speaker assumption
  std::vector<TimeSegment> seg_times;
  std::vector<std::string> seg_speakers;
  auto rttm_it = ext.rttm.find(input.wav_id);
  if (rttm_it != ext.rttm.end() && !rttm_it->second.empty()) {
    for (const auto& r : rttm_it->second) {
      seg_times.push_back({r.onset, r.onset + r.duration});
      seg_speakers.push_back(r.speaker_name);
    }
  } else if (!out.vad.empty()) {
    for (const auto& s : out.vad) {
      seg_times.push_back(s);
      seg_speakers.emplace_back("A");
    }
  } else {
    seg_times.push_back({0.0, out.audio_len});
    seg_speakers.emplace_back("A");
  }
  std::set<std::string> speakers(seg_speakers.begin(), seg_speakers.end());

  // recognizer output
  double lid = 0.0, avg_conf = 0.0;
  size_t wrd_cnt = 0;
  std::vector<std::vector<std::string>> seg_words(seg_times.size());
  auto cnet_it = ext.cnets.find(input.wav_id);
  if (cnet_it == ext.cnets.end() || cnet_it->second.empty()) {
    out.no_cnet = true;
  } else {
    formats::ConfusionNetwork net = detail::merge_networks(cnet_it->second);
    avg_conf = net.average_confidence();
    wrd_cnt = net.bins.size();
    lid = eld::LexicalScorer(eld_lex).score(net).value;
    if (lid < cfg.settings.min_english_score) {
      out.reject_reason = "non_english";
      return out;
    }
    for (const auto& bin : net.bins) {
      if (bin.alternatives.empty()) continue;
      size_t seg = detail::assign_segment(seg_times, bin.t_begin + 0.5 * bin.dur);
      seg_words[seg].push_back(bin.alternatives.front().word);
    }
  }

  // text stages per segment
  for (size_t i = 0; i < seg_times.size(); ++i) {
    formats::AnnSegment seg;
    seg.start = seg_times[i].start;
    seg.end = seg_times[i].end;
    seg.speaker = seg_speakers[i];

    std::string joined;
    for (const auto& word : seg_words[i]) {
      if (!joined.empty()) joined += ' ';
      joined += word;
    }
    std::string normalized = textnorm::normalize_text(joined, ext.rules);
    std::vector<std::string> tokens = textnorm::detail::split_ws(normalized);
    std::vector<EntitySpan> spans = tagger::tag_entities(tokens, ext.designators, ext.grammar);
    seg.text = formats::spans_to_markup(tokens, spans);
    seg.speaker_label = std::string(tagger::role_name(tagger::classify_speaker_role(tokens, ext.grammar)));

    if (ext.context) {
      for (const auto& span : spans) {
        if (span.label != EntityLabel::Callsign) continue;
        callsign::TokenSeq span_tokens(tokens.begin() + static_cast<long>(span.start_token),
                                       tokens.begin() + static_cast<long>(span.end_token));
        auto ranked = callsign::match_callsign(span_tokens, *ext.context, ext.designators);
        if (!ranked.empty()) out.matches.emplace_back(i, ranked.front());
      }
    }
    out.doc.segments.push_back(std::move(seg));
  }
  if (ext.context) out.boost_ngrams = callsign::context_ngrams(*ext.context, ext.designators);

  double speech_len = 0.0;
  for (const auto& s : out.vad) speech_len += s.duration();

  out.meta.wav_id = input.wav_id;
  out.meta.airport = metrics::airport_from_wav_id(input.wav_id);
  out.meta.meta.avg_snr = out.snr.value_db;
  out.meta.meta.num_spk = static_cast<double>(speakers.size());
  out.meta.meta.speech_len = speech_len;
  out.meta.meta.audio_len = out.audio_len;
  out.meta.meta.lid_score = lid;
  out.meta.meta.avg_word_conf = avg_conf;
  out.meta.meta.wrd_cnt = static_cast<double>(wrd_cnt);
  out.score = quality::quality_score(out.meta.meta);
  out.processed = true;
  return out;
}

/// Batch driver: every recording ends in exactly one terminal state and the
/// report conserves counts at every stage boundary. Identical inputs and
/// seed produce identical outcomes regardless of the job count.
inline PipelineResult run_pipeline(std::vector<RecordingInput> recordings,
                                   const PipelineExternal& ext, PipelineConfig cfg) {
  std::sort(recordings.begin(), recordings.end(),
            [](const RecordingInput& a, const RecordingInput& b) { return a.wav_id < b.wav_id; });
  cfg.policy.seed = cfg.seed;

  const lexicon::Lexicon eld_lex =
      ext.eld_lexicon ? *ext.eld_lexicon : detail::grammar_lexicon(ext.rules, ext.designators);

  PipelineResult result;
  result.outcomes.resize(recordings.size());
  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || recordings.size() < 2) {
    for (size_t i = 0; i < recordings.size(); ++i)
      result.outcomes[i] = process_recording(recordings[i], ext, cfg, eld_lex);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= recordings.size()) return;
        result.outcomes[i] = process_recording(recordings[i], ext, cfg, eld_lex);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  PipelineReport& report = result.report;
  report.seed = cfg.seed;
  report.input_count = static_cast<long>(recordings.size());
  std::vector<quality::MetadataRecord> processed;
  for (const auto& o : result.outcomes) {
    report.input_hours += o.audio_len / 3600.0;
    if (o.processed) {
      ++report.processed_count;
      processed.push_back(o.meta);
    } else {
      ++report.reason(o.reject_reason);
    }
  }

  result.selection = quality::filter_recordings(processed, cfg.policy);
  result.selected = result.selection.kept;
  report.selected_for_annotation_count = static_cast<long>(result.selected.size());
  for (const auto& r : result.selected) report.selected_hours += r.meta.speech_len / 3600.0;
  return result;
}

/// Human-readable yield breakdown; counts conserve and two reports from the
/// same run compare byte-identical.
inline std::string dataflow_report(const PipelineReport& r) {
  std::ostringstream out;
  out << "dataflow yield\n";
  out << "  input recordings: " << r.input_count << " (" << detail::format_hours(r.input_hours)
      << " h)\n";
  for (const auto& [reason, count] : r.rejected)
    out << "  rejected " << reason << ": " << count << " ("
        << detail::format_pct(count, r.input_count) << ")\n";
  out << "  processed: " << r.processed_count << " ("
      << detail::format_pct(r.processed_count, r.input_count) << ")\n";
  out << "  selected for annotation: " << r.selected_for_annotation_count << " ("
      << detail::format_hours(r.selected_hours) << " h)\n";
  out << "  seed: " << r.seed << "\n";
  return out.str();
}

/// Machine-readable rendering of the same report.
inline nlohmann::ordered_json dataflow_report_json(const PipelineReport& r) {
  nlohmann::ordered_json j;
  j["input_count"] = r.input_count;
  j["input_hours"] = r.input_hours;
  nlohmann::ordered_json rej;
  for (const auto& [reason, count] : r.rejected) rej[reason] = count;
  j["rejected"] = rej;
  j["processed_count"] = r.processed_count;
  j["selected_for_annotation_count"] = r.selected_for_annotation_count;
  j["selected_hours"] = r.selected_hours;
  j["seed"] = r.seed;
  return j;
}

/// Writes per-recording and corpus-level outputs under out_dir:
/// <wav_id>.xml annotations, metadata.jsonl, vad.rttm, selection.tsv,
/// report.txt, report.json and per-recording boosting n-gram lists.
inline void write_outputs(const std::string& out_dir, const PipelineResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  std::vector<formats::RttmSegment> all_vad;
  std::vector<quality::MetadataRecord> metas;
  for (const auto& o : result.outcomes) {
    if (!o.processed) continue;
    std::ofstream xml(path(o.wav_id + ".xml"), std::ios::binary);
    xml << formats::write_annotation_xml(o.doc);
    for (const auto& seg : o.vad)
      all_vad.push_back({o.wav_id, "1", seg.start, seg.duration(), "speech"});
    metas.push_back(o.meta);
    if (!o.boost_ngrams.empty()) {
      std::ofstream ng(path(o.wav_id + ".ngrams.txt"), std::ios::binary);
      for (const auto& seq : o.boost_ngrams) {
        for (size_t i = 0; i < seq.size(); ++i) {
          if (i) ng << ' ';
          ng << seq[i];
        }
        ng << '\n';
      }
    }
  }
  {
    std::ofstream rttm(path("vad.rttm"), std::ios::binary);
    formats::write_rttm(rttm, all_vad);
  }
  {
    std::ofstream jsonl(path("metadata.jsonl"), std::ios::binary);
    quality::save_metadata_jsonl(jsonl, metas);
  }
  {
    std::ofstream sel(path("selection.tsv"), std::ios::binary);
    quality::write_selection_report(sel, result.selection);
  }
  {
    std::ofstream txt(path("report.txt"), std::ios::binary);
    txt << dataflow_report(result.report);
  }
  {
    std::ofstream js(path("report.json"), std::ios::binary);
    js << dataflow_report_json(result.report).dump(2) << '\n';
  }
}

}  // namespace atcdp::pipeline

#endif  // ATCDP_PIPELINE_HPP

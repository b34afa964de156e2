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

// Command-line front end for the corpus-construction toolkit.
//
// Exit codes: 0 success, 1 validation/usage error, 2 partial failure (some
// recordings were rejected with io_error but the batch completed).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "atcdp/atcdp.hpp"

namespace fs = std::filesystem;
using namespace atcdp;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open file: " + path);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

std::istream& open_input(std::ifstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cin;
  file.open(path, std::ios::binary);
  if (!file) throw InvalidInput("cannot open file: " + path);
  return file;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw InvalidInput("cannot write file: " + path);
  return file;
}

textnorm::RuleTable rules_or_default(const std::string& path) {
  if (path.empty()) return textnorm::default_rules();
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open rules file: " + path);
  return textnorm::load_rules(in);
}

tagger::TagGrammar grammar_or_default(const std::string& path) {
  if (path.empty()) return tagger::default_tag_grammar();
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open grammar file: " + path);
  return tagger::load_tag_grammar(in);
}

callsign::DesignatorTable designators_or_empty(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open designator file: " + path);
  return callsign::load_designators(in);
}

callsign::SurveillanceContext load_context(const std::string& path,
                                           const callsign::DesignatorTable& table,
                                           std::optional<double> at) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("surveillance context: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("surveillance context must be a JSON list");
  callsign::SurveillanceContext ctx;
  if (at) ctx.timestamp = *at;
  std::set<std::string> seen;
  for (const auto& item : j) {
    std::string code = item.at("icao_code").get<std::string>();
    if (at && item.contains("window")) {
      auto w = item.at("window");
      if (*at < w.at(0).get<double>() || *at > w.at(1).get<double>()) continue;
    }
    if (!seen.insert(code).second) continue;  // unique by icao_code
    ctx.callsigns.push_back(callsign::entry_from_code(code, table));
  }
  return ctx;
}

std::vector<std::string> normalized_tokens(const std::string& line,
                                           const textnorm::RuleTable& rules) {
  return textnorm::detail::split_ws(textnorm::normalize_text(line, rules));
}

// --- subcommand bodies ----------------------------------------------------

int cmd_normalize(const std::string& rules_path, const std::string& in_path,
                  const std::string& out_path, bool digits) {
  textnorm::RuleTable rules = rules_or_default(rules_path);
  std::ifstream fin;
  std::ofstream fout;
  std::istream& in = open_input(fin, in_path);
  std::ostream& out = open_output(fout, out_path);
  std::string line;
  while (std::getline(in, line)) {
    std::string n = textnorm::normalize_text(line, rules);
    if (digits) n = textnorm::verbalize_digits(n, rules);
    out << n << '\n';
  }
  return 0;
}

int cmd_tag(const std::string& designators_path, const std::string& grammar_path,
            const std::string& rules_path, const std::string& in_path,
            const std::string& out_path) {
  auto table = designators_or_empty(designators_path);
  auto grammar = grammar_or_default(grammar_path);
  auto rules = rules_or_default(rules_path);
  std::ifstream fin;
  std::ofstream fout;
  std::istream& in = open_input(fin, in_path);
  std::ostream& out = open_output(fout, out_path);
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = normalized_tokens(line, rules);
    auto spans = tagger::tag_entities(tokens, table, grammar);
    auto role = tagger::classify_speaker_role(tokens, grammar);
    out << formats::spans_to_markup(tokens, spans) << '\t' << tagger::role_name(role) << '\n';
  }
  return 0;
}

int cmd_match(const std::string& designators_path, const std::string& context_path,
              const std::string& span_text, std::optional<double> at, size_t top,
              const std::string& out_path) {
  auto table = designators_or_empty(designators_path);
  auto ctx = load_context(context_path, table, at);
  auto span = textnorm::detail::split_ws(textnorm::normalize_text(span_text,
                                                                  textnorm::default_rules()));
  auto ranked = callsign::match_callsign(span, ctx, table);
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  for (size_t i = 0; i < ranked.size() && i < top; ++i)
    out << ranked[i].icao_code << '\t' << ranked[i].distance << '\n';
  return 0;
}

int cmd_score(const std::string& metadata_path, const std::string& out_path) {
  std::ifstream fin;
  std::istream& in = open_input(fin, metadata_path);
  auto records = quality::load_metadata_jsonl(in);
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  char buf[32];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.4f", quality::quality_score(r.meta));
    out << r.wav_id << '\t' << buf << '\n';
  }
  return 0;
}

int cmd_select(const std::string& metadata_path, const std::string& policy_path,
               std::optional<double> top_hours, std::optional<uint64_t> seed,
               const std::string& out_path) {
  std::ifstream fin;
  std::istream& in = open_input(fin, metadata_path);
  auto records = quality::load_metadata_jsonl(in);
  quality::SelectionPolicy policy;
  if (!policy_path.empty()) policy = quality::parse_selection_policy(slurp(policy_path));
  if (seed) policy.seed = *seed;

  auto result = quality::filter_recordings(records, policy);
  if (top_hours) {
    auto ranked = quality::rank_for_annotation(result.kept, *top_hours);
    std::set<std::string> chosen;
    for (const auto& r : ranked) chosen.insert(r.wav_id);
    quality::FilterResult pruned;
    for (const auto& r : result.kept) {
      if (chosen.count(r.wav_id)) pruned.kept.push_back(r);
      else pruned.rejected.push_back({r, "below_rank_cut"});
    }
    pruned.rejected.insert(pruned.rejected.end(), result.rejected.begin(), result.rejected.end());
    result = std::move(pruned);
  }
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  quality::write_selection_report(out, result);
  return 0;
}

std::map<std::string, std::vector<std::string>> read_trans(const std::string& path,
                                                           const textnorm::RuleTable& rules) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open transcript file: " + path);
  std::map<std::string, std::vector<std::string>> out;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = textnorm::detail::split_ws(line);
    if (fields.empty()) continue;
    std::string utt = fields.front();
    std::string text;
    for (size_t i = 1; i < fields.size(); ++i) {
      if (i > 1) text += ' ';
      text += fields[i];
    }
    // score on normalized, markup-stripped tokens
    out[utt] = normalized_tokens(textnorm::strip_markup(text), rules);
  }
  return out;
}

int cmd_eval_wer(const std::string& ref_path, const std::string& hyp_path,
                 const std::string& rules_path, const std::string& out_path) {
  auto rules = rules_or_default(rules_path);
  auto ref = read_trans(ref_path, rules);
  auto hyp = read_trans(hyp_path, rules);
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  metrics::WerBreakdown total;
  char buf[64];
  for (const auto& [utt, ref_toks] : ref) {
    if (ref_toks.empty()) continue;
    auto it = hyp.find(utt);
    std::vector<std::string> hyp_toks = it == hyp.end() ? std::vector<std::string>{} : it->second;
    metrics::WerBreakdown b = metrics::wer(ref_toks, hyp_toks);
    total.substitutions += b.substitutions;
    total.insertions += b.insertions;
    total.deletions += b.deletions;
    total.reference_words += b.reference_words;
    std::snprintf(buf, sizeof buf, "%.2f", b.wer());
    out << utt << '\t' << buf << "\tS=" << b.substitutions << "\tI=" << b.insertions
        << "\tD=" << b.deletions << "\tN=" << b.reference_words << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.2f", total.wer());
  out << "TOTAL\t" << buf << "\tS=" << total.substitutions << "\tI=" << total.insertions
      << "\tD=" << total.deletions << "\tN=" << total.reference_words << '\n';
  return 0;
}

int cmd_eval_ner(const std::string& gold_path, const std::string& pred_path,
                 const std::string& out_path) {
  formats::AnnotationDoc gold = formats::parse_annotation_xml(slurp(gold_path));
  formats::AnnotationDoc pred = formats::parse_annotation_xml(slurp(pred_path));
  if (gold.segments.size() != pred.segments.size())
    throw InvalidInput("gold and prediction have different segment counts");

  std::vector<std::vector<EntitySpan>> gold_spans, pred_spans;
  for (const auto& seg : gold.segments) gold_spans.push_back(formats::markup_to_spans(seg.text).spans);
  for (const auto& seg : pred.segments) pred_spans.push_back(formats::markup_to_spans(seg.text).spans);

  auto counts = metrics::entity_eval(gold_spans, pred_spans);
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  out << "label\ttp\tfp\tfn\tprecision\trecall\tf1\n";
  char buf[96];
  metrics::ConfusionCounts overall;
  for (const auto& [label, c] : counts) {
    metrics::Prf1 r = metrics::prf1(c);
    std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.4f", r.precision, r.recall, r.f1);
    out << label_name(label) << '\t' << c.tp << '\t' << c.fp << '\t' << c.fn << '\t' << buf
        << '\n';
    overall += c;
  }
  metrics::Prf1 r = metrics::prf1(overall);
  std::snprintf(buf, sizeof buf, "%.4f\t%.4f\t%.4f", r.precision, r.recall, r.f1);
  out << "overall\t" << overall.tp << '\t' << overall.fp << '\t' << overall.fn << '\t' << buf
      << '\n';
  return 0;
}

int cmd_stats(const std::string& metadata_path, bool split_english, const std::string& out_path) {
  std::ifstream fin;
  std::istream& in = open_input(fin, metadata_path);
  auto records = quality::load_metadata_jsonl(in);
  std::ofstream fout;
  std::ostream& out = open_output(fout, out_path);
  out << "group\tairport\tsegments\tspeech_hours\tduration\tsnr\tlang_score\n";

  auto emit = [&](const std::string& group, const std::vector<quality::MetadataRecord>& recs) {
    char buf[32];
    for (const auto& s : metrics::corpus_stats(recs)) {
      std::snprintf(buf, sizeof buf, "%.2f", s.total_speech_hours);
      out << group << '\t' << s.airport << '\t' << s.segments << '\t' << buf << '\t'
          << metrics::format_cell(s.duration_mean, s.duration_std, 1) << '\t'
          << metrics::format_cell(s.snr_mean, s.snr_std, 1) << '\t'
          << metrics::format_cell(s.lang_mean, s.lang_std, 2) << '\n';
    }
  };
  if (!split_english) {
    emit("all", records);
  } else {
    std::vector<quality::MetadataRecord> english, other;
    for (const auto& r : records)
      (r.meta.lid_score >= eld::kEnglishSplit ? english : other).push_back(r);
    emit("english", english);
    emit("non_english", other);
  }
  return 0;
}

int cmd_process(const std::string& audio_dir, const std::string& cnet_path,
                const std::string& rttm_path, const std::string& designators_path,
                const std::string& rules_path, const std::string& grammar_path,
                const std::string& settings_path, const std::string& policy_path,
                const std::string& lexicon_path, const std::string& context_path,
                const std::string& out_dir, uint64_t seed, int jobs) {
  pipeline::PipelineExternal ext;
  ext.designators = designators_or_empty(designators_path);
  ext.rules = rules_or_default(rules_path);
  ext.grammar = grammar_or_default(grammar_path);
  if (!cnet_path.empty()) {
    std::ifstream in(cnet_path);
    if (!in) throw InvalidInput("cannot open cnet file: " + cnet_path);
    for (auto& net : formats::parse_cnet(in)) ext.cnets[net.wav_id].push_back(std::move(net));
  }
  if (!rttm_path.empty()) {
    std::ifstream in(rttm_path);
    if (!in) throw InvalidInput("cannot open rttm file: " + rttm_path);
    for (auto& seg : formats::parse_rttm(in)) ext.rttm[seg.file_id].push_back(std::move(seg));
  }
  if (!lexicon_path.empty()) {
    std::ifstream in(lexicon_path);
    if (!in) throw InvalidInput("cannot open lexicon file: " + lexicon_path);
    ext.eld_lexicon = lexicon::load_lexicon(in);
  }
  if (!context_path.empty()) ext.context = load_context(context_path, ext.designators, {});

  pipeline::PipelineConfig cfg;
  if (!settings_path.empty()) cfg.settings = formats::parse_job_settings(slurp(settings_path));
  if (!policy_path.empty()) cfg.policy = quality::parse_selection_policy(slurp(policy_path));
  cfg.seed = seed;
  cfg.jobs = jobs;

  std::vector<pipeline::RecordingInput> inputs;
  for (const auto& entry : fs::directory_iterator(audio_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".wav") continue;
    inputs.push_back({entry.path().stem().string(), entry.path().string()});
  }
  if (inputs.empty()) std::cerr << "warning: no .wav files under " << audio_dir << "\n";

  pipeline::PipelineResult result = pipeline::run_pipeline(inputs, ext, cfg);
  pipeline::write_outputs(out_dir, result);
  std::cout << pipeline::dataflow_report(result.report);

  for (const auto& [reason, count] : result.report.rejected)
    if (reason == "io_error" && count > 0) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ATC corpus construction toolkit"};
  app.require_subcommand(1);

  // process
  auto* process = app.add_subcommand("process", "run the full data-processing pipeline");
  std::string audio_dir, cnet_path, rttm_path, designators_path, rules_path, grammar_path;
  std::string settings_path, policy_path, lexicon_path, context_path, out_dir;
  uint64_t seed = 0;
  int jobs = 1;
  process->add_option("--audio-dir", audio_dir, "directory of input .wav files")->required();
  process->add_option("--cnet", cnet_path, "extended-CTM confusion networks");
  process->add_option("--rttm", rttm_path, "diarization segments (RTTM)");
  process->add_option("--designators", designators_path, "airline designator table");
  process->add_option("--rules", rules_path, "normalization rule table");
  process->add_option("--grammar", grammar_path, "tag grammar keyword file");
  process->add_option("--settings", settings_path, "job settings JSON");
  process->add_option("--policy", policy_path, "selection policy JSON");
  process->add_option("--lexicon", lexicon_path, "lexicon for language scoring");
  process->add_option("--context", context_path, "surveillance context JSON");
  process->add_option("--out", out_dir, "output directory")->required();
  process->add_option("--seed", seed, "selection seed")->envname("ATCDP_SEED");
  process->add_option("--jobs", jobs, "parallel workers")->envname("ATCDP_JOBS");

  // normalize
  auto* normalize = app.add_subcommand("normalize", "apply transcript unification rules");
  std::string n_rules, n_in, n_out;
  bool n_digits = false;
  normalize->add_option("--rules", n_rules, "rule table (default: bundled)")
      ->envname("ATCDP_RULES");
  normalize->add_option("--in", n_in, "input text file (default: stdin)");
  normalize->add_option("--out", n_out, "output file (default: stdout)");
  normalize->add_flag("--verbalize-digits", n_digits, "also expand digit characters");

  // tag
  auto* tag = app.add_subcommand("tag", "tag callsign/command/value spans and speaker role");
  std::string t_designators, t_grammar, t_rules, t_in, t_out;
  tag->add_option("--designators", t_designators, "airline designator table")
      ->envname("ATCDP_DESIGNATORS");
  tag->add_option("--grammar", t_grammar, "tag grammar keyword file");
  tag->add_option("--rules", t_rules, "normalization rule table");
  tag->add_option("--in", t_in, "input text file (default: stdin)");
  tag->add_option("--out", t_out, "output file (default: stdout)");

  // match-callsign
  auto* match = app.add_subcommand("match-callsign", "rank surveillance callsigns for a span");
  std::string m_designators, m_context, m_span, m_out;
  double m_at = 0.0;
  bool m_has_at = false;
  size_t m_top = 10;
  match->add_option("--designators", m_designators, "airline designator table")
      ->envname("ATCDP_DESIGNATORS");
  match->add_option("--context", m_context, "surveillance context JSON")->required();
  match->add_option("--span", m_span, "spoken callsign span")->required();
  match->add_option("--at", m_at, "utterance timestamp (epoch seconds)")
      ->each([&](const std::string&) { m_has_at = true; });
  match->add_option("--top", m_top, "print at most this many candidates");
  match->add_option("--out", m_out, "output file (default: stdout)");

  // score
  auto* score = app.add_subcommand("score", "quality-score metadata records");
  std::string s_metadata, s_out;
  score->add_option("--metadata", s_metadata, "metadata .jsonl file")->required();
  score->add_option("--out", s_out, "output file (default: stdout)");

  // select
  auto* select = app.add_subcommand("select", "filter and select recordings for annotation");
  std::string sel_metadata, sel_policy, sel_out;
  double sel_top_hours = 0.0;
  bool sel_has_top = false;
  uint64_t sel_seed = 0;
  bool sel_has_seed = false;
  select->add_option("--metadata", sel_metadata, "metadata .jsonl file")->required();
  select->add_option("--policy", sel_policy, "selection policy JSON");
  select->add_option("--top-hours", sel_top_hours, "rank and keep the best records up to this many speech hours")
      ->each([&](const std::string&) { sel_has_top = true; });
  select->add_option("--seed", sel_seed, "random subset seed")
      ->envname("ATCDP_SEED")
      ->each([&](const std::string&) { sel_has_seed = true; });
  select->add_option("--out", sel_out, "output file (default: stdout)");

  // eval-wer
  auto* eval_wer = app.add_subcommand("eval-wer", "word error rate against a reference");
  std::string w_ref, w_hyp, w_rules, w_out;
  eval_wer->add_option("--ref", w_ref, "reference transcripts (utt_id tokens...)")->required();
  eval_wer->add_option("--hyp", w_hyp, "hypothesis transcripts (utt_id tokens...)")->required();
  eval_wer->add_option("--rules", w_rules, "normalization rule table");
  eval_wer->add_option("--out", w_out, "output file (default: stdout)");

  // eval-ner
  auto* eval_ner = app.add_subcommand("eval-ner", "entity span scoring against gold XML");
  std::string e_gold, e_pred, e_out;
  eval_ner->add_option("--gold", e_gold, "gold annotation XML")->required();
  eval_ner->add_option("--pred", e_pred, "predicted annotation XML")->required();
  eval_ner->add_option("--out", e_out, "output file (default: stdout)");

  // stats
  auto* stats = app.add_subcommand("stats", "per-airport corpus statistics");
  std::string st_metadata, st_out;
  bool st_split = false;
  stats->add_option("--metadata", st_metadata, "metadata .jsonl file")->required();
  stats->add_flag("--split-english", st_split, "split by English language score at 0.5");
  stats->add_option("--out", st_out, "output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (process->parsed())
      return cmd_process(audio_dir, cnet_path, rttm_path, designators_path, rules_path,
                         grammar_path, settings_path, policy_path, lexicon_path, context_path,
                         out_dir, seed, jobs);
    if (normalize->parsed()) return cmd_normalize(n_rules, n_in, n_out, n_digits);
    if (tag->parsed()) return cmd_tag(t_designators, t_grammar, t_rules, t_in, t_out);
    if (match->parsed())
      return cmd_match(m_designators, m_context, m_span,
                       m_has_at ? std::optional<double>(m_at) : std::nullopt, m_top, m_out);
    if (score->parsed()) return cmd_score(s_metadata, s_out);
    if (select->parsed())
      return cmd_select(sel_metadata, sel_policy,
                        sel_has_top ? std::optional<double>(sel_top_hours) : std::nullopt,
                        sel_has_seed ? std::optional<uint64_t>(sel_seed) : std::nullopt, sel_out);
    if (eval_wer->parsed()) return cmd_eval_wer(w_ref, w_hyp, w_rules, w_out);
    if (eval_ner->parsed()) return cmd_eval_ner(e_gold, e_pred, e_out);
    if (stats->parsed()) return cmd_stats(st_metadata, st_split, st_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

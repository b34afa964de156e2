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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

#include "atcdp/pipeline.hpp"
#include "test_util.hpp"

using namespace atcdp;
using namespace atcdp::pipeline;

namespace {

// speech-shaped recording: Laplacian bursts over a quiet noise floor
Waveform make_speech(double seconds, uint64_t seed, double noise_amp = 1e-4) {
  testutil::Sampler rng(seed);
  Waveform w;
  w.sample_rate = 16000;
  size_t n = static_cast<size_t>(seconds * w.sample_rate);
  w.samples.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) w.samples[i] = noise_amp * rng.gaussian();
  // one burst over the middle quarter, so the median frame energy stays at
  // the noise floor and the adaptive threshold finds the burst
  size_t burst_lo = 3 * n / 8, burst_hi = 5 * n / 8;
  for (size_t i = burst_lo; i < burst_hi; ++i)
    w.samples[i] += 0.3 * rng.sign() * std::min(1.0, rng.exponential() / 3.0);
  return w;
}

struct Corpus {
  std::vector<RecordingInput> inputs;
  PipelineExternal ext;
};

// 10 recordings wired to trip specific gates:
//   2 too short, 3 with out-of-vocabulary transcripts (non-English),
//   1 unreadable file, 4 clean.
Corpus build_corpus(const testutil::TempDir& dir) {
  Corpus c;
  c.ext.designators = callsign::load_designators(std::string("SWR\tswiss\nRYR\tryanair\n"));

  auto add_wav = [&](const std::string& id, const Waveform& w) {
    std::string path = dir.str(id + ".wav");
    write_wav(path, w);
    c.inputs.push_back({id, path});
  };

  std::string cnet_lines;
  auto add_cnet = [&](const std::string& id, const std::string& words) {
    std::istringstream in(words);
    std::string tok;
    double t = 0.5;
    while (in >> tok) {
      cnet_lines += id + " A " + std::to_string(t) + " 0.20 " + tok + " 0.900\n";
      t += 0.25;
    }
  };

  for (int i = 0; i < 2; ++i)
    add_wav("SHRT_rec" + std::to_string(i), make_speech(0.4, 100 + i));
  for (int i = 0; i < 3; ++i) {
    std::string id = "XLNG_rec" + std::to_string(i);
    add_wav(id, make_speech(4.0, 200 + i));
    add_cnet(id, "zzq qqx wrbl xyzzy");  // nothing in vocabulary
  }
  for (int i = 0; i < 4; ++i) {
    std::string id = "LKPR_rec" + std::to_string(i);
    add_wav(id, make_speech(4.0, 300 + i));
    add_cnet(id, "swiss two six eight nine descend flight level one two zero");
  }
  c.inputs.push_back({"BRKN_rec0", dir.str("missing.wav")});

  c.ext.cnets.clear();
  for (auto& net : formats::parse_cnet(cnet_lines)) c.ext.cnets[net.wav_id].push_back(net);
  return c;
}

PipelineConfig config() {
  PipelineConfig cfg;
  cfg.settings.min_audio_len = 1.0;
  cfg.settings.max_audio_len = 120.0;
  cfg.settings.min_snr = -5.0;
  cfg.settings.min_english_score = 0.5;
  cfg.seed = 7;
  return cfg;
}

}  // namespace

TEST_CASE("empty input set gives an all-zero report") {
  PipelineExternal ext;
  PipelineResult result = run_pipeline({}, ext, config());
  CHECK(result.report.input_count == 0);
  CHECK(result.report.processed_count == 0);
  CHECK(result.report.total_rejected() == 0);
  CHECK(result.report.selected_for_annotation_count == 0);
  std::string rendered = dataflow_report(result.report);
  CHECK(rendered.find("input recordings: 0") != std::string::npos);
}

TEST_CASE("gate-tripping corpus lands each recording in one terminal state") {
  testutil::TempDir dir("atcdp_pipe");
  Corpus corpus = build_corpus(dir);
  PipelineResult result = run_pipeline(corpus.inputs, corpus.ext, config());

  const PipelineReport& r = result.report;
  CHECK(r.input_count == 10);
  CHECK(r.processed_count == 4);

  std::map<std::string, long> reasons(r.rejected.begin(), r.rejected.end());
  CHECK(reasons["too_short"] == 2);
  CHECK(reasons["non_english"] == 3);
  CHECK(reasons["io_error"] == 1);
  CHECK(reasons["too_long"] == 0);
  CHECK(reasons["low_snr"] == 0);

  // conservation
  CHECK(r.input_count == r.processed_count + r.total_rejected());

  // every outcome is terminal exactly once
  for (const auto& o : result.outcomes) CHECK(o.processed == o.reject_reason.empty());
}

TEST_CASE("processed recordings carry annotation, metadata and score") {
  testutil::TempDir dir("atcdp_meta");
  Corpus corpus = build_corpus(dir);
  PipelineResult result = run_pipeline(corpus.inputs, corpus.ext, config());

  for (const auto& o : result.outcomes) {
    if (!o.processed) continue;
    CHECK(o.wav_id.substr(0, 4) == "LKPR");
    CHECK(o.meta.airport == "LKPR");
    CHECK(!o.doc.segments.empty());
    CHECK(o.meta.meta.audio_len == Catch::Approx(4.0).margin(0.01));
    CHECK(o.meta.meta.speech_len > 0.0);
    CHECK(o.meta.meta.lid_score >= 0.5);
    CHECK(o.meta.meta.wrd_cnt == 11.0);
    CHECK(o.score > 0.0);

    // the text stage tagged the spoken callsign
    bool has_callsign = false;
    for (const auto& seg : o.doc.segments)
      if (seg.text.find("[#callsign]") != std::string::npos) has_callsign = true;
    CHECK(has_callsign);
  }
}

TEST_CASE("length gates use the configured thresholds") {
  testutil::TempDir dir("atcdp_len");
  PipelineExternal ext;
  std::vector<RecordingInput> inputs;
  write_wav(dir.str("a.wav"), make_speech(0.5, 1));
  write_wav(dir.str("b.wav"), make_speech(3.0, 2));
  inputs.push_back({"a", dir.str("a.wav")});
  inputs.push_back({"b", dir.str("b.wav")});

  PipelineConfig cfg = config();
  cfg.settings.min_audio_len = 1.0;
  cfg.settings.max_audio_len = 2.0;
  PipelineResult result = run_pipeline(inputs, ext, cfg);
  std::map<std::string, long> reasons(result.report.rejected.begin(), result.report.rejected.end());
  CHECK(reasons["too_short"] == 1);
  CHECK(reasons["too_long"] == 1);
  CHECK(result.report.processed_count == 0);
}

TEST_CASE("silence is rejected for low SNR") {
  testutil::TempDir dir("atcdp_snr");
  PipelineExternal ext;
  Waveform silence;
  silence.sample_rate = 16000;
  silence.samples.assign(32000, 0.0);
  write_wav(dir.str("quiet.wav"), silence);
  PipelineResult result = run_pipeline({{"quiet", dir.str("quiet.wav")}}, ext, config());
  std::map<std::string, long> reasons(result.report.rejected.begin(), result.report.rejected.end());
  CHECK(reasons["low_snr"] == 1);
}

TEST_CASE("recordings without a confusion network are processed and flagged") {
  testutil::TempDir dir("atcdp_nocnet");
  PipelineExternal ext;
  write_wav(dir.str("solo.wav"), make_speech(3.0, 42));
  PipelineResult result = run_pipeline({{"solo", dir.str("solo.wav")}}, ext, config());
  REQUIRE(result.report.processed_count == 1);
  const RecordingOutcome& o = result.outcomes[0];
  CHECK(o.no_cnet);
  CHECK(o.meta.meta.lid_score == 0.0);
  CHECK(o.meta.meta.wrd_cnt == 0.0);
  CHECK(!o.doc.segments.empty());
}

TEST_CASE("external RTTM drives speaker segments and count") {
  testutil::TempDir dir("atcdp_rttm");
  Corpus corpus;
  corpus.ext.designators = callsign::load_designators(std::string("SWR\tswiss\n"));
  write_wav(dir.str("two.wav"), make_speech(4.0, 77));
  corpus.inputs.push_back({"two", dir.str("two.wav")});
  corpus.ext.rttm["two"] = formats::parse_rttm(
      std::string("SPEAKER two 1 0.20 1.50 <NA> <NA> A <NA> <NA>\n"
                  "SPEAKER two 1 2.00 1.80 <NA> <NA> B <NA> <NA>\n"));

  PipelineResult result = run_pipeline(corpus.inputs, corpus.ext, config());
  REQUIRE(result.report.processed_count == 1);
  const RecordingOutcome& o = result.outcomes[0];
  REQUIRE(o.doc.segments.size() == 2);
  CHECK(o.doc.segments[0].speaker == "A");
  CHECK(o.doc.segments[1].speaker == "B");
  CHECK(o.meta.meta.num_spk == 2.0);
}

TEST_CASE("two seeded runs produce byte-identical outputs") {
  testutil::TempDir dir("atcdp_det");
  Corpus corpus = build_corpus(dir);
  PipelineConfig cfg = config();
  cfg.policy.random_target_hours = 0.002;  // forces the seeded draw

  testutil::TempDir out_a("atcdp_out_a");
  testutil::TempDir out_b("atcdp_out_b");
  PipelineResult ra = run_pipeline(corpus.inputs, corpus.ext, cfg);
  PipelineResult rb = run_pipeline(corpus.inputs, corpus.ext, cfg);
  write_outputs(out_a.str(), ra);
  write_outputs(out_b.str(), rb);

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  for (const char* name : {"report.txt", "report.json", "selection.tsv", "metadata.jsonl",
                           "vad.rttm"}) {
    CHECK(slurp(out_a.str(name)) == slurp(out_b.str(name)));
  }
  CHECK(dataflow_report(ra.report) == dataflow_report(rb.report));
}

TEST_CASE("parallel execution matches the sequential run") {
  testutil::TempDir dir("atcdp_par");
  Corpus corpus = build_corpus(dir);
  PipelineConfig seq = config();
  PipelineConfig par = config();
  par.jobs = 4;
  PipelineResult a = run_pipeline(corpus.inputs, corpus.ext, seq);
  PipelineResult b = run_pipeline(corpus.inputs, corpus.ext, par);
  CHECK(dataflow_report(a.report) == dataflow_report(b.report));
  REQUIRE(a.outcomes.size() == b.outcomes.size());
  for (size_t i = 0; i < a.outcomes.size(); ++i) {
    CHECK(a.outcomes[i].wav_id == b.outcomes[i].wav_id);
    CHECK(a.outcomes[i].processed == b.outcomes[i].processed);
    CHECK(formats::write_annotation_xml(a.outcomes[i].doc) ==
          formats::write_annotation_xml(b.outcomes[i].doc));
  }
}

TEST_CASE("disabled gates pass everything with zero rejections") {
  testutil::TempDir dir("atcdp_open");
  Corpus corpus = build_corpus(dir);
  PipelineConfig cfg = config();
  cfg.settings.min_audio_len = 0.0;
  cfg.settings.max_audio_len = 1e9;
  cfg.settings.min_snr = -1e9;
  cfg.settings.min_english_score = 0.0;
  PipelineResult result = run_pipeline(corpus.inputs, corpus.ext, cfg);
  std::map<std::string, long> reasons(result.report.rejected.begin(), result.report.rejected.end());
  CHECK(reasons["too_short"] == 0);
  CHECK(reasons["too_long"] == 0);
  CHECK(reasons["low_snr"] == 0);
  CHECK(reasons["non_english"] == 0);
  CHECK(reasons["io_error"] == 1);  // the unreadable file still fails
  CHECK(result.report.processed_count == 9);
}

TEST_CASE("surveillance context enables matching and boosting lists") {
  testutil::TempDir dir("atcdp_ctx");
  Corpus corpus = build_corpus(dir);
  callsign::SurveillanceContext ctx;
  ctx.callsigns.push_back(callsign::entry_from_code("SWR2689", corpus.ext.designators));
  ctx.callsigns.push_back(callsign::entry_from_code("RYR89P", corpus.ext.designators));
  corpus.ext.context = ctx;

  PipelineResult result = run_pipeline(corpus.inputs, corpus.ext, config());
  bool matched = false;
  for (const auto& o : result.outcomes) {
    if (!o.processed) continue;
    CHECK(!o.boost_ngrams.empty());
    for (const auto& [seg, match] : o.matches) {
      matched = true;
      CHECK(match.icao_code == "SWR2689");
      CHECK(match.distance == 0);
    }
  }
  CHECK(matched);
}

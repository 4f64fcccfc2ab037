#include <doctest.h>

#include <cmath>

#include "diafuse/corpus_io.hpp"
#include "diafuse/error.hpp"
#include "diafuse/pipeline.hpp"
#include "diafuse/synth.hpp"
#include "test_util.hpp"

using namespace diafuse;

TEST_CASE("subsegment tiles long segments") {
  const SegmentList segs = {{"r", 0.0, 3.0, ""}};
  const auto out = subsegment(segs, {});
  REQUIRE(out.size() == 3);
  CHECK(out[0].start == doctest::Approx(0.0));
  CHECK(out[0].end == doctest::Approx(1.5));
  CHECK(out[1].start == doctest::Approx(0.75));
  CHECK(out[1].end == doctest::Approx(2.25));
  CHECK(out[2].start == doctest::Approx(1.5));
  CHECK(out[2].end == doctest::Approx(3.0));
}

TEST_CASE("subsegment passes short segments through") {
  const SegmentList segs = {{"r", 0.0, 1.0, ""}};
  const auto out = subsegment(segs, {});
  REQUIRE(out.size() == 1);
  CHECK(out[0].start == doctest::Approx(0.0));
  CHECK(out[0].end == doctest::Approx(1.0));
}

TEST_CASE("subsegment right-aligns the final window") {
  const SegmentList segs = {{"r", 0.0, 1.6, ""}};
  const auto out = subsegment(segs, {});
  REQUIRE(out.size() == 2);
  CHECK(out[0].start == doctest::Approx(0.0));
  CHECK(out[0].end == doctest::Approx(1.5));
  CHECK(out[1].start == doctest::Approx(0.1));
  CHECK(out[1].end == doctest::Approx(1.6));
}

TEST_CASE("merge_adjacent bridges small gaps only") {
  const Diarization d{"r", {{"A", 0.0, 1.0}, {"A", 1.1, 2.0}}};
  const auto merged = merge_adjacent(d, 0.25);
  REQUIRE(merged.turns.size() == 1);
  CHECK(merged.turns[0].start == doctest::Approx(0.0));
  CHECK(merged.turns[0].end == doctest::Approx(2.0));

  const Diarization mixed{"r", {{"A", 0.0, 1.0}, {"B", 1.1, 2.0}}};
  CHECK(merge_adjacent(mixed, 0.25).turns.size() == 2);

  const Diarization wide{"r", {{"A", 0.0, 1.0}, {"A", 2.0, 3.0}}};
  CHECK(merge_adjacent(wide, 0.25).turns.size() == 2);
}

TEST_CASE("merge_adjacent is idempotent") {
  Rng rng(91);
  for (int iter = 0; iter < 50; ++iter) {
    const auto d = testutil::random_diarization(rng, "r");
    const auto once = merge_adjacent(d, 0.25);
    const auto twice = merge_adjacent(once, 0.25);
    CHECK(testutil::same_diarization_ms(once, twice));
  }
}

namespace {

// Antipodal blocks: zero cross affinity.
std::pair<SegmentList, EmbeddingSet> block_input() {
  SegmentList segs;
  Matrix rows(6, 2);
  for (int i = 0; i < 6; ++i) {
    segs.push_back(Segment{"rec", i * 1.0, i * 1.0 + 0.9, ""});
    if (i < 3)
      rows.row(i) << 1, 0;
    else
      rows.row(i) << -1, 0;
  }
  return {segs, EmbeddingSet{rows}};
}

}  // namespace

TEST_CASE("diarize labels antipodal blocks consistently") {
  const auto [segs, emb] = block_input();
  const auto report = diarize(segs, emb, std::nullopt, std::nullopt, {});
  CHECK(report.num_speakers == 2);
  // First speaker by appearance is spk0 covering [0, 2.9] after merging.
  REQUIRE(report.diarization.turns.size() == 2);
  CHECK(report.diarization.turns[0].speaker == "spk0");
  CHECK(report.diarization.turns[0].start == doctest::Approx(0.0));
  CHECK(report.diarization.turns[0].end == doctest::Approx(2.9));
  CHECK(report.diarization.turns[1].speaker == "spk1");
}

TEST_CASE("diarize single segment") {
  const SegmentList segs = {{"rec", 0.0, 1.0, ""}};
  Matrix rows(1, 2);
  rows << 1, 0;
  const auto report = diarize(segs, {rows}, std::nullopt, std::nullopt, {});
  CHECK(report.num_speakers == 1);
  REQUIRE(report.diarization.turns.size() == 1);
  CHECK(report.diarization.turns[0].speaker == "spk0");
}

TEST_CASE("diarize preserves speech time (merge_gap 0)") {
  SynthSpec spec;
  spec.seed = 5;
  spec.duration = 30;
  const auto conv = gen_conversation(spec);
  PipelineConfig cfg;
  cfg.merge_gap = 0.0;
  const auto report = diarize(conv.segments, conv.embeddings, std::nullopt, std::nullopt, cfg);
  Diarization input_cover{"rec", {}};
  for (const auto& s : conv.segments) input_cover.turns.push_back({"x", s.start, s.end});
  CHECK(report.diarization.speech_duration() ==
        doctest::Approx(input_cover.speech_duration()).epsilon(1e-9));
}

TEST_CASE("diarize warns when evidence has no enabled modality") {
  const auto [segs, emb] = block_input();
  VisualEvidence v = {{0.0, 6.0, "f0", 1.0}};
  PipelineConfig cfg;  // audio only
  const auto report = diarize(segs, emb, v, std::nullopt, cfg);
  REQUIRE(report.warnings.size() == 1);
  // Evidence ignored: identical result to the audio-only run.
  const auto base = diarize(segs, emb, std::nullopt, std::nullopt, cfg);
  CHECK(emit_rttm(report.diarization) == emit_rttm(base.diarization));
  CHECK(report.must_links == 0);
}

TEST_CASE("disabling a modality equals passing empty evidence") {
  SynthSpec spec;
  spec.seed = 9;
  spec.duration = 20;
  spec.sep = 0.4;
  spec.noise = 0.35;
  const auto conv = gen_conversation(spec);
  PipelineConfig enabled;
  enabled.modalities = {Modality::audio, Modality::visual, Modality::textual};
  const auto with_empty =
      diarize(conv.segments, conv.embeddings, VisualEvidence{}, TextualEvidence{}, enabled);
  PipelineConfig audio_only;
  const auto without =
      diarize(conv.segments, conv.embeddings, std::nullopt, std::nullopt, audio_only);
  CHECK(emit_rttm(with_empty.diarization) == emit_rttm(without.diarization));
}

TEST_CASE("diarize with ground-truth visual constraints recovers the truth") {
  SynthSpec spec;
  spec.seed = 13;
  spec.duration = 40;
  spec.sep = 0.3;
  spec.noise = 0.4;  // hard acoustics
  const auto conv = gen_conversation(spec);
  PipelineConfig cfg;
  cfg.modalities = {Modality::audio, Modality::visual};
  const auto report = diarize(conv.segments, conv.embeddings, conv.visual, std::nullopt, cfg);
  const auto der = compute_der(conv.truth, report.diarization, {});
  CHECK(der.der() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("diarize is deterministic") {
  SynthSpec spec;
  spec.seed = 15;
  spec.duration = 25;
  spec.noise = 0.3;
  const auto conv = gen_conversation(spec);
  PipelineConfig cfg;
  cfg.modalities = {Modality::audio, Modality::visual, Modality::textual};
  const auto a = diarize(conv.segments, conv.embeddings, conv.visual, conv.textual, cfg);
  const auto b = diarize(conv.segments, conv.embeddings, conv.visual, conv.textual, cfg);
  CHECK(emit_rttm(a.diarization) == emit_rttm(b.diarization));
  CHECK(a.eigenvalues == b.eigenvalues);
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "diafuse/cluster.hpp"
#include "diafuse/corpus_io.hpp"
#include "diafuse/error.hpp"
#include "diafuse/fusion.hpp"
#include "diafuse/metrics.hpp"
#include "diafuse/pipeline.hpp"
#include "diafuse/synth.hpp"
#include "diafuse/verify.hpp"

namespace py = pybind11;
using namespace diafuse;

namespace {

using PyTurn = std::tuple<std::string, double, double>;
using PySegment = std::tuple<double, double>;
using PyFace = std::tuple<double, double, std::string, double>;
using PyText = std::tuple<double, std::string, double>;

Diarization to_diarization(const std::vector<PyTurn>& turns, const std::string& recording) {
  Diarization d;
  d.recording = recording;
  for (const auto& [spk, start, end] : turns) d.turns.push_back(Turn{spk, start, end});
  d.normalize();
  return d;
}

std::vector<PyTurn> from_diarization(const Diarization& d) {
  std::vector<PyTurn> out;
  for (const auto& t : d.turns) out.emplace_back(t.speaker, t.start, t.end);
  return out;
}

TextEventKind kind_from_string(const std::string& s) {
  if (s == "turn_change") return TextEventKind::turn_change;
  if (s == "dialogue_on") return TextEventKind::dialogue_on;
  if (s == "dialogue_off") return TextEventKind::dialogue_off;
  throw Error(errc::unknown_kind, "unknown kind '" + s + "'");
}

Transcript to_transcript(const std::map<std::string, std::vector<std::string>>& m) {
  Transcript out;
  for (const auto& [spk, words] : m) out.push_back(SpeakerTranscript{spk, words});
  return out;
}

}  // namespace

PYBIND11_MODULE(_diafuse, m) {
  m.doc() = "Multimodal speaker diarization: constrained spectral clustering with "
            "constraint propagation, plus verification and diarization metrics.";
  m.attr("__version__") = "0.1.0";

  py::register_exception<Error>(m, "DiafuseError");

  // ---- corpus io ----
  m.def(
      "parse_rttm",
      [](const std::string& text) {
        std::map<std::string, std::vector<PyTurn>> out;
        for (const auto& d : parse_rttm(text)) out[d.recording] = from_diarization(d);
        return out;
      },
      py::arg("text"), "Parse RTTM text into {recording: [(speaker, start, end), ...]}.");
  m.def(
      "emit_rttm",
      [](const std::string& recording, const std::vector<PyTurn>& turns) {
        return emit_rttm(to_diarization(turns, recording));
      },
      py::arg("recording"), py::arg("turns"));

  // ---- verification ----
  m.def("cosine_score", &cosine_score, py::arg("a"), py::arg("b"));
  m.def("asnorm_score", &asnorm_score, py::arg("raw"), py::arg("enroll_cohort"),
        py::arg("test_cohort"), py::arg("top_k") = 300);
  m.def(
      "eer",
      [](const std::vector<double>& scores, const std::vector<bool>& labels) {
        if (scores.size() != labels.size())
          throw Error(errc::dimension_mismatch, "scores and labels differ in length");
        TrialScoreSet trials;
        for (size_t i = 0; i < scores.size(); ++i) trials.push_back({scores[i], labels[i]});
        return compute_eer(trials);
      },
      py::arg("scores"), py::arg("labels"),
      "Returns (eer, threshold) for target=True / nontarget=False labels.");
  m.def(
      "min_dcf",
      [](const std::vector<double>& scores, const std::vector<bool>& labels, double p_target,
         double c_miss, double c_fa) {
        if (scores.size() != labels.size())
          throw Error(errc::dimension_mismatch, "scores and labels differ in length");
        TrialScoreSet trials;
        for (size_t i = 0; i < scores.size(); ++i) trials.push_back({scores[i], labels[i]});
        VerificationConfig cfg;
        cfg.p_target = p_target;
        cfg.c_miss = c_miss;
        cfg.c_fa = c_fa;
        return compute_min_dcf(trials, cfg);
      },
      py::arg("scores"), py::arg("labels"), py::arg("p_target") = 0.01, py::arg("c_miss") = 1.0,
      py::arg("c_fa") = 1.0);

  // ---- clustering ----
  m.def(
      "build_affinity",
      [](const Matrix& embeddings, std::optional<double> prune_percentile) {
        ClusterConfig cfg;
        cfg.prune_percentile = prune_percentile;
        return build_affinity(EmbeddingSet{embeddings}, cfg).mat();
      },
      py::arg("embeddings"), py::arg("prune_percentile") = py::none(),
      "(1 + cosine)/2 affinity between unit-norm embedding rows.");
  m.def(
      "laplacian_eigenvalues",
      [](const Matrix& w) { return eig_laplacian(AffinityMatrix(w)).values; }, py::arg("w"));
  m.def(
      "estimate_k",
      [](const std::vector<double>& eigenvalues, int max_speakers, int min_k) {
        ClusterConfig cfg;
        cfg.max_speakers = max_speakers;
        cfg.eigengap_min_k = min_k;
        return estimate_k(eigenvalues, cfg);
      },
      py::arg("eigenvalues"), py::arg("max_speakers") = 15, py::arg("min_k") = 2);
  m.def(
      "spectral_cluster",
      [](const Matrix& w, std::optional<int> k, int max_speakers, uint64_t seed, int restarts) {
        ClusterConfig cfg;
        cfg.max_speakers = max_speakers;
        cfg.kmeans_seed = seed;
        cfg.kmeans_restarts = restarts;
        return spectral_cluster(AffinityMatrix(w), k, cfg).ids;
      },
      py::arg("w"), py::arg("k") = py::none(), py::arg("max_speakers") = 15, py::arg("seed") = 7,
      py::arg("restarts") = 10);
  m.def(
      "ahc",
      [](const Matrix& embeddings, double threshold) {
        ClusterConfig cfg;
        cfg.ahc_threshold = threshold;
        return ahc_cluster(EmbeddingSet{embeddings}, cfg).ids;
      },
      py::arg("embeddings"), py::arg("threshold") = 0.7,
      "Average-linkage agglomeration on cosine distance.");
  m.def("adjusted_rand_index", &adjusted_rand_index, py::arg("a"), py::arg("b"));

  // ---- constraint fusion ----
  m.def(
      "e2cp_propagate",
      [](const Matrix& w, const Matrix& z, double alpha) {
        FusionConfig cfg;
        cfg.alpha = alpha;
        return e2cp_propagate(AffinityMatrix(w), ConstraintMatrix(z), cfg).f;
      },
      py::arg("w"), py::arg("z"), py::arg("alpha") = 0.25,
      "Closed-form constraint propagation over the affinity graph.");
  m.def(
      "adjust_affinity",
      [](const Matrix& w, const Matrix& f) {
        return adjust_affinity(AffinityMatrix(w), PropagatedConstraints{f}).mat();
      },
      py::arg("w"), py::arg("f"));

  // ---- pipeline ----
  m.def(
      "subsegment",
      [](const std::vector<PySegment>& segments, double window, double shift) {
        PipelineConfig cfg;
        cfg.window = window;
        cfg.shift = shift;
        SegmentList segs;
        for (const auto& [s, e] : segments) segs.push_back(Segment{"rec", s, e, ""});
        std::vector<PySegment> out;
        for (const auto& s : subsegment(segs, cfg)) out.emplace_back(s.start, s.end);
        return out;
      },
      py::arg("segments"), py::arg("window") = 1.5, py::arg("shift") = 0.75);
  m.def(
      "diarize",
      [](const std::vector<PySegment>& segments, const Matrix& embeddings,
         const std::optional<std::vector<PyFace>>& visual,
         const std::optional<std::vector<PyText>>& textual, double alpha, double merge_gap,
         int max_speakers, uint64_t seed, const std::string& recording) {
        SegmentList segs;
        for (const auto& [s, e] : segments) segs.push_back(Segment{recording, s, e, ""});
        PipelineConfig cfg;
        cfg.fusion.alpha = alpha;
        cfg.merge_gap = merge_gap;
        cfg.cluster.max_speakers = max_speakers;
        cfg.cluster.kmeans_seed = seed;
        cfg.modalities = {Modality::audio};
        std::optional<VisualEvidence> v;
        if (visual) {
          v.emplace();
          for (const auto& [s, e, cluster, conf] : *visual)
            v->push_back(FaceRecord{s, e, cluster, conf});
          cfg.modalities.insert(Modality::visual);
        }
        std::optional<TextualEvidence> t;
        if (textual) {
          t.emplace();
          for (const auto& [time, kind, conf] : *textual)
            t->push_back(TextRecord{time, kind_from_string(kind), conf});
          cfg.modalities.insert(Modality::textual);
        }
        return from_diarization(diarize(segs, EmbeddingSet{embeddings}, v, t, cfg).diarization);
      },
      py::arg("segments"), py::arg("embeddings"), py::arg("visual") = py::none(),
      py::arg("textual") = py::none(), py::arg("alpha") = 0.25, py::arg("merge_gap") = 0.25,
      py::arg("max_speakers") = 15, py::arg("seed") = 7, py::arg("recording") = "rec",
      "Full pipeline: affinity, optional constraint propagation, spectral "
      "clustering, merge. Returns [(speaker, start, end), ...].");

  // ---- metrics ----
  m.def(
      "der",
      [](const std::vector<PyTurn>& ref, const std::vector<PyTurn>& hyp, double collar) {
        MetricsConfig cfg;
        cfg.collar = collar;
        const auto b = compute_der(to_diarization(ref, "r"), to_diarization(hyp, "r"), cfg);
        py::dict out;
        out["der"] = b.der();
        out["missed"] = b.missed;
        out["false_alarm"] = b.false_alarm;
        out["confusion"] = b.confusion;
        out["scored"] = b.scored;
        return out;
      },
      py::arg("ref"), py::arg("hyp"), py::arg("collar") = 0.25,
      "Diarization error rate breakdown; ref/hyp are [(speaker, start, end), ...].");
  m.def(
      "jer",
      [](const std::vector<PyTurn>& ref, const std::vector<PyTurn>& hyp) {
        return compute_jer(to_diarization(ref, "r"), to_diarization(hyp, "r"));
      },
      py::arg("ref"), py::arg("hyp"));
  m.def(
      "cpwer",
      [](const std::map<std::string, std::vector<std::string>>& ref,
         const std::map<std::string, std::vector<std::string>>& hyp) {
        return cpwer_single(to_transcript(ref), to_transcript(hyp)).cpwer;
      },
      py::arg("ref"), py::arg("hyp"),
      "Concatenated minimum-permutation WER over {speaker: [words...]} maps.");

  // ---- synthetic lab ----
  m.def(
      "gen_conversation",
      [](int speakers, int dim, double sep, double noise, double duration, double turn_mean,
         double evidence_noise_visual, double evidence_noise_textual, uint64_t seed) {
        SynthSpec spec;
        spec.speakers = speakers;
        spec.dim = dim;
        spec.sep = sep;
        spec.noise = noise;
        spec.duration = duration;
        spec.turn_mean = turn_mean;
        spec.evidence_noise_visual = evidence_noise_visual;
        spec.evidence_noise_textual = evidence_noise_textual;
        spec.seed = seed;
        const auto conv = gen_conversation(spec);
        py::dict out;
        std::vector<PySegment> segs;
        for (const auto& s : conv.segments) segs.emplace_back(s.start, s.end);
        out["segments"] = segs;
        out["embeddings"] = conv.embeddings.rows;
        out["truth"] = from_diarization(conv.truth);
        std::vector<PyFace> vis;
        for (const auto& r : conv.visual)
          vis.emplace_back(r.start, r.end, r.face_cluster, r.confidence);
        out["visual"] = vis;
        std::vector<PyText> txt;
        for (const auto& r : conv.textual) {
          const char* kind = r.kind == TextEventKind::turn_change   ? "turn_change"
                             : r.kind == TextEventKind::dialogue_on ? "dialogue_on"
                                                                    : "dialogue_off";
          txt.emplace_back(r.time, kind, r.confidence);
        }
        out["textual"] = txt;
        return out;
      },
      py::arg("speakers") = 3, py::arg("dim") = 64, py::arg("sep") = 1.0,
      py::arg("noise") = 0.1, py::arg("duration") = 60.0, py::arg("turn_mean") = 3.0,
      py::arg("evidence_noise_visual") = 0.0, py::arg("evidence_noise_textual") = 0.0,
      py::arg("seed") = 7);
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diafuse/pipeline.hpp"
#include "diafuse/types.hpp"

namespace diafuse {

struct SynthSpec {
  int speakers = 3;
  int dim = 64;
  double sep = 1.0;    // pairwise centroid separation on the unit sphere, radians
  double noise = 0.1;  // within-speaker angular std
  double duration = 60.0;
  double turn_mean = 3.0;
  double evidence_noise_visual = 0.0;   // probability a record is corrupted
  double evidence_noise_textual = 0.0;
  uint64_t seed = 7;
};

struct SynthEmbeddings {
  EmbeddingSet embeddings;
  Labeling truth;
};

// Speaker centroids along a great circle with exact pairwise separation
// multiples of `sep`; per-sample Gaussian tangent noise, renormalized.
SynthEmbeddings gen_embeddings(const SynthSpec& spec, int per_speaker = 20);

struct Conversation {
  SegmentList segments;  // subsegmented clustering units
  EmbeddingSet embeddings;
  Diarization truth;  // turn-level reference
  VisualEvidence visual;
  TextualEvidence textual;
};

// Alternating-speaker timeline with exponential turn lengths; per-turn face
// tracks and turn-change points, each independently corrupted (drop or flip,
// 50/50) at the configured evidence noise.
Conversation gen_conversation(const SynthSpec& spec, const std::string& recording = "rec000");

// Synthetic speaker-attributed tokens, one per second of speech, attributed
// by whoever the diarization says is talking at that moment.
Transcript tokens_from_timeline(const Diarization& d, double duration);

struct AblationRow {
  std::string method;    // "SC" or "SC+E2CP"
  std::string modality;  // "audio", "audio+visual", ...
  double der = 0.0;
  double jer = 0.0;
  double cpwer = 0.0;
  std::vector<double> per_recording_der;
};

struct AblationReport {
  std::vector<AblationRow> rows;
  std::string table() const;
};

// The four-row ablation (SC on audio, SC+E2CP on each modality combination)
// over n generated recordings with per-recording seeds spec.seed + index.
AblationReport run_ablation(const SynthSpec& spec, int n_recordings,
                            const PipelineConfig& cfg = {}, int jobs = 1);

}  // namespace diafuse

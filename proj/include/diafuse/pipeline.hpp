#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "diafuse/cluster.hpp"
#include "diafuse/fusion.hpp"
#include "diafuse/types.hpp"

namespace diafuse {

enum class Modality { audio, visual, textual };

struct PipelineConfig {
  double window = 1.5;
  double shift = 0.75;
  double merge_gap = 0.25;
  ClusterConfig cluster;
  FusionConfig fusion;
  std::set<Modality> modalities = {Modality::audio};
};

// Tile each segment with `window`-length windows advancing by `shift`; the
// final window is right-aligned to the segment end, segments shorter than
// `window` pass through unchanged.
SegmentList subsegment(const SegmentList& segs, const PipelineConfig& cfg = {});

// Merge consecutive same-speaker turns whose gap is <= `gap`. Idempotent.
Diarization merge_adjacent(const Diarization& d, double gap);

struct DiarizeReport {
  Diarization diarization;
  int num_speakers = 0;
  std::vector<double> eigenvalues;
  long must_links = 0;    // nonzero upper-triangle counts of the merged Z
  long cannot_links = 0;
  std::vector<std::string> warnings;
};

// Embeddings (+ optional evidence) to a speaker-labeled timeline: affinity,
// constraint propagation when evidence is enabled, spectral clustering,
// first-appearance speaker naming, adjacent-segment merging.
DiarizeReport diarize(const SegmentList& segs, const EmbeddingSet& emb,
                      const std::optional<VisualEvidence>& visual,
                      const std::optional<TextualEvidence>& textual,
                      const PipelineConfig& cfg = {});

}  // namespace diafuse

#include "diafuse/pipeline.hpp"

#include <algorithm>
#include <tuple>

#include "diafuse/error.hpp"

namespace diafuse {

SegmentList subsegment(const SegmentList& segs, const PipelineConfig& cfg) {
  if (cfg.window <= 0 || cfg.shift <= 0 || cfg.shift > cfg.window)
    throw Error(errc::invalid_config, "require 0 < shift <= window");
  SegmentList out;
  for (const auto& s : segs) {
    const double len = s.end - s.start;
    if (len <= cfg.window) {
      out.push_back(s);
      continue;
    }
    long i = 0;
    for (;; ++i) {
      const double t = s.start + static_cast<double>(i) * cfg.shift;
      if (t + cfg.window >= s.end - 1e-9) break;
      out.push_back(Segment{s.recording, t, t + cfg.window, s.speaker});
    }
    out.push_back(Segment{s.recording, s.end - cfg.window, s.end, s.speaker});
  }
  std::stable_sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  });
  return out;
}

Diarization merge_adjacent(const Diarization& d, double gap) {
  Diarization out;
  out.recording = d.recording;
  Diarization sorted = d;
  sorted.normalize();
  for (const auto& t : sorted.turns) {
    if (!out.turns.empty() && out.turns.back().speaker == t.speaker &&
        t.start - out.turns.back().end <= gap + 1e-9) {
      out.turns.back().end = std::max(out.turns.back().end, t.end);
    } else {
      out.turns.push_back(t);
    }
  }
  return out;
}

namespace {

struct ClusterOutcome {
  Labeling labeling;
  std::vector<double> eigenvalues;
};

ClusterOutcome cluster_with_spectrum(const AffinityMatrix& w, const ClusterConfig& cfg) {
  const Eigen::Index n = w.size();
  if (n == 1) return {Labeling{{0}, 1}, {0.0}};
  EigResult eig = eig_laplacian(w);
  const int k = estimate_k(eig.values, cfg);
  Labeling lab;
  if (k == 1) {
    lab = Labeling{std::vector<int>(n, 0), 1};
  } else {
    Matrix rows = eig.vectors.leftCols(k);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double norm = rows.row(i).norm();
      if (norm >= 1e-12) rows.row(i) /= norm;
    }
    lab = kmeans(rows, k, cfg);
  }
  return {std::move(lab), std::move(eig.values)};
}

}  // namespace

DiarizeReport diarize(const SegmentList& segs, const EmbeddingSet& emb,
                      const std::optional<VisualEvidence>& visual,
                      const std::optional<TextualEvidence>& textual,
                      const PipelineConfig& cfg) {
  if (segs.empty()) throw Error(errc::empty_input, "no segments to diarize");
  const Eigen::Index n = static_cast<Eigen::Index>(segs.size());
  if (emb.rows.rows() != n)
    throw Error(errc::dimension_mismatch, "embeddings not aligned with segments");
  if (!cfg.modalities.count(Modality::audio))
    throw Error(errc::invalid_config, "audio modality is required");

  DiarizeReport report;

  const AffinityMatrix w = build_affinity(emb, cfg.cluster);
  ConstraintMatrix z = ConstraintMatrix::zeros(n);
  if (visual) {
    if (cfg.modalities.count(Modality::visual)) {
      z = merge_constraints(z, visual_constraints(*visual, segs, cfg.fusion));
    } else {
      report.warnings.push_back("visual evidence supplied but modality not enabled; ignored");
    }
  }
  if (textual) {
    if (cfg.modalities.count(Modality::textual)) {
      z = merge_constraints(z, textual_constraints(*textual, segs, cfg.fusion));
    } else {
      report.warnings.push_back("textual evidence supplied but modality not enabled; ignored");
    }
  }

  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (z.mat()(i, j) > 0) report.must_links++;
      if (z.mat()(i, j) < 0) report.cannot_links++;
    }

  AffinityMatrix working = w;
  if (z.any()) working = adjust_affinity(w, e2cp_propagate(w, z, cfg.fusion));

  ClusterOutcome outcome = cluster_with_spectrum(working, cfg.cluster);
  report.num_speakers = outcome.labeling.k;
  report.eigenvalues = std::move(outcome.eigenvalues);

  // Stable speaker names by first temporal appearance.
  std::vector<int> name_of(outcome.labeling.k, -1);
  int next = 0;
  Diarization d;
  d.recording = segs.front().recording;
  for (size_t i = 0; i < segs.size(); ++i) {
    const int c = outcome.labeling.ids[i];
    if (name_of[c] < 0) name_of[c] = next++;
    d.turns.push_back(Turn{"spk" + std::to_string(name_of[c]), segs[i].start, segs[i].end});
  }
  d.normalize();
  report.diarization = merge_adjacent(d, cfg.merge_gap);
  return report;
}

}  // namespace diafuse

#pragma once

#include "diafuse/cluster.hpp"
#include "diafuse/types.hpp"

namespace diafuse {

struct FusionConfig {
  double alpha = 0.25;              // propagation strength, in [0,1)
  double visual_overlap_min = 0.5;  // minimum coverage to attach a face cluster
  double text_gap_max = 1.0;        // max gap (s) for adjacent-pair constraints
  bool dialogue_gating = true;
};

// Pairwise prior knowledge: +v must-link with confidence v, -v cannot-link,
// 0 unknown. Symmetric, zero diagonal, entries in [-1,1].
class ConstraintMatrix {
 public:
  explicit ConstraintMatrix(Matrix z);
  static ConstraintMatrix zeros(Eigen::Index n);
  const Matrix& mat() const { return z_; }
  Eigen::Index size() const { return z_.rows(); }
  bool any() const { return z_.cwiseAbs().maxCoeff() > 0.0; }

 private:
  Matrix z_;
};

struct PropagatedConstraints {
  Matrix f;
};

// Attach each segment to the face cluster covering >= visual_overlap_min of
// its duration (highest coverage wins); attached pairs become must-links when
// the clusters agree and cannot-links otherwise, weighted by the smaller
// attachment confidence.
ConstraintMatrix visual_constraints(const VisualEvidence& v, const SegmentList& segs,
                                    const FusionConfig& cfg = {});

// Constraints between consecutive segments with gap <= text_gap_max: a
// turn-change point in the boundary window gives a cannot-link at its
// confidence, otherwise a weak must-link of 0.5. With dialogue_gating,
// constraints are emitted only inside dialogue_on/dialogue_off spans.
ConstraintMatrix textual_constraints(const TextualEvidence& t, const SegmentList& segs,
                                     const FusionConfig& cfg = {});

// Elementwise merge: keep the larger-magnitude entry when signs agree or one
// side is 0; conflicting signs abstain to 0.
ConstraintMatrix merge_constraints(const ConstraintMatrix& a, const ConstraintMatrix& b);

// E2CP closed form: with Lbar = D^{-1/2} W D^{-1/2},
//   F = (1-alpha)^2 (I - alpha Lbar)^{-1} Z (I - alpha Lbar)^{-1},
// clamped to [-1,1] with zero diagonal. (I - alpha Lbar) is invertible since
// the spectral radius of alpha*Lbar is at most alpha < 1.
PropagatedConstraints e2cp_propagate(const AffinityMatrix& w, const ConstraintMatrix& z,
                                     const FusionConfig& cfg = {});

// Two-sided adjustment:
//   W'_ij = 1 - (1 - F_ij)(1 - W_ij)   when F_ij >= 0
//   W'_ij = (1 + F_ij) W_ij            when F_ij < 0
// with the diagonal forced back to 1.
AffinityMatrix adjust_affinity(const AffinityMatrix& w, const PropagatedConstraints& f);

}  // namespace diafuse

#include "diafuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "diafuse/error.hpp"

namespace diafuse {

ConstraintMatrix::ConstraintMatrix(Matrix z) {
  if (z.rows() == 0 || z.rows() != z.cols())
    throw Error(errc::invalid_matrix, "constraint matrix must be square and non-empty");
  const Eigen::Index n = z.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(z(i, i)) > 1e-9)
      throw Error(errc::invalid_matrix, "constraint diagonal must be 0");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(z(i, j) - z(j, i)) > 1e-9)
        throw Error(errc::invalid_matrix, "constraint matrix must be symmetric");
      if (std::abs(z(i, j)) > 1.0 + 1e-9)
        throw Error(errc::invalid_matrix, "constraint entries must lie in [-1,1]");
    }
  }
  z_ = ((z + z.transpose()) * 0.5).cwiseMax(-1.0).cwiseMin(1.0);
  z_.diagonal().setZero();
}

ConstraintMatrix ConstraintMatrix::zeros(Eigen::Index n) {
  return ConstraintMatrix(Matrix::Zero(n, n));
}

namespace {

// Measure of the union of [lo,hi) spans clipped to [a,b].
double clipped_union(std::vector<std::pair<double, double>> spans, double a, double b) {
  for (auto& s : spans) {
    s.first = std::max(s.first, a);
    s.second = std::min(s.second, b);
  }
  std::sort(spans.begin(), spans.end());
  double total = 0.0, cur_lo = 0.0, cur_hi = -1.0;
  bool open = false;
  for (const auto& s : spans) {
    if (s.second <= s.first) continue;
    if (!open || s.first > cur_hi) {
      if (open) total += cur_hi - cur_lo;
      cur_lo = s.first;
      cur_hi = s.second;
      open = true;
    } else {
      cur_hi = std::max(cur_hi, s.second);
    }
  }
  if (open) total += cur_hi - cur_lo;
  return total;
}

struct Attachment {
  bool attached = false;
  std::string cluster;
  double confidence = 0.0;
};

}  // namespace

ConstraintMatrix visual_constraints(const VisualEvidence& v, const SegmentList& segs,
                                    const FusionConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(segs.size());
  if (n == 0) throw Error(errc::empty_input, "segment list is empty");

  std::vector<Attachment> att(segs.size());
  for (size_t i = 0; i < segs.size(); ++i) {
    const double a = segs[i].start, b = segs[i].end;
    const double dur = b - a;
    // Per face cluster: covered spans and duration-weighted confidence.
    std::map<std::string, std::vector<std::pair<double, double>>> spans;
    std::map<std::string, std::pair<double, double>> conf_acc;  // (len*conf, len)
    for (const auto& r : v) {
      const double lo = std::max(r.start, a), hi = std::min(r.end, b);
      if (hi <= lo) continue;
      spans[r.face_cluster].emplace_back(lo, hi);
      auto& acc = conf_acc[r.face_cluster];
      acc.first += (hi - lo) * r.confidence;
      acc.second += hi - lo;
    }
    double best_cov = 0.0;
    for (const auto& [cluster, sp] : spans) {
      const double cov = clipped_union(sp, a, b) / dur;
      if (cov < cfg.visual_overlap_min) continue;
      if (cov > best_cov) {  // ties keep the lexicographically smallest cluster
        best_cov = cov;
        att[i].attached = true;
        att[i].cluster = cluster;
        const auto& acc = conf_acc[cluster];
        att[i].confidence = acc.second > 0 ? acc.first / acc.second : 0.0;
      }
    }
  }

  Matrix z = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!att[i].attached) continue;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!att[j].attached) continue;
      const double c = std::min(att[i].confidence, att[j].confidence);
      z(i, j) = z(j, i) = att[i].cluster == att[j].cluster ? c : -c;
    }
  }
  return ConstraintMatrix(z);
}

ConstraintMatrix textual_constraints(const TextualEvidence& t, const SegmentList& segs,
                                     const FusionConfig& cfg) {
  const Eigen::Index n = static_cast<Eigen::Index>(segs.size());
  if (n == 0) throw Error(errc::empty_input, "segment list is empty");

  // Dialogue spans; an unmatched dialogue_on stays open.
  std::vector<std::pair<double, double>> dialogue;
  double open_at = -1.0;
  bool open = false;
  for (const auto& r : t) {
    if (r.kind == TextEventKind::dialogue_on && !open) {
      open = true;
      open_at = r.time;
    } else if (r.kind == TextEventKind::dialogue_off && open) {
      dialogue.emplace_back(open_at, r.time);
      open = false;
    }
  }
  if (open) dialogue.emplace_back(open_at, std::numeric_limits<double>::infinity());

  auto in_dialogue = [&](double x) {
    for (const auto& s : dialogue)
      if (x >= s.first && x <= s.second) return true;
    return false;
  };

  constexpr double kWeakMustLink = 0.5;
  constexpr double kTouchWindow = 0.25;

  Matrix z = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const auto& a = segs[i];
    const auto& b = segs[i + 1];
    const double gap = b.start - a.end;
    if (gap > cfg.text_gap_max) continue;
    double lo, hi;
    if (gap > 0) {
      lo = a.end;
      hi = b.start;
    } else {
      const double mid = 0.5 * (a.end + b.start);
      lo = mid - kTouchWindow;
      hi = mid + kTouchWindow;
    }
    if (cfg.dialogue_gating && !in_dialogue(0.5 * (lo + hi))) continue;
    double change_conf = -1.0;
    for (const auto& r : t)
      if (r.kind == TextEventKind::turn_change && r.time >= lo && r.time <= hi)
        change_conf = std::max(change_conf, r.confidence);
    z(i, i + 1) = z(i + 1, i) = change_conf >= 0 ? -change_conf : kWeakMustLink;
  }
  return ConstraintMatrix(z);
}

ConstraintMatrix merge_constraints(const ConstraintMatrix& a, const ConstraintMatrix& b) {
  if (a.size() != b.size())
    throw Error(errc::dimension_mismatch, "constraint matrices differ in size");
  const Eigen::Index n = a.size();
  Matrix z = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double x = a.mat()(i, j), y = b.mat()(i, j);
      if (x == 0.0)
        z(i, j) = y;
      else if (y == 0.0)
        z(i, j) = x;
      else if ((x > 0) == (y > 0))
        z(i, j) = std::abs(x) >= std::abs(y) ? x : y;
      else
        z(i, j) = 0.0;  // conflicting evidence abstains
    }
  }
  return ConstraintMatrix(z);
}

PropagatedConstraints e2cp_propagate(const AffinityMatrix& w, const ConstraintMatrix& z,
                                     const FusionConfig& cfg) {
  if (w.size() != z.size())
    throw Error(errc::dimension_mismatch, "affinity and constraints differ in size");
  const double alpha = cfg.alpha;
  if (alpha < 0.0 || alpha >= 1.0)
    throw Error(errc::invalid_config, "alpha must lie in [0,1)");
  const Eigen::Index n = w.size();

  const Vector deg = w.mat().rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (deg(i) < 1e-12) throw Error(errc::isolated_node, "node with zero degree");
  const Vector dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  const Matrix lbar = dinv_sqrt.asDiagonal() * w.mat() * dinv_sqrt.asDiagonal();
  const Matrix a = Matrix::Identity(n, n) - alpha * lbar;

  Eigen::LDLT<Matrix> solver(a);
  if (solver.info() != Eigen::Success)
    throw Error(errc::singular_system, "propagation solve failed");

  const Matrix x = solver.solve(z.mat());
  if ((a * x - z.mat()).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(errc::singular_system, "propagation residual too large");
  // Right-side solve via symmetry of (I - alpha Lbar).
  const Matrix f_raw = solver.solve(x.transpose()).transpose();
  if ((f_raw * a - x).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(errc::singular_system, "propagation residual too large");

  Matrix f = (1.0 - alpha) * (1.0 - alpha) * f_raw;
  f = f.cwiseMax(-1.0).cwiseMin(1.0);
  f.diagonal().setZero();
  return PropagatedConstraints{std::move(f)};
}

AffinityMatrix adjust_affinity(const AffinityMatrix& w, const PropagatedConstraints& f) {
  if (w.size() != f.f.rows() || f.f.rows() != f.f.cols())
    throw Error(errc::dimension_mismatch, "affinity and propagated constraints differ in size");
  const Eigen::Index n = w.size();
  Matrix adj(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w.mat()(i, j), fij = f.f(i, j);
      adj(i, j) = fij >= 0 ? 1.0 - (1.0 - fij) * (1.0 - wij) : (1.0 + fij) * wij;
    }
  }
  adj.diagonal().setOnes();
  return AffinityMatrix(adj);
}

}  // namespace diafuse

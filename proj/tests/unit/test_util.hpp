#pragma once

// Shared test helpers: random generators and independent oracles.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <unistd.h>
#include <vector>

#include "diafuse/metrics.hpp"
#include "diafuse/rng.hpp"
#include "diafuse/types.hpp"

namespace testutil {

using diafuse::Diarization;
using diafuse::Matrix;
using diafuse::Rng;
using diafuse::Turn;
using diafuse::Vector;

inline Matrix random_unit_rows(Rng& rng, int n, int d) {
  Matrix m(n, d);
  for (int i = 0; i < n; ++i) {
    Vector v(d);
    do {
      for (int j = 0; j < d; ++j) v(j) = rng.gaussian();
    } while (v.norm() < 1e-9);
    m.row(i) = v.transpose() / v.norm();
  }
  return m;
}

inline Matrix random_affinity(Rng& rng, int n) {
  Matrix w(n, n);
  for (int i = 0; i < n; ++i) {
    w(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) w(i, j) = w(j, i) = rng.uniform();
  }
  return w;
}

inline Matrix random_constraints(Rng& rng, int n, double scale = 1.0) {
  Matrix z = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) z(i, j) = z(j, i) = scale * (2.0 * rng.uniform() - 1.0);
  return z;
}

// Random diarization with times on a 1 ms grid.
inline Diarization random_diarization(Rng& rng, const std::string& rec, int max_speakers = 5,
                                      int max_turns = 12) {
  Diarization d;
  d.recording = rec;
  const int n_turns = 1 + static_cast<int>(rng.integer(max_turns));
  const int n_spk = 1 + static_cast<int>(rng.integer(max_speakers));
  for (int i = 0; i < n_turns; ++i) {
    const long start_ms = static_cast<long>(rng.integer(60000));
    const long dur_ms = 1 + static_cast<long>(rng.integer(5000));
    d.turns.push_back(Turn{"S" + std::to_string(rng.integer(n_spk)),
                           static_cast<double>(start_ms) / 1000.0,
                           static_cast<double>(start_ms + dur_ms) / 1000.0});
  }
  d.normalize();
  return d;
}

inline bool same_diarization_ms(const Diarization& a, const Diarization& b) {
  if (a.recording != b.recording || a.turns.size() != b.turns.size()) return false;
  for (size_t i = 0; i < a.turns.size(); ++i) {
    if (a.turns[i].speaker != b.turns[i].speaker) return false;
    if (diafuse::quantize_ms(a.turns[i].start) != diafuse::quantize_ms(b.turns[i].start))
      return false;
    if (diafuse::quantize_ms(a.turns[i].end) != diafuse::quantize_ms(b.turns[i].end)) return false;
  }
  return true;
}

// Random diarization on a 10 ms grid, for frame-oracle comparisons.
inline Diarization random_diarization_10ms(Rng& rng, const std::string& rec, int n_speakers,
                                           double max_time) {
  Diarization d;
  d.recording = rec;
  const int n_turns = 2 + static_cast<int>(rng.integer(10));
  const long grid = static_cast<long>(max_time * 100.0);
  for (int i = 0; i < n_turns; ++i) {
    const long start = static_cast<long>(rng.integer(grid));
    const long dur = 20 + static_cast<long>(rng.integer(800));  // 0.2 s .. 8 s
    d.turns.push_back(Turn{"S" + std::to_string(rng.integer(n_speakers)),
                           static_cast<double>(start) / 100.0,
                           static_cast<double>(std::min(start + dur, grid)) / 100.0});
  }
  d.turns.erase(std::remove_if(d.turns.begin(), d.turns.end(),
                               [](const Turn& t) { return t.end <= t.start; }),
                d.turns.end());
  if (d.turns.empty()) d.turns.push_back(Turn{"S0", 0.0, 1.0});
  d.normalize();
  return d;
}

// 10 ms frame-counting DER oracle with an exhaustive-permutation speaker
// mapping; independent of the interval implementation.
inline diafuse::DerBreakdown frame_der_oracle(const Diarization& ref, const Diarization& hyp,
                                              double collar) {
  const double frame = 0.01;
  double tmax = 0.0;
  for (const auto& t : ref.turns) tmax = std::max(tmax, t.end);
  for (const auto& t : hyp.turns) tmax = std::max(tmax, t.end);
  tmax += collar + frame;
  const long n = static_cast<long>(tmax / frame) + 1;

  std::vector<std::string> ref_names, hyp_names;
  for (const auto& t : ref.turns)
    if (std::find(ref_names.begin(), ref_names.end(), t.speaker) == ref_names.end())
      ref_names.push_back(t.speaker);
  for (const auto& t : hyp.turns)
    if (std::find(hyp_names.begin(), hyp_names.end(), t.speaker) == hyp_names.end())
      hyp_names.push_back(t.speaker);
  std::sort(ref_names.begin(), ref_names.end());
  std::sort(hyp_names.begin(), hyp_names.end());
  const int nr = static_cast<int>(ref_names.size());
  const int nh = static_cast<int>(hyp_names.size());

  auto active = [&](const Diarization& d, const std::vector<std::string>& names, double t) {
    std::vector<bool> a(names.size(), false);
    for (const auto& turn : d.turns) {
      if (t >= turn.start && t < turn.end) {
        const auto it = std::find(names.begin(), names.end(), turn.speaker);
        a[static_cast<size_t>(it - names.begin())] = true;
      }
    }
    return a;
  };

  // Frame-counted overlap per (hyp, ref) pair, no collar.
  std::vector<std::vector<long>> overlap(nh, std::vector<long>(nr, 0));
  std::vector<std::vector<bool>> ref_act(n), hyp_act(n);
  std::vector<bool> excluded(n, false);
  for (long i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) + 0.5) * frame;
    ref_act[i] = active(ref, ref_names, t);
    hyp_act[i] = active(hyp, hyp_names, t);
    for (int h = 0; h < nh; ++h)
      if (hyp_act[i][h])
        for (int r = 0; r < nr; ++r)
          if (ref_act[i][r]) overlap[h][r]++;
    for (const auto& turn : ref.turns) {
      if ((t >= turn.start - collar && t <= turn.start + collar) ||
          (t >= turn.end - collar && t <= turn.end + collar))
        excluded[i] = true;
    }
  }

  // Exhaustive max-overlap injective mapping hyp -> ref.
  const int m = std::max(nr, nh);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_map(nh, -1);
  long best_total = -1;
  do {
    long total = 0;
    for (int h = 0; h < nh && h < m; ++h) {
      const int r = perm[h];
      if (h < nh && r < nr) total += overlap[h][r];
    }
    if (total > best_total) {
      best_total = total;
      for (int h = 0; h < nh; ++h) best_map[h] = perm[h] < nr ? perm[h] : -1;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (int h = 0; h < nh; ++h)
    if (best_map[h] >= 0 && overlap[h][best_map[h]] == 0) best_map[h] = -1;

  diafuse::DerBreakdown out;
  for (long i = 0; i < n; ++i) {
    if (excluded[i]) continue;
    int n_ref = 0, n_hyp = 0, n_correct = 0;
    for (int r = 0; r < nr; ++r) n_ref += ref_act[i][r] ? 1 : 0;
    for (int h = 0; h < nh; ++h) n_hyp += hyp_act[i][h] ? 1 : 0;
    for (int h = 0; h < nh; ++h)
      if (hyp_act[i][h] && best_map[h] >= 0 && ref_act[i][best_map[h]]) n_correct++;
    out.scored += frame * n_ref;
    out.missed += frame * std::max(0, n_ref - n_hyp);
    out.false_alarm += frame * std::max(0, n_hyp - n_ref);
    out.confusion += frame * (std::min(n_ref, n_hyp) - n_correct);
  }
  return out;
}

// Two-stage iterative propagation oracle: vertical pass to convergence, then
// horizontal pass, then the same clamp and diagonal zeroing as the closed
// form.
inline Matrix e2cp_iterative_oracle(const Matrix& w, const Matrix& z, double alpha,
                                    double tol = 1e-12) {
  const Eigen::Index n = w.rows();
  const Vector deg = w.rowwise().sum();
  const Vector dinv = deg.cwiseSqrt().cwiseInverse();
  const Matrix lbar = dinv.asDiagonal() * w * dinv.asDiagonal();

  Matrix fv = Matrix::Zero(n, n);
  for (int it = 0; it < 200000; ++it) {
    const Matrix next = alpha * lbar * fv + (1.0 - alpha) * z;
    const double delta = (next - fv).cwiseAbs().maxCoeff();
    fv = next;
    if (delta < tol) break;
  }
  Matrix f = Matrix::Zero(n, n);
  for (int it = 0; it < 200000; ++it) {
    const Matrix next = alpha * f * lbar + (1.0 - alpha) * fv;
    const double delta = (next - f).cwiseAbs().maxCoeff();
    f = next;
    if (delta < tol) break;
  }
  f = f.cwiseMax(-1.0).cwiseMin(1.0);
  f.diagonal().setZero();
  return f;
}

// Recounting sweep helpers used by the EER/minDCF oracles.
inline std::pair<double, double> far_frr_at(const diafuse::TrialScoreSet& trials, double thr) {
  long nt = 0, nn = 0, fa = 0, fr = 0;
  for (const auto& t : trials) {
    if (t.target) {
      nt++;
      if (t.score < thr) fr++;
    } else {
      nn++;
      if (t.score >= thr) fa++;
    }
  }
  return {static_cast<double>(fa) / nn, static_cast<double>(fr) / nt};
}

inline double brute_eer(const diafuse::TrialScoreSet& trials) {
  std::set<double> thresholds;
  for (const auto& t : trials) thresholds.insert(t.score);
  std::vector<std::pair<double, double>> pts;  // (far, frr), descending threshold
  pts.emplace_back(0.0, 1.0);
  std::vector<double> desc(thresholds.rbegin(), thresholds.rend());
  for (double thr : desc) pts.push_back(far_frr_at(trials, thr));
  for (size_t i = 1; i < pts.size(); ++i) {
    const auto [far, frr] = pts[i];
    if (far < frr) continue;
    if (far == frr) return far;
    const auto [pfar, pfrr] = pts[i - 1];
    const double s = (pfrr - pfar) / ((far - pfar) + (pfrr - frr));
    return pfar + s * (far - pfar);
  }
  return 0.5;
}

inline double brute_min_dcf(const diafuse::TrialScoreSet& trials, double p_target,
                            double c_miss, double c_fa) {
  std::set<double> thresholds;
  for (const auto& t : trials) thresholds.insert(t.score);
  const double wm = p_target * c_miss;
  const double wf = (1.0 - p_target) * c_fa;
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double pmiss, double pfa) {
    best = std::min(best, (wm * pmiss + wf * pfa) / std::min(wm, wf));
  };
  consider(1.0, 0.0);
  consider(0.0, 1.0);
  for (double thr : thresholds) {
    const auto [far, frr] = far_frr_at(trials, thr);
    consider(frr, far);
  }
  return best;
}

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("diafuse_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil

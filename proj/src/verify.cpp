#include "diafuse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diafuse/error.hpp"

namespace diafuse {

double cosine_score(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw Error(errc::dimension_mismatch, "embedding dimensions differ");
  return a.dot(b);
}

namespace {

// Mean/population-std of the top-k largest values.
std::pair<double, double> top_k_stats(std::vector<double> cohort, int top_k) {
  const size_t k = std::min(cohort.size(), static_cast<size_t>(std::max(top_k, 1)));
  std::partial_sort(cohort.begin(), cohort.begin() + k, cohort.end(), std::greater<double>());
  double mean = 0.0;
  for (size_t i = 0; i < k; ++i) mean += cohort[i];
  mean /= k;
  double var = 0.0;
  for (size_t i = 0; i < k; ++i) var += (cohort[i] - mean) * (cohort[i] - mean);
  var /= k;
  return {mean, std::sqrt(var)};
}

}  // namespace

double asnorm_score(double raw, const std::vector<double>& enroll_cohort,
                    const std::vector<double>& test_cohort, int top_k) {
  if (enroll_cohort.empty() || test_cohort.empty())
    throw Error(errc::empty_input, "cohorts must be non-empty");
  const auto [me, se] = top_k_stats(enroll_cohort, top_k);
  const auto [mt, st] = top_k_stats(test_cohort, top_k);
  if (se < 1e-12 || st < 1e-12)
    throw Error(errc::degenerate_cohort, "selected cohort has zero variance");
  return 0.5 * ((raw - me) / se + (raw - mt) / st);
}

std::vector<OperatingPoint> roc_points(const TrialScoreSet& trials) {
  long n_target = 0, n_nontarget = 0;
  for (const auto& t : trials) (t.target ? n_target : n_nontarget)++;
  if (n_target == 0 || n_nontarget == 0)
    throw Error(errc::missing_class, "need at least one target and one nontarget trial");

  std::vector<TrialScore> sorted(trials);
  std::sort(sorted.begin(), sorted.end(),
            [](const TrialScore& a, const TrialScore& b) { return a.score > b.score; });

  std::vector<OperatingPoint> points;
  points.push_back({std::numeric_limits<double>::infinity(), 0.0, 1.0});
  long acc_target = 0, acc_nontarget = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    const double t = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == t) {
      (sorted[i].target ? acc_target : acc_nontarget)++;
      ++i;
    }
    // Accept iff score >= t: everything seen so far is accepted.
    const double far = static_cast<double>(acc_nontarget) / n_nontarget;
    const double frr = static_cast<double>(n_target - acc_target) / n_target;
    points.push_back({t, far, frr});
  }
  return points;
}

std::pair<double, double> compute_eer(const TrialScoreSet& trials) {
  const auto points = roc_points(trials);
  for (size_t i = 1; i < points.size(); ++i) {
    const auto& cur = points[i];
    if (cur.far < cur.frr) continue;
    if (cur.far == cur.frr) return {cur.far, cur.threshold};
    // Crossed between points[i-1] (far < frr) and cur (far > frr).
    const auto& prev = points[i - 1];
    const double denom = (cur.far - prev.far) + (prev.frr - cur.frr);
    const double s = (prev.frr - prev.far) / denom;
    const double eer = prev.far + s * (cur.far - prev.far);
    double thr = cur.threshold;
    if (std::isfinite(prev.threshold)) thr = prev.threshold + s * (cur.threshold - prev.threshold);
    return {eer, thr};
  }
  // far never reaches frr; the last point is (1, 0), so this is unreachable
  // for well-formed inputs.
  return {0.5, points.back().threshold};
}

std::pair<double, double> compute_min_dcf(const TrialScoreSet& trials,
                                          const VerificationConfig& cfg) {
  if (cfg.p_target <= 0.0 || cfg.p_target >= 1.0 || cfg.c_miss <= 0.0 || cfg.c_fa <= 0.0)
    throw Error(errc::invalid_config, "require p_target in (0,1) and positive costs");
  const auto points = roc_points(trials);
  const double w_miss = cfg.p_target * cfg.c_miss;
  const double w_fa = (1.0 - cfg.p_target) * cfg.c_fa;
  const double norm = std::min(w_miss, w_fa);
  double best = std::numeric_limits<double>::infinity();
  double best_thr = points.front().threshold;
  for (const auto& p : points) {
    const double dcf = (w_miss * p.frr + w_fa * p.far) / norm;
    if (dcf < best) {
      best = dcf;
      best_thr = p.threshold;
    }
  }
  return {best, best_thr};
}

}  // namespace diafuse

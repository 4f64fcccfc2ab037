#pragma once

#include <utility>
#include <vector>

#include "diafuse/types.hpp"

namespace diafuse {

struct VerificationConfig {
  double p_target = 0.01;
  double c_miss = 1.0;
  double c_fa = 1.0;
  int asnorm_top_k = 300;
};

// Dot product of two unit vectors; callers guarantee unit norm.
double cosine_score(const Vector& a, const Vector& b);

// Adaptive s-norm: standardize against the top-k largest scores of each
// cohort (population std), average the two standardized values.
double asnorm_score(double raw, const std::vector<double>& enroll_cohort,
                    const std::vector<double>& test_cohort, int top_k);

// One operating point per distinct score threshold, descending, preceded by
// the reject-all point (threshold +inf, far 0, frr 1). Accept iff score >= t.
struct OperatingPoint {
  double threshold;
  double far;
  double frr;
};
std::vector<OperatingPoint> roc_points(const TrialScoreSet& trials);

// Returns (eer, threshold). Linear interpolation between the adjacent
// operating points where the ROC step crosses far == frr.
std::pair<double, double> compute_eer(const TrialScoreSet& trials);

// Returns (min_dcf, threshold): minimum over swept thresholds of
// (p*Cmiss*Pmiss + (1-p)*Cfa*Pfa) / min(p*Cmiss, (1-p)*Cfa).
std::pair<double, double> compute_min_dcf(const TrialScoreSet& trials,
                                          const VerificationConfig& cfg = {});

}  // namespace diafuse

#pragma once

#include <map>
#include <string>
#include <vector>

#include "diafuse/types.hpp"

namespace diafuse {

struct MetricsConfig {
  double collar = 0.25;  // excluded around every reference boundary
};

// Hypothesis speaker -> reference speaker, maximizing total overlap duration
// via optimal assignment; pairs with zero overlap are dropped.
std::map<std::string, std::string> optimal_speaker_mapping(const Diarization& ref,
                                                           const Diarization& hyp);

struct DerBreakdown {
  double missed = 0.0;
  double false_alarm = 0.0;
  double confusion = 0.0;
  double scored = 0.0;
  double der() const { return scored > 0 ? (missed + false_alarm + confusion) / scored : 0.0; }
};

// Interval-based DER with a symmetric collar around reference boundaries;
// overlapping reference speakers are scored.
DerBreakdown compute_der(const Diarization& ref, const Diarization& hyp,
                         const MetricsConfig& cfg = {});

// Mean over reference speakers of 1 - IoU with the mapped hypothesis
// speaker's support (unmapped speakers count 1). No collar.
double compute_jer(const Diarization& ref, const Diarization& hyp);

// Word-level edit distance (all edits cost 1).
long levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct CpwerPair {
  std::string recording;
  std::string ref_speaker;  // empty for a dummy slot
  std::string hyp_speaker;
  long edits = 0;
};

struct CpwerResult {
  double cpwer = 0.0;
  long total_edits = 0;
  long total_ref_words = 0;
  std::vector<CpwerPair> pairs;
};

// Concatenated minimum-permutation WER: speaker sets padded to equal size
// with empty dummies, assignment minimizing total word edits.
CpwerResult cpwer_single(const Transcript& ref, const Transcript& hyp,
                         const std::string& recording = "");
CpwerResult compute_cpwer(const TranscriptSet& ref, const TranscriptSet& hyp);

}  // namespace diafuse

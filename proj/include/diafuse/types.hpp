#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace diafuse {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Times are decimal seconds, stored at full precision and compared at 1 ms.
inline long long quantize_ms(double seconds) { return std::llround(seconds * 1000.0); }

struct Segment {
  std::string recording;
  double start = 0.0;
  double end = 0.0;
  std::string speaker;  // empty when unlabeled
};

// Sorted by (start, end); exact duplicates forbidden.
using SegmentList = std::vector<Segment>;

// N x D speaker embeddings, rows L2-normalized, aligned 1:1 with a SegmentList.
struct EmbeddingSet {
  Matrix rows;
};

struct FaceRecord {
  double start = 0.0;
  double end = 0.0;
  std::string face_cluster;
  double confidence = 1.0;
};
using VisualEvidence = std::vector<FaceRecord>;

enum class TextEventKind { turn_change, dialogue_on, dialogue_off };

struct TextRecord {
  double time = 0.0;
  TextEventKind kind = TextEventKind::turn_change;
  double confidence = 1.0;
};
using TextualEvidence = std::vector<TextRecord>;

struct Turn {
  std::string speaker;
  double start = 0.0;
  double end = 0.0;
};

// Speaker-labeled timeline for one recording; turns kept sorted by
// (start, end, speaker).
struct Diarization {
  std::string recording;
  std::vector<Turn> turns;

  void normalize();
  double speech_duration() const;  // measure of the union of turn spans
};

struct Trial {
  std::string enroll;
  std::string test;
  bool target = false;
};

struct TrialScore {
  double score = 0.0;
  bool target = false;
};
using TrialScoreSet = std::vector<TrialScore>;

struct SpeakerTranscript {
  std::string speaker;
  std::vector<std::string> words;
};
// One recording: speakers unique, words concatenated per speaker.
using Transcript = std::vector<SpeakerTranscript>;
// Keyed by recording id.
using TranscriptSet = std::map<std::string, Transcript>;

// Cluster ids 0..k-1, one per row of the clustered set.
struct Labeling {
  std::vector<int> ids;
  int k = 0;
};

}  // namespace diafuse

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "diafuse/types.hpp"

namespace diafuse {

// RTTM interchange. Only SPEAKER lines are consumed on parse; emission uses
// the fixed template `SPEAKER <rec> 1 <start> <dur> <NA> <NA> <spk> <NA> <NA>`
// with start/duration at three decimals, channel fixed to 1.
std::vector<Diarization> parse_rttm(const std::string& text);
std::string emit_rttm(const Diarization& d);
std::string emit_rttm(const std::vector<Diarization>& ds);

// JSON-Lines, one object per segment: {recording, start, end, vector}.
// All lines must share one recording and one dimension; rows come back
// L2-normalized with segments sorted by (start, end).
std::pair<SegmentList, EmbeddingSet> load_embedding_records(const std::string& jsonl);

// JSON-Lines evidence streams. Visual: {start, end, face_cluster, confidence};
// textual: {time, kind, confidence}. Missing confidence defaults to 1.0.
VisualEvidence load_visual_evidence(const std::string& jsonl);
TextualEvidence load_textual_evidence(const std::string& jsonl);

// Same JSON-Lines schema as load_embedding_records but keyed by recording id
// (multiple recordings allowed); repeated ids are mean-pooled and
// renormalized. Used for trial scoring where one id = one utterance.
std::map<std::string, Vector> load_embedding_table(const std::string& jsonl);

// Whitespace text, one trial per line: `enroll test target|nontarget`.
std::vector<Trial> load_trial_list(const std::string& text);

// JSON-Lines: {recording, speaker, words}; repeated speaker lines concatenate
// in file order.
TranscriptSet load_transcript_set(const std::string& jsonl);

// Debug dump format for square matrices: one row per line, whitespace
// separated decimals.
Matrix parse_matrix_text(const std::string& text);
std::string emit_matrix_text(const Matrix& m, int precision = 6);

}  // namespace diafuse

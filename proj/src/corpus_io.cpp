#include "diafuse/corpus_io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "diafuse/error.hpp"

namespace diafuse {

using json = nlohmann::json;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::string line;
  std::istringstream ss(text);
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

double parse_number(const std::string& s, long line_no, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw Error(errc::malformed_line, std::string("non-numeric ") + what + " '" + s + "'", line_no);
  return v;
}

std::string fmt_seconds(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

json parse_json_line(const std::string& line, long line_no) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(errc::malformed_line, "invalid JSON object", line_no);
  return j;
}

double require_number(const json& j, const char* key, long line_no) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw Error(errc::malformed_line, std::string("missing or non-numeric field '") + key + "'", line_no);
  return j.at(key).get<double>();
}

std::string require_string(const json& j, const char* key, long line_no) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw Error(errc::malformed_line, std::string("missing or non-string field '") + key + "'", line_no);
  return j.at(key).get<std::string>();
}

double optional_confidence(const json& j, long line_no) {
  if (!j.contains("confidence")) return 1.0;
  const double c = require_number(j, "confidence", line_no);
  if (c < 0.0 || c > 1.0)
    throw Error(errc::malformed_line, "confidence outside [0,1]", line_no);
  return c;
}

}  // namespace

std::vector<Diarization> parse_rttm(const std::string& text) {
  std::vector<Diarization> out;
  std::map<std::string, size_t> index;  // recording -> position, first appearance
  long line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] != "SPEAKER") continue;
    if (tok.size() < 9)
      throw Error(errc::malformed_line, "SPEAKER line has fewer than 9 fields", line_no);
    const double start = parse_number(tok[3], line_no, "start");
    const double dur = parse_number(tok[4], line_no, "duration");
    if (dur <= 0.0) throw Error(errc::negative_duration, "non-positive duration", line_no);
    if (start < 0.0) throw Error(errc::negative_time, "negative start time", line_no);
    auto [it, inserted] = index.try_emplace(tok[1], out.size());
    if (inserted) out.push_back(Diarization{tok[1], {}});
    out[it->second].turns.push_back(Turn{tok[7], start, start + dur});
  }
  for (auto& d : out) d.normalize();
  return out;
}

std::string emit_rttm(const Diarization& d) {
  Diarization sorted = d;
  sorted.normalize();
  std::string out;
  for (const auto& t : sorted.turns) {
    out += "SPEAKER " + d.recording + " 1 " + fmt_seconds(t.start) + " " +
           fmt_seconds(t.end - t.start) + " <NA> <NA> " + t.speaker + " <NA> <NA>\n";
  }
  return out;
}

std::string emit_rttm(const std::vector<Diarization>& ds) {
  std::string out;
  for (const auto& d : ds) out += emit_rttm(d);
  return out;
}

std::pair<SegmentList, EmbeddingSet> load_embedding_records(const std::string& jsonl) {
  SegmentList segs;
  std::vector<std::vector<double>> vecs;
  std::vector<long> line_of;
  std::string recording;
  Eigen::Index dim = -1;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_json_line(line, line_no);
    const std::string rec = require_string(j, "recording", line_no);
    if (rec.empty()) throw Error(errc::malformed_line, "empty recording id", line_no);
    if (recording.empty())
      recording = rec;
    else if (rec != recording)
      throw Error(errc::malformed_line, "all records must share one recording", line_no);
    const double start = require_number(j, "start", line_no);
    const double end = require_number(j, "end", line_no);
    if (start < 0.0) throw Error(errc::negative_time, "negative start time", line_no);
    if (end <= start) throw Error(errc::negative_duration, "end must exceed start", line_no);
    if (!j.contains("vector") || !j.at("vector").is_array())
      throw Error(errc::malformed_line, "missing or non-array field 'vector'", line_no);
    std::vector<double> v;
    v.reserve(j.at("vector").size());
    for (const auto& x : j.at("vector")) {
      if (!x.is_number()) throw Error(errc::malformed_line, "non-numeric vector element", line_no);
      v.push_back(x.get<double>());
    }
    if (dim < 0) {
      dim = static_cast<Eigen::Index>(v.size());
      if (dim < 2) throw Error(errc::dimension_mismatch, "embedding dimension must be >= 2", line_no);
    } else if (static_cast<Eigen::Index>(v.size()) != dim) {
      throw Error(errc::dimension_mismatch, "inconsistent embedding dimension", line_no);
    }
    double sq = 0.0;
    for (double x : v) sq += x * x;
    if (std::sqrt(sq) < 1e-12) throw Error(errc::zero_vector, "zero embedding vector", line_no);
    segs.push_back(Segment{rec, start, end, ""});
    vecs.push_back(std::move(v));
    line_of.push_back(line_no);
  }
  if (segs.empty()) throw Error(errc::empty_input, "no embedding records");

  std::vector<size_t> order(segs.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return std::tie(segs[a].start, segs[a].end) < std::tie(segs[b].start, segs[b].end);
  });

  SegmentList sorted_segs;
  sorted_segs.reserve(segs.size());
  Matrix rows(static_cast<Eigen::Index>(segs.size()), dim);
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& s = segs[order[i]];
    if (i > 0) {
      const auto& p = sorted_segs.back();
      if (quantize_ms(p.start) == quantize_ms(s.start) && quantize_ms(p.end) == quantize_ms(s.end))
        throw Error(errc::malformed_line, "duplicate segment", line_of[order[i]]);
    }
    sorted_segs.push_back(s);
    Eigen::Map<const Vector> v(vecs[order[i]].data(), dim);
    rows.row(static_cast<Eigen::Index>(i)) = v.transpose() / v.norm();
  }
  return {std::move(sorted_segs), EmbeddingSet{std::move(rows)}};
}

VisualEvidence load_visual_evidence(const std::string& jsonl) {
  VisualEvidence out;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_json_line(line, line_no);
    FaceRecord r;
    r.start = require_number(j, "start", line_no);
    r.end = require_number(j, "end", line_no);
    if (r.start < 0.0) throw Error(errc::negative_time, "negative start time", line_no);
    if (r.end <= r.start) throw Error(errc::negative_duration, "end must exceed start", line_no);
    r.face_cluster = require_string(j, "face_cluster", line_no);
    if (r.face_cluster.empty()) throw Error(errc::malformed_line, "empty face_cluster", line_no);
    r.confidence = optional_confidence(j, line_no);
    out.push_back(std::move(r));
  }
  std::stable_sort(out.begin(), out.end(), [](const FaceRecord& a, const FaceRecord& b) {
    return std::tie(a.start, a.end, a.face_cluster) < std::tie(b.start, b.end, b.face_cluster);
  });
  return out;
}

TextualEvidence load_textual_evidence(const std::string& jsonl) {
  TextualEvidence out;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_json_line(line, line_no);
    TextRecord r;
    r.time = require_number(j, "time", line_no);
    if (r.time < 0.0) throw Error(errc::negative_time, "negative time", line_no);
    const std::string kind = require_string(j, "kind", line_no);
    if (kind == "turn_change")
      r.kind = TextEventKind::turn_change;
    else if (kind == "dialogue_on")
      r.kind = TextEventKind::dialogue_on;
    else if (kind == "dialogue_off")
      r.kind = TextEventKind::dialogue_off;
    else
      throw Error(errc::unknown_kind, "unknown kind '" + kind + "'", line_no);
    r.confidence = optional_confidence(j, line_no);
    out.push_back(r);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const TextRecord& a, const TextRecord& b) { return a.time < b.time; });
  return out;
}

std::map<std::string, Vector> load_embedding_table(const std::string& jsonl) {
  std::map<std::string, Vector> sums;
  std::map<std::string, long> counts;
  Eigen::Index dim = -1;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_json_line(line, line_no);
    const std::string rec = require_string(j, "recording", line_no);
    if (rec.empty()) throw Error(errc::malformed_line, "empty recording id", line_no);
    if (!j.contains("vector") || !j.at("vector").is_array())
      throw Error(errc::malformed_line, "missing or non-array field 'vector'", line_no);
    Vector v(static_cast<Eigen::Index>(j.at("vector").size()));
    Eigen::Index i = 0;
    for (const auto& x : j.at("vector")) {
      if (!x.is_number()) throw Error(errc::malformed_line, "non-numeric vector element", line_no);
      v(i++) = x.get<double>();
    }
    if (dim < 0) {
      dim = v.size();
      if (dim < 2) throw Error(errc::dimension_mismatch, "embedding dimension must be >= 2", line_no);
    } else if (v.size() != dim) {
      throw Error(errc::dimension_mismatch, "inconsistent embedding dimension", line_no);
    }
    if (v.norm() < 1e-12) throw Error(errc::zero_vector, "zero embedding vector", line_no);
    auto [it, inserted] = sums.try_emplace(rec, v / v.norm());
    if (!inserted) it->second += v / v.norm();
    counts[rec]++;
  }
  if (sums.empty()) throw Error(errc::empty_input, "no embedding records");
  std::map<std::string, Vector> out;
  for (auto& [rec, sum] : sums) {
    const double norm = sum.norm();
    if (norm < 1e-12) throw Error(errc::zero_vector, "pooled embedding for '" + rec + "' is zero");
    out.emplace(rec, sum / norm);
  }
  return out;
}

std::vector<Trial> load_trial_list(const std::string& text) {
  std::vector<Trial> out;
  long line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tok = split_ws(line);
    if (tok.size() != 3)
      throw Error(errc::malformed_line, "expected `enroll test target|nontarget`", line_no);
    bool target;
    if (tok[2] == "target")
      target = true;
    else if (tok[2] == "nontarget")
      target = false;
    else
      throw Error(errc::bad_label, "label must be target or nontarget, got '" + tok[2] + "'",
                  line_no);
    out.push_back(Trial{tok[0], tok[1], target});
  }
  return out;
}

TranscriptSet load_transcript_set(const std::string& jsonl) {
  TranscriptSet out;
  long line_no = 0;
  for (const auto& line : split_lines(jsonl)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_json_line(line, line_no);
    const std::string rec = require_string(j, "recording", line_no);
    const std::string spk = require_string(j, "speaker", line_no);
    if (rec.empty() || spk.empty())
      throw Error(errc::malformed_line, "empty recording or speaker", line_no);
    if (!j.contains("words") || !j.at("words").is_array())
      throw Error(errc::malformed_line, "missing or non-array field 'words'", line_no);
    if (j.at("words").empty()) throw Error(errc::empty_words, "empty word list", line_no);
    std::vector<std::string> words;
    words.reserve(j.at("words").size());
    for (const auto& w : j.at("words")) {
      if (!w.is_string() || w.get<std::string>().empty())
        throw Error(errc::empty_words, "words must be non-empty strings", line_no);
      words.push_back(w.get<std::string>());
    }
    auto& transcript = out[rec];
    auto it = std::find_if(transcript.begin(), transcript.end(),
                           [&](const SpeakerTranscript& t) { return t.speaker == spk; });
    if (it == transcript.end()) {
      transcript.push_back(SpeakerTranscript{spk, std::move(words)});
    } else {
      it->words.insert(it->words.end(), words.begin(), words.end());
    }
  }
  return out;
}

Matrix parse_matrix_text(const std::string& text) {
  std::vector<std::vector<double>> rows;
  long line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    std::vector<double> row;
    for (const auto& tok : split_ws(line)) row.push_back(parse_number(tok, line_no, "entry"));
    if (!rows.empty() && row.size() != rows.front().size())
      throw Error(errc::malformed_line, "ragged matrix row", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(errc::empty_input, "empty matrix");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  return m;
}

std::string emit_matrix_text(const Matrix& m, int precision) {
  std::string out;
  char buf[64];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.*f", precision, m(i, j));
      if (j) out += ' ';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace diafuse

#include "diafuse/metrics.hpp"

#include <algorithm>
#include <set>

#include "diafuse/assignment.hpp"
#include "diafuse/error.hpp"

namespace diafuse {

namespace {

using Spans = std::vector<std::pair<double, double>>;

Spans merged_spans(Spans spans) {
  std::sort(spans.begin(), spans.end());
  Spans out;
  for (const auto& s : spans) {
    if (s.second <= s.first) continue;
    if (out.empty() || s.first > out.back().second)
      out.push_back(s);
    else
      out.back().second = std::max(out.back().second, s.second);
  }
  return out;
}

double measure(const Spans& spans) {
  double total = 0.0;
  for (const auto& s : spans) total += s.second - s.first;
  return total;
}

double intersection_measure(const Spans& a, const Spans& b) {
  double total = 0.0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].first, b[j].first);
    const double hi = std::min(a[i].second, b[j].second);
    if (hi > lo) total += hi - lo;
    if (a[i].second < b[j].second)
      ++i;
    else
      ++j;
  }
  return total;
}

// Per-speaker merged supports, speakers in sorted name order.
std::map<std::string, Spans> speaker_supports(const Diarization& d) {
  std::map<std::string, Spans> out;
  for (const auto& t : d.turns) out[t.speaker].emplace_back(t.start, t.end);
  for (auto& [name, spans] : out) spans = merged_spans(std::move(spans));
  return out;
}

bool covers(const Spans& spans, double x) {
  for (const auto& s : spans) {
    if (x < s.first) return false;
    if (x < s.second) return true;
  }
  return false;
}

}  // namespace

std::map<std::string, std::string> optimal_speaker_mapping(const Diarization& ref,
                                                           const Diarization& hyp) {
  const auto ref_sup = speaker_supports(ref);
  const auto hyp_sup = speaker_supports(hyp);
  std::vector<std::string> ref_names, hyp_names;
  for (const auto& [name, spans] : ref_sup) ref_names.push_back(name);
  for (const auto& [name, spans] : hyp_sup) hyp_names.push_back(name);
  if (ref_names.empty() || hyp_names.empty()) return {};

  std::vector<std::vector<double>> cost(hyp_names.size(),
                                        std::vector<double>(ref_names.size(), 0.0));
  for (size_t h = 0; h < hyp_names.size(); ++h)
    for (size_t r = 0; r < ref_names.size(); ++r)
      cost[h][r] = -intersection_measure(hyp_sup.at(hyp_names[h]), ref_sup.at(ref_names[r]));

  const Assignment assign = solve_assignment(cost);
  std::map<std::string, std::string> mapping;
  for (size_t h = 0; h < hyp_names.size(); ++h) {
    const int r = assign.row_to_col[h];
    if (r >= 0 && cost[h][r] < 0.0) mapping[hyp_names[h]] = ref_names[r];
  }
  return mapping;
}

DerBreakdown compute_der(const Diarization& ref, const Diarization& hyp,
                         const MetricsConfig& cfg) {
  if (ref.turns.empty()) throw Error(errc::empty_reference, "reference diarization is empty");
  if (cfg.collar < 0) throw Error(errc::invalid_config, "collar must be non-negative");

  const auto mapping = optimal_speaker_mapping(ref, hyp);
  const auto ref_sup = speaker_supports(ref);
  const auto hyp_sup = speaker_supports(hyp);

  Spans collars;
  for (const auto& t : ref.turns) {
    collars.emplace_back(t.start - cfg.collar, t.start + cfg.collar);
    collars.emplace_back(t.end - cfg.collar, t.end + cfg.collar);
  }
  collars = merged_spans(std::move(collars));

  std::vector<double> cuts;
  for (const auto& t : ref.turns) {
    cuts.push_back(t.start);
    cuts.push_back(t.end);
  }
  for (const auto& t : hyp.turns) {
    cuts.push_back(t.start);
    cuts.push_back(t.end);
  }
  for (const auto& c : collars) {
    cuts.push_back(c.first);
    cuts.push_back(c.second);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  DerBreakdown out;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double len = cuts[i + 1] - cuts[i];
    if (len <= 0) continue;
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    if (covers(collars, mid)) continue;

    std::set<std::string> active_ref, active_hyp;
    for (const auto& [name, spans] : ref_sup)
      if (covers(spans, mid)) active_ref.insert(name);
    for (const auto& [name, spans] : hyp_sup)
      if (covers(spans, mid)) active_hyp.insert(name);

    const long n_ref = static_cast<long>(active_ref.size());
    const long n_hyp = static_cast<long>(active_hyp.size());
    long n_correct = 0;
    for (const auto& h : active_hyp) {
      const auto it = mapping.find(h);
      if (it != mapping.end() && active_ref.count(it->second)) n_correct++;
    }
    out.scored += len * static_cast<double>(n_ref);
    out.missed += len * static_cast<double>(std::max(0L, n_ref - n_hyp));
    out.false_alarm += len * static_cast<double>(std::max(0L, n_hyp - n_ref));
    out.confusion += len * static_cast<double>(std::min(n_ref, n_hyp) - n_correct);
  }
  return out;
}

double compute_jer(const Diarization& ref, const Diarization& hyp) {
  if (ref.turns.empty()) throw Error(errc::empty_reference, "reference diarization is empty");
  const auto mapping = optimal_speaker_mapping(ref, hyp);
  const auto ref_sup = speaker_supports(ref);
  const auto hyp_sup = speaker_supports(hyp);

  std::map<std::string, std::string> ref_to_hyp;
  for (const auto& [h, r] : mapping) ref_to_hyp[r] = h;

  double total = 0.0;
  for (const auto& [name, spans] : ref_sup) {
    const auto it = ref_to_hyp.find(name);
    if (it == ref_to_hyp.end()) {
      total += 1.0;
      continue;
    }
    const auto& hspans = hyp_sup.at(it->second);
    const double inter = intersection_measure(spans, hspans);
    const double uni = measure(spans) + measure(hspans) - inter;
    total += uni > 0 ? 1.0 - inter / uni : 0.0;
  }
  return total / static_cast<double>(ref_sup.size());
}

long levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<long> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<long>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<long>(i);
    for (size_t j = 1; j <= m; ++j) {
      const long sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

CpwerResult cpwer_single(const Transcript& ref, const Transcript& hyp,
                         const std::string& recording) {
  long ref_words = 0;
  for (const auto& s : ref) ref_words += static_cast<long>(s.words.size());
  if (ref.empty() || ref_words == 0)
    throw Error(errc::empty_reference, "reference transcript is empty");

  const size_t n = std::max(ref.size(), hyp.size());
  static const std::vector<std::string> kEmpty;
  auto ref_at = [&](size_t i) -> const std::vector<std::string>& {
    return i < ref.size() ? ref[i].words : kEmpty;
  };
  auto hyp_at = [&](size_t j) -> const std::vector<std::string>& {
    return j < hyp.size() ? hyp[j].words : kEmpty;
  };

  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      cost[i][j] = static_cast<double>(levenshtein(ref_at(i), hyp_at(j)));

  const Assignment assign = solve_assignment(cost);
  CpwerResult out;
  out.total_ref_words = ref_words;
  for (size_t i = 0; i < n; ++i) {
    const int j = assign.row_to_col[i];
    if (j < 0) continue;
    const bool ref_real = i < ref.size();
    const bool hyp_real = static_cast<size_t>(j) < hyp.size();
    if (!ref_real && !hyp_real) continue;
    const long edits = static_cast<long>(cost[i][j]);
    out.total_edits += edits;
    out.pairs.push_back(CpwerPair{recording, ref_real ? ref[i].speaker : "",
                                  hyp_real ? hyp[j].speaker : "", edits});
  }
  out.cpwer = static_cast<double>(out.total_edits) / static_cast<double>(out.total_ref_words);
  return out;
}

CpwerResult compute_cpwer(const TranscriptSet& ref, const TranscriptSet& hyp) {
  if (ref.empty()) throw Error(errc::empty_reference, "reference transcript set is empty");
  CpwerResult out;
  for (const auto& [rec, transcript] : ref) {
    const auto it = hyp.find(rec);
    static const Transcript kEmptyTranscript;
    const Transcript& h = it != hyp.end() ? it->second : kEmptyTranscript;
    CpwerResult r = cpwer_single(transcript, h, rec);
    out.total_edits += r.total_edits;
    out.total_ref_words += r.total_ref_words;
    out.pairs.insert(out.pairs.end(), r.pairs.begin(), r.pairs.end());
  }
  // Hypothesis-only recordings are pure insertions.
  for (const auto& [rec, transcript] : hyp) {
    if (ref.count(rec)) continue;
    for (const auto& s : transcript) {
      const long edits = static_cast<long>(s.words.size());
      out.total_edits += edits;
      out.pairs.push_back(CpwerPair{rec, "", s.speaker, edits});
    }
  }
  if (out.total_ref_words == 0)
    throw Error(errc::empty_reference, "reference transcripts contain no words");
  out.cpwer = static_cast<double>(out.total_edits) / static_cast<double>(out.total_ref_words);
  return out;
}

}  // namespace diafuse

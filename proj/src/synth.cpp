#include "diafuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "diafuse/error.hpp"
#include "diafuse/metrics.hpp"
#include "diafuse/parallel.hpp"
#include "diafuse/rng.hpp"

namespace diafuse {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent sub-streams so the acoustic draw does not shift when evidence
// noise settings change.
constexpr uint64_t kEmbSalt = 0x9E3779B97F4A7C15ULL;
constexpr uint64_t kVisSalt = 0xC2B2AE3D27D4EB4FULL;
constexpr uint64_t kTxtSalt = 0x165667B19E3779F9ULL;

void validate(const SynthSpec& spec) {
  if (spec.speakers < 2) throw Error(errc::invalid_config, "need at least 2 speakers");
  if (spec.dim < 2) throw Error(errc::invalid_config, "dim must be >= 2");
  if (spec.sep < 0 || spec.noise < 0)
    throw Error(errc::invalid_config, "sep and noise must be non-negative");
  if (spec.evidence_noise_visual < 0 || spec.evidence_noise_visual > 1 ||
      spec.evidence_noise_textual < 0 || spec.evidence_noise_textual > 1)
    throw Error(errc::invalid_config, "evidence noise must lie in [0,1]");
  if (spec.sep * (spec.speakers - 1) > kPi)
    throw Error(errc::infeasible_separation, "sep * (speakers-1) exceeds pi");
}

Vector random_unit(Rng& rng, int dim) {
  Vector v(dim);
  for (;;) {
    for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
    const double norm = v.norm();
    if (norm > 1e-9) return v / norm;
  }
}

// Centroids with pairwise angle exactly `sep`: a regular simplex in a random
// orientation. cos(sep) >= -1/(k-1) always holds under the sep*(k-1) <= pi
// feasibility cap, so the Gram matrix (1-g)I + g11^T factors. Falls back to
// a great circle (pairwise angles i*sep) when dim < speakers.
Matrix make_centroids(Rng& rng, int speakers, int dim, double sep) {
  if (dim >= speakers) {
    const double g = std::cos(sep);
    Matrix q(speakers, dim);
    for (int i = 0; i < speakers; ++i) {
      for (;;) {
        Vector v = random_unit(rng, dim);
        for (int j = 0; j < i; ++j) v -= v.dot(q.row(j)) * q.row(j).transpose();
        const double norm = v.norm();
        if (norm > 1e-6) {
          q.row(i) = v.transpose() / norm;
          break;
        }
      }
    }
    const double k = speakers;
    const double a = std::sqrt(std::max(0.0, 1.0 - g));
    const double b = -a / std::sqrt(k) + std::sqrt(std::max(0.0, (1.0 + (k - 1.0) * g) / k));
    const Vector axis = q.colwise().sum().transpose() / std::sqrt(k);
    Matrix c(speakers, dim);
    for (int i = 0; i < speakers; ++i) {
      c.row(i) = a * q.row(i) + b * axis.transpose();
      c.row(i) /= c.row(i).norm();
    }
    return c;
  }

  const Vector u = random_unit(rng, dim);
  Vector v(dim);
  for (;;) {
    v = random_unit(rng, dim);
    v -= v.dot(u) * u;
    const double norm = v.norm();
    if (norm > 1e-9) {
      v /= norm;
      break;
    }
  }
  Matrix c(speakers, dim);
  for (int i = 0; i < speakers; ++i) {
    const double a = sep * i;
    c.row(i) = std::cos(a) * u.transpose() + std::sin(a) * v.transpose();
  }
  return c;
}

// Gaussian tangent noise (std `noise` per coordinate, the angular deviation
// along any fixed tangent direction), renormalized back to the sphere.
Vector noisy_embedding(Rng& rng, const Vector& centroid, double noise) {
  const int dim = static_cast<int>(centroid.size());
  if (noise <= 0) return centroid;
  Vector g(dim);
  for (int i = 0; i < dim; ++i) g(i) = noise * rng.gaussian();
  g -= g.dot(centroid) * centroid;
  Vector e = centroid + g;
  return e / e.norm();
}

}  // namespace

SynthEmbeddings gen_embeddings(const SynthSpec& spec, int per_speaker) {
  validate(spec);
  if (per_speaker < 1) throw Error(errc::invalid_config, "per_speaker must be >= 1");
  Rng rng(spec.seed ^ kEmbSalt);
  const Matrix centroids = make_centroids(rng, spec.speakers, spec.dim, spec.sep);
  Matrix rows(spec.speakers * per_speaker, spec.dim);
  std::vector<int> labels;
  labels.reserve(rows.rows());
  Eigen::Index r = 0;
  for (int s = 0; s < spec.speakers; ++s) {
    const Vector c = centroids.row(s).transpose();
    for (int j = 0; j < per_speaker; ++j, ++r) {
      rows.row(r) = noisy_embedding(rng, c, spec.noise).transpose();
      labels.push_back(s);
    }
  }
  return {EmbeddingSet{std::move(rows)}, Labeling{std::move(labels), spec.speakers}};
}

Conversation gen_conversation(const SynthSpec& spec, const std::string& recording) {
  validate(spec);
  if (spec.duration <= 0 || spec.turn_mean <= 0)
    throw Error(errc::invalid_config, "duration and turn_mean must be positive");

  Rng rng_t(spec.seed);
  Rng rng_e(spec.seed ^ kEmbSalt);
  Rng rng_v(spec.seed ^ kVisSalt);
  Rng rng_x(spec.seed ^ kTxtSalt);

  const int k = spec.speakers;
  const Matrix centroids = make_centroids(rng_e, k, spec.dim, spec.sep);

  // Round-robin over a shuffled speaker order; turn lengths are capped at
  // duration/speakers so every speaker owns at least one turn.
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  for (int i = k - 1; i > 0; --i)
    std::swap(order[i], order[rng_t.integer(static_cast<uint64_t>(i + 1))]);

  struct RawTurn {
    int speaker;
    double start, end;
  };
  std::vector<RawTurn> turns;
  const double cap = spec.duration / k;
  const double floor_len = std::min(0.1, cap);
  double t = 0.0;
  int idx = 0;
  while (t < spec.duration - 1e-9) {
    double len = std::clamp(rng_t.exponential(spec.turn_mean), floor_len, cap);
    if (t + len > spec.duration) len = spec.duration - t;
    if (len < floor_len && !turns.empty()) {
      turns.back().end = spec.duration;
      break;
    }
    turns.push_back(RawTurn{order[idx % k], t, t + len});
    t += len;
    ++idx;
  }

  Conversation conv;
  conv.truth.recording = recording;
  for (const auto& turn : turns)
    conv.truth.turns.push_back(Turn{"S" + std::to_string(turn.speaker), turn.start, turn.end});
  conv.truth.normalize();

  // Clustering units: default-window tiling of each turn.
  const PipelineConfig tiling;
  std::vector<int> seg_speaker;
  for (const auto& turn : turns) {
    const SegmentList tiled =
        subsegment({Segment{recording, turn.start, turn.end, ""}}, tiling);
    for (const auto& s : tiled) {
      conv.segments.push_back(s);
      seg_speaker.push_back(turn.speaker);
    }
  }

  Matrix rows(static_cast<Eigen::Index>(conv.segments.size()), spec.dim);
  for (size_t i = 0; i < conv.segments.size(); ++i) {
    const Vector c = centroids.row(seg_speaker[i]).transpose();
    rows.row(static_cast<Eigen::Index>(i)) = noisy_embedding(rng_e, c, spec.noise).transpose();
  }
  conv.embeddings.rows = std::move(rows);

  for (const auto& turn : turns) {
    int cluster = turn.speaker;
    if (rng_v.uniform() < spec.evidence_noise_visual) {
      if (rng_v.uniform() < 0.5) continue;  // dropped
      cluster = (turn.speaker + 1 + static_cast<int>(rng_v.integer(k - 1))) % k;
    }
    conv.visual.push_back(
        FaceRecord{turn.start, turn.end, "f" + std::to_string(cluster), 1.0});
  }

  conv.textual.push_back(TextRecord{0.0, TextEventKind::dialogue_on, 1.0});
  for (size_t i = 0; i + 1 < turns.size(); ++i) {
    double b = turns[i].end;
    if (rng_x.uniform() < spec.evidence_noise_textual) {
      if (rng_x.uniform() < 0.5) continue;  // dropped
      b = rng_x.uniform() * spec.duration;  // relocated
    }
    conv.textual.push_back(TextRecord{b, TextEventKind::turn_change, 1.0});
  }
  conv.textual.push_back(TextRecord{spec.duration, TextEventKind::dialogue_off, 1.0});
  std::stable_sort(conv.textual.begin(), conv.textual.end(),
                   [](const TextRecord& a, const TextRecord& b) { return a.time < b.time; });
  return conv;
}

Transcript tokens_from_timeline(const Diarization& d, double duration) {
  std::vector<std::string> speaker_order;
  std::map<std::string, std::vector<std::string>> words;
  const long n_tokens = static_cast<long>(duration);
  for (long j = 0; j < n_tokens; ++j) {
    const double t = static_cast<double>(j) + 0.5;
    const Turn* owner = nullptr;
    for (const auto& turn : d.turns) {
      if (t >= turn.start && t < turn.end) {
        owner = &turn;
        break;
      }
    }
    if (!owner) continue;
    if (!words.count(owner->speaker)) speaker_order.push_back(owner->speaker);
    words[owner->speaker].push_back("w" + std::to_string(j));
  }
  Transcript out;
  for (const auto& name : speaker_order) out.push_back(SpeakerTranscript{name, words[name]});
  return out;
}

namespace {

struct RecordingScores {
  DerBreakdown der;
  double jer = 0.0;
  long n_ref_speakers = 0;
  long cpwer_edits = 0;
  long cpwer_words = 0;
};

}  // namespace

AblationReport run_ablation(const SynthSpec& spec, int n_recordings, const PipelineConfig& cfg,
                            int jobs) {
  if (n_recordings < 1) throw Error(errc::invalid_config, "n_recordings must be >= 1");

  std::vector<Conversation> corpus(n_recordings);
  parallel_for(n_recordings, jobs, [&](int i) {
    SynthSpec s = spec;
    s.seed = spec.seed + static_cast<uint64_t>(i);
    char name[32];
    std::snprintf(name, sizeof name, "rec%03d", i);
    corpus[i] = gen_conversation(s, name);
  });

  struct Combo {
    std::string method;
    std::string modality;
    bool use_visual;
    bool use_textual;
  };
  const std::vector<Combo> combos = {
      {"SC", "audio", false, false},
      {"SC+E2CP", "audio+visual", true, false},
      {"SC+E2CP", "audio+textual", false, true},
      {"SC+E2CP", "audio+visual+textual", true, true},
  };

  AblationReport report;
  for (const auto& combo : combos) {
    PipelineConfig run_cfg = cfg;
    run_cfg.modalities = {Modality::audio};
    if (combo.use_visual) run_cfg.modalities.insert(Modality::visual);
    if (combo.use_textual) run_cfg.modalities.insert(Modality::textual);

    std::vector<RecordingScores> scores(n_recordings);
    parallel_for(n_recordings, jobs, [&](int i) {
      const Conversation& conv = corpus[i];
      const auto result = diarize(conv.segments, conv.embeddings,
                                  combo.use_visual ? std::optional(conv.visual) : std::nullopt,
                                  combo.use_textual ? std::optional(conv.textual) : std::nullopt,
                                  run_cfg);
      RecordingScores& s = scores[i];
      s.der = compute_der(conv.truth, result.diarization, MetricsConfig{});
      s.jer = compute_jer(conv.truth, result.diarization);
      std::set<std::string> ref_speakers;
      for (const auto& turn : conv.truth.turns) ref_speakers.insert(turn.speaker);
      s.n_ref_speakers = static_cast<long>(ref_speakers.size());
      const Transcript ref_tok = tokens_from_timeline(conv.truth, spec.duration);
      const Transcript hyp_tok = tokens_from_timeline(result.diarization, spec.duration);
      const CpwerResult cw = cpwer_single(ref_tok, hyp_tok, conv.truth.recording);
      s.cpwer_edits = cw.total_edits;
      s.cpwer_words = cw.total_ref_words;
    });

    AblationRow row;
    row.method = combo.method;
    row.modality = combo.modality;
    double err = 0, scored = 0, jer_sum = 0;
    long spk_sum = 0, edits = 0, total_words = 0;
    for (const auto& s : scores) {
      err += s.der.missed + s.der.false_alarm + s.der.confusion;
      scored += s.der.scored;
      jer_sum += s.jer * static_cast<double>(s.n_ref_speakers);
      spk_sum += s.n_ref_speakers;
      edits += s.cpwer_edits;
      total_words += s.cpwer_words;
      row.per_recording_der.push_back(s.der.der());
    }
    row.der = scored > 0 ? err / scored : 0.0;
    row.jer = spk_sum > 0 ? jer_sum / static_cast<double>(spk_sum) : 0.0;
    row.cpwer = total_words > 0 ? static_cast<double>(edits) / static_cast<double>(total_words)
                                : 0.0;
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string AblationReport::table() const {
  std::string out = "method     modality                  DER%     JER%   cpWER%\n";
  char line[128];
  for (const auto& row : rows) {
    std::snprintf(line, sizeof line, "%-9s  %-22s %7.2f  %7.2f  %7.2f\n", row.method.c_str(),
                  row.modality.c_str(), 100.0 * row.der, 100.0 * row.jer, 100.0 * row.cpwer);
    out += line;
  }
  return out;
}

}  // namespace diafuse

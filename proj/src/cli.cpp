#include "diafuse/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diafuse/corpus_io.hpp"
#include "diafuse/error.hpp"
#include "diafuse/metrics.hpp"
#include "diafuse/parallel.hpp"
#include "diafuse/pipeline.hpp"
#include "diafuse/synth.hpp"
#include "diafuse/verify.hpp"

namespace diafuse {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::io_error, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot write '" + path + "'");
  out << content;
}

// ---- configuration -------------------------------------------------------

struct EngineConfig {
  PipelineConfig pipeline;
  VerificationConfig verification;
  MetricsConfig metrics;
  bool modalities_from_config = false;
};

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known)
      if (key == k) ok = true;
    if (!ok) throw UsageError("unknown config key '" + where + key + "'");
  }
}

std::set<Modality> parse_modalities(const std::vector<std::string>& tokens,
                                    const std::string& what) {
  std::set<Modality> out;
  for (const auto& t : tokens) {
    if (t == "a" || t == "audio")
      out.insert(Modality::audio);
    else if (t == "v" || t == "visual")
      out.insert(Modality::visual);
    else if (t == "t" || t == "textual")
      out.insert(Modality::textual);
    else
      throw UsageError("unknown modality '" + t + "' in " + what);
  }
  if (!out.count(Modality::audio))
    throw UsageError("audio modality is required in " + what);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

EngineConfig load_config(const std::string& path) {
  EngineConfig cfg;
  const json root = json::parse(read_file(path), nullptr, false);
  if (root.is_discarded() || !root.is_object())
    throw UsageError("config file '" + path + "' is not a JSON object");
  reject_unknown(root, {"pipeline", "verification", "metrics"}, "");

  if (root.contains("pipeline")) {
    const json& p = root.at("pipeline");
    reject_unknown(p, {"window", "shift", "merge_gap", "modalities", "cluster", "fusion"},
                   "pipeline.");
    if (p.contains("window")) cfg.pipeline.window = p.at("window").get<double>();
    if (p.contains("shift")) cfg.pipeline.shift = p.at("shift").get<double>();
    if (p.contains("merge_gap")) cfg.pipeline.merge_gap = p.at("merge_gap").get<double>();
    if (p.contains("modalities")) {
      cfg.pipeline.modalities =
          parse_modalities(p.at("modalities").get<std::vector<std::string>>(),
                           "pipeline.modalities");
      cfg.modalities_from_config = true;
    }
    if (p.contains("cluster")) {
      const json& c = p.at("cluster");
      reject_unknown(c,
                     {"max_speakers", "eigengap_min_k", "kmeans_restarts", "kmeans_seed",
                      "ahc_threshold", "prune_percentile"},
                     "pipeline.cluster.");
      auto& cc = cfg.pipeline.cluster;
      if (c.contains("max_speakers")) cc.max_speakers = c.at("max_speakers").get<int>();
      if (c.contains("eigengap_min_k")) cc.eigengap_min_k = c.at("eigengap_min_k").get<int>();
      if (c.contains("kmeans_restarts")) cc.kmeans_restarts = c.at("kmeans_restarts").get<int>();
      if (c.contains("kmeans_seed")) cc.kmeans_seed = c.at("kmeans_seed").get<uint64_t>();
      if (c.contains("ahc_threshold")) cc.ahc_threshold = c.at("ahc_threshold").get<double>();
      if (c.contains("prune_percentile") && !c.at("prune_percentile").is_null())
        cc.prune_percentile = c.at("prune_percentile").get<double>();
    }
    if (p.contains("fusion")) {
      const json& f = p.at("fusion");
      reject_unknown(f, {"alpha", "visual_overlap_min", "text_gap_max", "dialogue_gating"},
                     "pipeline.fusion.");
      auto& fc = cfg.pipeline.fusion;
      if (f.contains("alpha")) fc.alpha = f.at("alpha").get<double>();
      if (f.contains("visual_overlap_min"))
        fc.visual_overlap_min = f.at("visual_overlap_min").get<double>();
      if (f.contains("text_gap_max")) fc.text_gap_max = f.at("text_gap_max").get<double>();
      if (f.contains("dialogue_gating")) fc.dialogue_gating = f.at("dialogue_gating").get<bool>();
    }
  }
  if (root.contains("verification")) {
    const json& v = root.at("verification");
    reject_unknown(v, {"p_target", "c_miss", "c_fa", "asnorm_top_k"}, "verification.");
    if (v.contains("p_target")) cfg.verification.p_target = v.at("p_target").get<double>();
    if (v.contains("c_miss")) cfg.verification.c_miss = v.at("c_miss").get<double>();
    if (v.contains("c_fa")) cfg.verification.c_fa = v.at("c_fa").get<double>();
    if (v.contains("asnorm_top_k")) cfg.verification.asnorm_top_k = v.at("asnorm_top_k").get<int>();
  }
  if (root.contains("metrics")) {
    const json& m = root.at("metrics");
    reject_unknown(m, {"collar"}, "metrics.");
    if (m.contains("collar")) cfg.metrics.collar = m.at("collar").get<double>();
  }
  return cfg;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

// ---- subcommand state ----------------------------------------------------

struct Cli {
  // global
  std::string config_path;
  uint64_t seed = 7;
  int jobs = 1;

  // diarize
  std::string embeddings_path, visual_path, textual_path, out_path, modalities_arg,
      sidecar_path;
  // score-trials
  std::string trials_path, enroll_path, test_path, cohort_path, scores_out;
  // eval
  std::string ref_path, hyp_path, tref_path, thyp_path;
  double collar = -1.0;  // <0 means "not set"
  // propagate-constraints
  std::string affinity_path, constraints_path, matrix_out;
  double alpha = -1.0;  // <0 means "not set"
  // synth
  SynthSpec synth;
  int recordings = 0;  // 0 = subcommand default
  std::string out_dir;

  bool as_json = false;

  EngineConfig cfg;
  bool seed_set = false;

  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

void finish_config(Cli& c) {
  if (!c.config_path.empty()) {
    const bool keep_seed = c.seed_set;
    EngineConfig file_cfg = load_config(c.config_path);
    // Flags override config-file values.
    if (keep_seed) file_cfg.pipeline.cluster.kmeans_seed = c.seed;
    c.cfg = std::move(file_cfg);
  } else {
    c.cfg.pipeline.cluster.kmeans_seed = c.seed;
  }
  if (c.alpha >= 0) c.cfg.pipeline.fusion.alpha = c.alpha;
  if (c.collar >= 0) c.cfg.metrics.collar = c.collar;
  c.synth.seed = c.seed;
}

// ---- diarize ---------------------------------------------------------------

void cmd_diarize(Cli& c) {
  finish_config(c);
  auto [segs, emb] = load_embedding_records(read_file(c.embeddings_path));
  std::optional<VisualEvidence> visual;
  std::optional<TextualEvidence> textual;
  if (!c.visual_path.empty()) visual = load_visual_evidence(read_file(c.visual_path));
  if (!c.textual_path.empty()) textual = load_textual_evidence(read_file(c.textual_path));

  PipelineConfig pcfg = c.cfg.pipeline;
  if (!c.modalities_arg.empty()) {
    pcfg.modalities = parse_modalities(split_commas(c.modalities_arg), "--modalities");
  } else if (!c.cfg.modalities_from_config) {
    pcfg.modalities = {Modality::audio};
    if (visual) pcfg.modalities.insert(Modality::visual);
    if (textual) pcfg.modalities.insert(Modality::textual);
  }

  const DiarizeReport report = diarize(segs, emb, visual, textual, pcfg);
  for (const auto& w : report.warnings) *c.err << "warning: " << w << "\n";
  write_file(c.out_path, emit_rttm(report.diarization));

  json j;
  j["recording"] = report.diarization.recording;
  j["segments"] = segs.size();
  j["num_speakers"] = report.num_speakers;
  j["must_links"] = report.must_links;
  j["cannot_links"] = report.cannot_links;
  j["eigenvalues"] = report.eigenvalues;
  j["out"] = c.out_path;
  if (!c.sidecar_path.empty()) write_file(c.sidecar_path, j.dump(2) + "\n");
  if (c.as_json)
    *c.out << j.dump() << "\n";
  else
    *c.out << "wrote " << c.out_path << ": " << report.num_speakers << " speakers, "
           << report.diarization.turns.size() << " turns\n";
}

// ---- score-trials ----------------------------------------------------------

void cmd_score_trials(Cli& c) {
  finish_config(c);
  const auto trials = load_trial_list(read_file(c.trials_path));
  const auto enroll = load_embedding_table(read_file(c.enroll_path));
  const auto test = load_embedding_table(read_file(c.test_path));
  std::vector<Vector> cohort;
  if (!c.cohort_path.empty()) {
    for (const auto& [id, vec] : load_embedding_table(read_file(c.cohort_path)))
      cohort.push_back(vec);
  }

  auto lookup = [](const std::map<std::string, Vector>& table, const std::string& id,
                   const char* side) -> const Vector& {
    const auto it = table.find(id);
    if (it == table.end())
      throw Error(errc::unknown_id, std::string("unknown ") + side + " id '" + id + "'");
    return it->second;
  };

  TrialScoreSet scored;
  std::string lines;
  for (const auto& t : trials) {
    const Vector& e = lookup(enroll, t.enroll, "enroll");
    const Vector& x = lookup(test, t.test, "test");
    double s = cosine_score(e, x);
    if (!cohort.empty()) {
      std::vector<double> ec, tc;
      ec.reserve(cohort.size());
      tc.reserve(cohort.size());
      for (const auto& cv : cohort) {
        ec.push_back(cosine_score(e, cv));
        tc.push_back(cosine_score(x, cv));
      }
      s = asnorm_score(s, ec, tc, c.cfg.verification.asnorm_top_k);
    }
    scored.push_back(TrialScore{s, t.target});
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", s);
    lines += t.enroll + " " + t.test + " " + buf + (t.target ? " target\n" : " nontarget\n");
  }

  if (!c.scores_out.empty())
    write_file(c.scores_out, lines);
  else if (!c.as_json)
    *c.out << lines;

  long n_target = 0, n_nontarget = 0;
  for (const auto& t : scored) (t.target ? n_target : n_nontarget)++;

  json j;
  j["trials"] = scored.size();
  j["targets"] = n_target;
  j["nontargets"] = n_nontarget;
  if (n_target > 0 && n_nontarget > 0) {
    const auto [eer, eer_thr] = compute_eer(scored);
    const auto [dcf, dcf_thr] = compute_min_dcf(scored, c.cfg.verification);
    j["eer"] = eer;
    j["eer_threshold"] = finite_or_null(eer_thr);
    j["min_dcf"] = dcf;
    j["min_dcf_threshold"] = finite_or_null(dcf_thr);
    if (!c.as_json)
      *c.out << "EER% " << pct(eer) << "  minDCF " << dcf << "\n";
  } else {
    *c.err << "warning: need both targets and nontargets for EER/minDCF\n";
  }
  if (c.as_json) *c.out << j.dump() << "\n";
}

// ---- eval ------------------------------------------------------------------

void cmd_eval(Cli& c) {
  finish_config(c);
  const auto refs = parse_rttm(read_file(c.ref_path));
  const auto hyps = parse_rttm(read_file(c.hyp_path));
  if (refs.empty()) throw Error(errc::empty_reference, "reference RTTM has no SPEAKER lines");
  std::map<std::string, const Diarization*> hyp_by_rec;
  for (const auto& h : hyps) hyp_by_rec[h.recording] = &h;
  for (const auto& h : hyps) {
    bool known = false;
    for (const auto& r : refs) known |= r.recording == h.recording;
    if (!known) *c.err << "warning: hypothesis recording '" << h.recording << "' not in reference; ignored\n";
  }
  if (c.tref_path.empty() != c.thyp_path.empty())
    throw UsageError("--transcripts-ref and --transcripts-hyp must be given together");

  const bool with_cpwer = !c.tref_path.empty();
  CpwerResult cpwer;
  if (with_cpwer)
    cpwer = compute_cpwer(load_transcript_set(read_file(c.tref_path)),
                          load_transcript_set(read_file(c.thyp_path)));

  DerBreakdown total;
  double jer_sum = 0;
  long spk_sum = 0;
  json per_rec = json::object();
  std::string table =
      "recording            DER%   MISS%     FA%   CONF%    JER%\n";
  for (const auto& ref : refs) {
    const Diarization empty{ref.recording, {}};
    const auto it = hyp_by_rec.find(ref.recording);
    const Diarization& hyp = it != hyp_by_rec.end() ? *it->second : empty;
    const DerBreakdown der = compute_der(ref, hyp, c.cfg.metrics);
    const double jer = compute_jer(ref, hyp);
    std::set<std::string> speakers;
    for (const auto& t : ref.turns) speakers.insert(t.speaker);
    total.missed += der.missed;
    total.false_alarm += der.false_alarm;
    total.confusion += der.confusion;
    total.scored += der.scored;
    jer_sum += jer * static_cast<double>(speakers.size());
    spk_sum += static_cast<long>(speakers.size());
    const double s = der.scored > 0 ? der.scored : 1.0;
    char row[160];
    std::snprintf(row, sizeof row, "%-18s %6s  %6s  %6s  %6s  %6s\n", ref.recording.c_str(),
                  pct(der.der()).c_str(), pct(der.missed / s).c_str(),
                  pct(der.false_alarm / s).c_str(), pct(der.confusion / s).c_str(),
                  pct(jer).c_str());
    table += row;
    json rj;
    rj["der"] = der.der();
    rj["missed"] = der.missed;
    rj["false_alarm"] = der.false_alarm;
    rj["confusion"] = der.confusion;
    rj["scored"] = der.scored;
    rj["jer"] = jer;
    per_rec[ref.recording] = rj;
  }
  const double s = total.scored > 0 ? total.scored : 1.0;
  const double jer_mean = spk_sum > 0 ? jer_sum / static_cast<double>(spk_sum) : 0.0;
  char row[160];
  std::snprintf(row, sizeof row, "%-18s %6s  %6s  %6s  %6s  %6s\n", "TOTAL",
                pct(total.der()).c_str(), pct(total.missed / s).c_str(),
                pct(total.false_alarm / s).c_str(), pct(total.confusion / s).c_str(),
                pct(jer_mean).c_str());
  table += row;
  if (with_cpwer) table += "cpWER% " + pct(cpwer.cpwer) + "\n";

  json j;
  j["der"] = total.der();
  j["missed_seconds"] = total.missed;
  j["false_alarm_seconds"] = total.false_alarm;
  j["confusion_seconds"] = total.confusion;
  j["scored_seconds"] = total.scored;
  j["jer"] = jer_mean;
  if (with_cpwer) j["cpwer"] = cpwer.cpwer;
  j["recordings"] = per_rec;

  if (c.as_json)
    *c.out << j.dump() << "\n";
  else
    *c.out << table;
}

// ---- propagate-constraints ---------------------------------------------------

void cmd_propagate(Cli& c) {
  finish_config(c);
  const AffinityMatrix w(parse_matrix_text(read_file(c.affinity_path)));
  const ConstraintMatrix z(parse_matrix_text(read_file(c.constraints_path)));
  const PropagatedConstraints f = e2cp_propagate(w, z, c.cfg.pipeline.fusion);
  const std::string dump = emit_matrix_text(f.f, 6);
  if (!c.matrix_out.empty())
    write_file(c.matrix_out, dump);
  else if (!c.as_json)
    *c.out << dump;
  if (c.as_json) {
    json j;
    j["n"] = f.f.rows();
    j["alpha"] = c.cfg.pipeline.fusion.alpha;
    j["max_abs"] = f.f.cwiseAbs().maxCoeff();
    *c.out << j.dump() << "\n";
  }
}

// ---- gen-synth / ablation ----------------------------------------------------

std::string kind_name(TextEventKind k) {
  switch (k) {
    case TextEventKind::turn_change: return "turn_change";
    case TextEventKind::dialogue_on: return "dialogue_on";
    case TextEventKind::dialogue_off: return "dialogue_off";
  }
  return "turn_change";
}

void cmd_gen_synth(Cli& c) {
  finish_config(c);
  if (c.recordings == 0) c.recordings = 1;
  if (c.recordings < 1) throw UsageError("--recordings must be >= 1");
  fs::create_directories(c.out_dir);

  std::vector<Conversation> corpus(c.recordings);
  parallel_for(c.recordings, c.jobs, [&](int i) {
    SynthSpec s = c.synth;
    s.seed = c.synth.seed + static_cast<uint64_t>(i);
    char name[32];
    std::snprintf(name, sizeof name, "rec%03d", i);
    corpus[i] = gen_conversation(s, name);
  });

  std::vector<std::string> files;
  std::string rttm;
  std::string transcripts;
  for (int i = 0; i < c.recordings; ++i) {
    const Conversation& conv = corpus[i];
    const std::string& rec = conv.truth.recording;

    std::string emb;
    for (size_t r = 0; r < conv.segments.size(); ++r) {
      json line;
      line["recording"] = rec;
      line["start"] = conv.segments[r].start;
      line["end"] = conv.segments[r].end;
      const auto& row = conv.embeddings.rows.row(static_cast<Eigen::Index>(r));
      std::vector<double> vec(row.data(), row.data() + row.size());
      line["vector"] = vec;
      emb += line.dump() + "\n";
    }
    std::string vis;
    for (const auto& r : conv.visual) {
      json line;
      line["start"] = r.start;
      line["end"] = r.end;
      line["face_cluster"] = r.face_cluster;
      line["confidence"] = r.confidence;
      vis += line.dump() + "\n";
    }
    std::string txt;
    for (const auto& r : conv.textual) {
      json line;
      line["time"] = r.time;
      line["kind"] = kind_name(r.kind);
      line["confidence"] = r.confidence;
      txt += line.dump() + "\n";
    }
    const std::string base = (fs::path(c.out_dir) / rec).string();
    write_file(base + ".embeddings.jsonl", emb);
    write_file(base + ".visual.jsonl", vis);
    write_file(base + ".textual.jsonl", txt);
    files.push_back(base + ".embeddings.jsonl");
    files.push_back(base + ".visual.jsonl");
    files.push_back(base + ".textual.jsonl");

    rttm += emit_rttm(conv.truth);
    for (const auto& st : tokens_from_timeline(conv.truth, c.synth.duration)) {
      json line;
      line["recording"] = rec;
      line["speaker"] = st.speaker;
      line["words"] = st.words;
      transcripts += line.dump() + "\n";
    }
  }
  const std::string rttm_path = (fs::path(c.out_dir) / "ref.rttm").string();
  const std::string tr_path = (fs::path(c.out_dir) / "ref_transcripts.jsonl").string();
  write_file(rttm_path, rttm);
  write_file(tr_path, transcripts);
  files.push_back(rttm_path);
  files.push_back(tr_path);

  if (c.as_json) {
    json j;
    j["out_dir"] = c.out_dir;
    j["recordings"] = c.recordings;
    j["files"] = files;
    *c.out << j.dump() << "\n";
  } else {
    *c.out << "wrote " << files.size() << " files under " << c.out_dir << "\n";
  }
}

void cmd_ablation(Cli& c) {
  finish_config(c);
  if (c.recordings == 0) c.recordings = 30;
  if (c.recordings < 1) throw UsageError("--recordings must be >= 1");
  const AblationReport report = run_ablation(c.synth, c.recordings, c.cfg.pipeline, c.jobs);
  if (c.as_json) {
    json rows = json::array();
    for (const auto& r : report.rows) {
      json row;
      row["method"] = r.method;
      row["modality"] = r.modality;
      row["der"] = r.der;
      row["jer"] = r.jer;
      row["cpwer"] = r.cpwer;
      row["per_recording_der"] = r.per_recording_der;
      rows.push_back(row);
    }
    json j;
    j["recordings"] = c.recordings;
    j["seed"] = c.synth.seed;
    j["rows"] = rows;
    *c.out << j.dump() << "\n";
  } else {
    *c.out << report.table();
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Cli c;
  c.out = &out;
  c.err = &err;

  CLI::App app{"diafuse: multimodal speaker diarization, scoring, and evaluation"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand
  app.failure_message(CLI::FailureMessage::help);
  app.add_option("--config", c.config_path, "JSON config file; flags override its values");
  auto* seed_opt = app.add_option("--seed", c.seed, "seed for all randomness (default 7)");
  app.add_option("--jobs", c.jobs, "max parallel recordings (default 1)");

  auto add_json = [&](CLI::App* sub) {
    sub->add_flag("--json", c.as_json, "emit a single JSON object of the metrics");
  };

  auto* diar = app.add_subcommand("diarize", "embeddings (+ evidence) -> RTTM hypothesis");
  diar->add_option("--embeddings", c.embeddings_path, "embedding records (JSONL)")->required();
  diar->add_option("--visual", c.visual_path, "visual evidence (JSONL)");
  diar->add_option("--textual", c.textual_path, "textual evidence (JSONL)");
  diar->add_option("--out", c.out_path, "output RTTM path")->required();
  diar->add_option("--modalities", c.modalities_arg, "comma list of a,v,t (default: inferred)");
  diar->add_option("--sidecar", c.sidecar_path, "write a JSON sidecar with run details");
  add_json(diar);

  auto* score = app.add_subcommand("score-trials", "cosine trial scoring with EER/minDCF");
  score->add_option("--trials", c.trials_path, "trial list")->required();
  score->add_option("--enroll-emb", c.enroll_path, "enroll embeddings (JSONL)")->required();
  score->add_option("--test-emb", c.test_path, "test embeddings (JSONL)")->required();
  score->add_option("--cohort", c.cohort_path, "cohort embeddings for AS-Norm (JSONL)");
  score->add_option("--out", c.scores_out, "write `enroll test score label` lines here");
  add_json(score);

  auto* ev = app.add_subcommand("eval", "score hypothesis RTTM against reference");
  ev->add_option("--ref", c.ref_path, "reference RTTM")->required();
  ev->add_option("--hyp", c.hyp_path, "hypothesis RTTM")->required();
  ev->add_option("--transcripts-ref", c.tref_path, "reference transcripts (JSONL)");
  ev->add_option("--transcripts-hyp", c.thyp_path, "hypothesis transcripts (JSONL)");
  ev->add_option("--collar", c.collar, "scoring collar in seconds (default 0.25)");
  add_json(ev);

  auto* prop = app.add_subcommand("propagate-constraints",
                                  "run constraint propagation on matrix dumps");
  prop->add_option("--affinity", c.affinity_path, "affinity matrix (decimal text)")->required();
  prop->add_option("--constraints", c.constraints_path, "constraint matrix (decimal text)")
      ->required();
  prop->add_option("--alpha", c.alpha, "propagation strength (default 0.25)");
  prop->add_option("--out", c.matrix_out, "write the propagated matrix here");
  add_json(prop);

  auto add_synth_flags = [&](CLI::App* sub) {
    sub->add_option("--speakers", c.synth.speakers, "number of speakers (default 3)");
    sub->add_option("--dim", c.synth.dim, "embedding dimension (default 64)");
    sub->add_option("--sep", c.synth.sep, "centroid separation, radians (default 1.0)");
    sub->add_option("--noise", c.synth.noise, "within-speaker angular std (default 0.1)");
    sub->add_option("--duration", c.synth.duration, "seconds per recording (default 60)");
    sub->add_option("--turn-mean", c.synth.turn_mean, "mean turn length (default 3)");
    sub->add_option("--evidence-noise-visual", c.synth.evidence_noise_visual,
                    "visual corruption probability (default 0)");
    sub->add_option("--evidence-noise-textual", c.synth.evidence_noise_textual,
                    "textual corruption probability (default 0)");
    sub->add_option("--recordings", c.recordings, "number of recordings");
  };

  auto* gen = app.add_subcommand("gen-synth", "write a synthetic corpus in the engine formats");
  add_synth_flags(gen);
  gen->add_option("--out-dir", c.out_dir, "output directory")->required();
  add_json(gen);

  auto* abl = app.add_subcommand("ablation", "modality ablation over synthetic conversations");
  add_synth_flags(abl);
  add_json(abl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  c.seed_set = seed_opt->count() > 0;

  try {
    if (app.got_subcommand(diar)) cmd_diarize(c);
    else if (app.got_subcommand(score)) cmd_score_trials(c);
    else if (app.got_subcommand(ev)) cmd_eval(c);
    else if (app.got_subcommand(prop)) cmd_propagate(c);
    else if (app.got_subcommand(gen)) cmd_gen_synth(c);
    else if (app.got_subcommand(abl)) cmd_ablation(c);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace diafuse

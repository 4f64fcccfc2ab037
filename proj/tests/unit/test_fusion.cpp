#include <doctest.h>

#include <cmath>
#include <vector>

#include "diafuse/error.hpp"
#include "diafuse/fusion.hpp"
#include "diafuse/synth.hpp"
#include "test_util.hpp"

using namespace diafuse;

namespace {

SegmentList segs_at(const std::vector<std::pair<double, double>>& spans) {
  SegmentList out;
  for (const auto& [s, e] : spans) out.push_back(Segment{"r", s, e, ""});
  return out;
}

Matrix ground_truth_z(const std::vector<int>& labels) {
  const Eigen::Index n = static_cast<Eigen::Index>(labels.size());
  Matrix z(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      z(i, j) = i == j ? 0.0 : (labels[i] == labels[j] ? 1.0 : -1.0);
  return z;
}

}  // namespace

TEST_CASE("visual constraints attach by coverage") {
  const auto segs = segs_at({{0, 2}, {2, 4}, {4, 6}});
  VisualEvidence v = {
      {0, 2, "f0", 1.0},
      {2, 4, "f0", 1.0},
      {4, 4.5, "f1", 1.0},  // 25% coverage: below the 0.5 default
  };
  const auto z = visual_constraints(v, segs, {});
  CHECK(z.mat()(0, 1) == doctest::Approx(1.0));
  CHECK(z.mat()(0, 2) == doctest::Approx(0.0));
  CHECK(z.mat()(1, 2) == doctest::Approx(0.0));
}

TEST_CASE("visual constraints cannot-link across clusters") {
  const auto segs = segs_at({{0, 2}, {2, 4}});
  VisualEvidence v = {{0, 2, "f0", 0.8}, {2, 4, "f1", 0.6}};
  const auto z = visual_constraints(v, segs, {});
  CHECK(z.mat()(0, 1) == doctest::Approx(-0.6));
}

TEST_CASE("visual attachment picks the highest coverage cluster") {
  const auto segs = segs_at({{0, 10}, {10, 20}});
  VisualEvidence v = {{0, 4, "f1", 1.0}, {0, 10, "f0", 1.0}, {10, 20, "f0", 1.0}};
  const auto z = visual_constraints(v, segs, {});
  CHECK(z.mat()(0, 1) == doctest::Approx(1.0));  // both attach to f0
}

TEST_CASE("textual constraints on adjacent pairs") {
  const auto segs = segs_at({{0, 2}, {2.5, 4}, {10, 12}});
  FusionConfig cfg;
  cfg.dialogue_gating = false;
  TextualEvidence t = {{2.2, TextEventKind::turn_change, 0.9}};
  const auto z = textual_constraints(t, segs, cfg);
  CHECK(z.mat()(0, 1) == doctest::Approx(-0.9));
  CHECK(z.mat()(1, 2) == doctest::Approx(0.0));  // 6 s gap > 1 s

  const auto z2 = textual_constraints({}, segs, cfg);
  CHECK(z2.mat()(0, 1) == doctest::Approx(0.5));  // no change point: weak must-link
}

TEST_CASE("textual constraints honor dialogue gating") {
  const auto segs = segs_at({{0, 2}, {2.2, 4}, {4.5, 6}});
  TextualEvidence gated = {{0.0, TextEventKind::dialogue_on, 1.0},
                           {2.3, TextEventKind::dialogue_off, 1.0}};
  const auto z = textual_constraints(gated, segs, {});
  CHECK(z.mat()(0, 1) == doctest::Approx(0.5));  // inside the span
  CHECK(z.mat()(1, 2) == doctest::Approx(0.0));  // outside: gated away

  FusionConfig off;
  off.dialogue_gating = false;
  const auto z2 = textual_constraints(gated, segs, off);
  CHECK(z2.mat()(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("textual change point near a touching boundary") {
  const auto segs = segs_at({{0, 2}, {2, 4}});
  FusionConfig cfg;
  cfg.dialogue_gating = false;
  TextualEvidence t = {{2.2, TextEventKind::turn_change, 0.7}};  // within 0.25 s
  CHECK(textual_constraints(t, segs, cfg).mat()(0, 1) == doctest::Approx(-0.7));
  TextualEvidence far = {{2.4, TextEventKind::turn_change, 0.7}};  // outside the window
  CHECK(textual_constraints(far, segs, cfg).mat()(0, 1) == doctest::Approx(0.5));
}

TEST_CASE("merge constraints") {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 1) = a(1, 0) = 0.8;
  b(0, 1) = b(1, 0) = -0.6;
  CHECK(merge_constraints(ConstraintMatrix(a), ConstraintMatrix(b)).mat()(0, 1) ==
        doctest::Approx(0.0));
  CHECK(merge_constraints(ConstraintMatrix(a), ConstraintMatrix::zeros(2)).mat()(0, 1) ==
        doctest::Approx(0.8));
  Matrix c = Matrix::Zero(2, 2);
  c(0, 1) = c(1, 0) = 0.5;
  Matrix d = Matrix::Zero(2, 2);
  d(0, 1) = d(1, 0) = 0.7;
  CHECK(merge_constraints(ConstraintMatrix(c), ConstraintMatrix(d)).mat()(0, 1) ==
        doctest::Approx(0.7));
  CHECK_THROWS_AS(merge_constraints(ConstraintMatrix::zeros(2), ConstraintMatrix::zeros(3)),
                  Error);
}

TEST_CASE("e2cp zero constraints propagate to zero") {
  Rng rng(61);
  const AffinityMatrix w(testutil::random_affinity(rng, 6));
  const auto f = e2cp_propagate(w, ConstraintMatrix::zeros(6), {});
  CHECK(f.f.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("e2cp alpha zero returns the constraints unchanged") {
  Rng rng(67);
  const AffinityMatrix w(testutil::random_affinity(rng, 5));
  const ConstraintMatrix z(testutil::random_constraints(rng, 5));
  FusionConfig cfg;
  cfg.alpha = 0.0;
  const auto f = e2cp_propagate(w, z, cfg);
  CHECK((f.f - z.mat()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("e2cp matches the iterative oracle") {
  Rng rng(71);
  for (const double alpha : {0.1, 0.25, 0.5, 0.9}) {
    for (int iter = 0; iter < 10; ++iter) {
      const int n = 3 + static_cast<int>(rng.integer(10));
      const AffinityMatrix w(testutil::random_affinity(rng, n));
      const ConstraintMatrix z(testutil::random_constraints(rng, n));
      FusionConfig cfg;
      cfg.alpha = alpha;
      const auto f = e2cp_propagate(w, z, cfg);
      const Matrix oracle = testutil::e2cp_iterative_oracle(w.mat(), z.mat(), alpha);
      CHECK((f.f - oracle).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("e2cp output is symmetric and bounded") {
  Rng rng(73);
  for (int iter = 0; iter < 20; ++iter) {
    const int n = 2 + static_cast<int>(rng.integer(12));
    const AffinityMatrix w(testutil::random_affinity(rng, n));
    const ConstraintMatrix z(testutil::random_constraints(rng, n));
    const auto f = e2cp_propagate(w, z, {});
    CHECK((f.f - f.f.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(f.f.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    for (Eigen::Index i = 0; i < n; ++i) CHECK(f.f(i, i) == doctest::Approx(0.0));
  }
}

TEST_CASE("e2cp is linear in Z before clamping") {
  Rng rng(79);
  const int n = 8;
  const AffinityMatrix w(testutil::random_affinity(rng, n));
  // Small magnitudes keep everything away from the clamp.
  const Matrix z1 = testutil::random_constraints(rng, n, 0.2);
  const Matrix z2 = testutil::random_constraints(rng, n, 0.2);
  const auto f1 = e2cp_propagate(w, ConstraintMatrix(z1), {});
  const auto f2 = e2cp_propagate(w, ConstraintMatrix(z2), {});
  const auto f12 = e2cp_propagate(w, ConstraintMatrix(z1 + z2), {});
  CHECK((f12.f - f1.f - f2.f).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("adjust_affinity formula and saturation") {
  Matrix wm = Matrix::Ones(2, 2);
  wm(0, 1) = wm(1, 0) = 0.5;
  const AffinityMatrix w(wm);

  Matrix f0 = Matrix::Zero(2, 2);
  CHECK(adjust_affinity(w, {f0}).mat()(0, 1) == doctest::Approx(0.5));

  Matrix fpos = Matrix::Zero(2, 2);
  fpos(0, 1) = fpos(1, 0) = 1.0;
  CHECK(adjust_affinity(w, {fpos}).mat()(0, 1) == doctest::Approx(1.0));

  Matrix fneg = Matrix::Zero(2, 2);
  fneg(0, 1) = fneg(1, 0) = -1.0;
  CHECK(adjust_affinity(w, {fneg}).mat()(0, 1) == doctest::Approx(0.0));

  Matrix fhalf = Matrix::Zero(2, 2);
  fhalf(0, 1) = fhalf(1, 0) = 0.5;
  CHECK(adjust_affinity(w, {fhalf}).mat()(0, 1) == doctest::Approx(0.75));
}

TEST_CASE("adjust_affinity is monotone in F") {
  Rng rng(83);
  for (int iter = 0; iter < 50; ++iter) {
    const double wij = rng.uniform();
    double f1 = 2.0 * rng.uniform() - 1.0;
    double f2 = 2.0 * rng.uniform() - 1.0;
    if (f1 > f2) std::swap(f1, f2);
    auto apply = [&](double f) {
      return f >= 0 ? 1.0 - (1.0 - f) * (1.0 - wij) : (1.0 + f) * wij;
    };
    CHECK(apply(f1) <= apply(f2) + 1e-12);
  }
}

TEST_CASE("fusion fidelity: complete constraints force exact recovery") {
  int qualifying = 0, recovered = 0;
  for (int seed = 0; qualifying < 20 && seed < 200; ++seed) {
    SynthSpec spec;
    spec.speakers = 3;
    spec.dim = 64;
    spec.sep = 0.3;
    spec.noise = 0.4;
    spec.seed = 1000 + seed;
    const auto [emb, truth] = gen_embeddings(spec, 20);
    const auto w = build_affinity(emb);
    const auto base = spectral_cluster(w);
    if (adjusted_rand_index(base.ids, truth.ids) >= 0.9) continue;  // not hard enough
    qualifying++;
    FusionConfig cfg;
    cfg.alpha = 0.25;
    const auto f = e2cp_propagate(w, ConstraintMatrix(ground_truth_z(truth.ids)), cfg);
    const auto lab = spectral_cluster(adjust_affinity(w, f));
    if (adjusted_rand_index(lab.ids, truth.ids) == doctest::Approx(1.0)) recovered++;
  }
  CHECK(qualifying == 20);
  CHECK(recovered == 20);
}

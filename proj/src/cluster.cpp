#include "diafuse/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "diafuse/error.hpp"
#include "diafuse/rng.hpp"

namespace diafuse {

AffinityMatrix::AffinityMatrix(Matrix w) {
  if (w.rows() == 0 || w.rows() != w.cols())
    throw Error(errc::invalid_matrix, "affinity must be square and non-empty");
  const Eigen::Index n = w.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(w(i, i) - 1.0) > 1e-9)
      throw Error(errc::invalid_matrix, "affinity diagonal must be 1");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(w(i, j) - w(j, i)) > 1e-9)
        throw Error(errc::invalid_matrix, "affinity must be symmetric");
      if (w(i, j) < -1e-9 || w(i, j) > 1.0 + 1e-9)
        throw Error(errc::invalid_matrix, "affinity entries must lie in [0,1]");
    }
  }
  w_ = ((w + w.transpose()) * 0.5).cwiseMax(0.0).cwiseMin(1.0);
  w_.diagonal().setOnes();
}

AffinityMatrix build_affinity(const EmbeddingSet& emb, const ClusterConfig& cfg) {
  const Eigen::Index n = emb.rows.rows();
  if (n < 1) throw Error(errc::empty_input, "embedding set is empty");
  Matrix w = (Matrix::Ones(n, n) + emb.rows * emb.rows.transpose()) * 0.5;
  w = w.cwiseMax(0.0).cwiseMin(1.0);
  w.diagonal().setOnes();

  if (cfg.prune_percentile) {
    const double p = *cfg.prune_percentile;
    if (p <= 0.0 || p >= 100.0)
      throw Error(errc::invalid_config, "prune_percentile must lie in (0,100)");
    std::vector<double> vals;
    vals.reserve(static_cast<size_t>(n) * (n - 1) / 2);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) vals.push_back(w(i, j));
    if (!vals.empty()) {
      std::sort(vals.begin(), vals.end());
      const double rank = p / 100.0 * static_cast<double>(vals.size() - 1);
      const size_t lo = static_cast<size_t>(rank);
      const double frac = rank - static_cast<double>(lo);
      const double thr = lo + 1 < vals.size() ? vals[lo] + frac * (vals[lo + 1] - vals[lo])
                                              : vals[lo];
      Matrix pruned = w;
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (i != j && pruned(i, j) < thr) pruned(i, j) = 0.0;
      w = pruned.cwiseMax(pruned.transpose().eval());
    }
  }
  return AffinityMatrix(w);
}

EigResult eig_laplacian(const AffinityMatrix& w) {
  const Eigen::Index n = w.size();
  const Vector deg = w.mat().rowwise().sum();
  for (Eigen::Index i = 0; i < n; ++i)
    if (deg(i) < 1e-12) throw Error(errc::isolated_node, "node with zero degree");
  const Vector dinv_sqrt = deg.cwiseSqrt().cwiseInverse();
  Matrix lap = Matrix::Identity(n, n) -
               dinv_sqrt.asDiagonal() * w.mat() * dinv_sqrt.asDiagonal();
  lap = (lap + lap.transpose()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(lap);
  if (solver.info() != Eigen::Success)
    throw Error(errc::singular_system, "Laplacian eigendecomposition failed");
  EigResult out;
  out.vectors = solver.eigenvectors();
  out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
  return out;
}

namespace {

Matrix normalized_rows(const Matrix& vectors, int k) {
  Matrix rows = vectors.leftCols(k);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const double norm = rows.row(i).norm();
    if (norm >= 1e-12) rows.row(i) /= norm;
  }
  return rows;
}

}  // namespace

SpectralEmbedding spectral_embed(const AffinityMatrix& w, int k) {
  if (k < 1 || k > w.size())
    throw Error(errc::invalid_config, "k must lie in [1, N]");
  EigResult eig = eig_laplacian(w);
  return {normalized_rows(eig.vectors, k), std::move(eig.values)};
}

int estimate_k(const std::vector<double>& eigenvalues, const ClusterConfig& cfg) {
  const int n = static_cast<int>(eigenvalues.size());
  if (n < 2) throw Error(errc::invalid_config, "need at least 2 eigenvalues");
  const int k_lo = std::max(1, cfg.eigengap_min_k);
  const int k_hi = std::max(k_lo, std::min(cfg.max_speakers, n - 1));
  int best_k = k_lo;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = k_lo; k <= k_hi && k < n; ++k) {
    const double gap = eigenvalues[k] - eigenvalues[k - 1];
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

namespace {

std::vector<int> kmeanspp_init(const Matrix& rows, int k, Rng& rng) {
  const Eigen::Index n = rows.rows();
  std::vector<int> centers;
  centers.reserve(k);
  centers.push_back(static_cast<int>(rng.integer(static_cast<uint64_t>(n))));
  Vector d2 = (rows.rowwise() - rows.row(centers[0])).rowwise().squaredNorm();
  while (static_cast<int>(centers.size()) < k) {
    const double total = d2.sum();
    int pick;
    if (total < 1e-300) {
      pick = static_cast<int>(rng.integer(static_cast<uint64_t>(n)));
    } else {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = static_cast<int>(n) - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2(i);
        if (acc >= r) {
          pick = static_cast<int>(i);
          break;
        }
      }
    }
    centers.push_back(pick);
    d2 = d2.cwiseMin((rows.rowwise() - rows.row(pick)).rowwise().squaredNorm());
  }
  return centers;
}

struct KmeansRun {
  std::vector<int> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Matrix& rows, int k, uint64_t seed) {
  const Eigen::Index n = rows.rows();
  Rng rng(seed);
  const auto centers = kmeanspp_init(rows, k, rng);
  Matrix centroids(k, rows.cols());
  for (int c = 0; c < k; ++c) centroids.row(c) = rows.row(centers[c]);

  std::vector<int> labels(n, 0);
  for (int iter = 0; iter < 300; ++iter) {
    // Assignment; ties go to the smaller centroid index.
    std::vector<int> count(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (rows.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double d = (rows.row(i) - centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      labels[i] = best;
      count[best]++;
    }

    // Re-seed empty clusters from the farthest point of a donor cluster.
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far_idx = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (count[labels[i]] < 2) continue;
        const double d = (rows.row(i) - centroids.row(labels[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far_idx = static_cast<int>(i);
        }
      }
      if (far_idx < 0) continue;  // all clusters singletons already
      count[labels[far_idx]]--;
      labels[far_idx] = c;
      count[c] = 1;
    }

    Matrix next = Matrix::Zero(k, rows.cols());
    std::vector<int> sizes(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      next.row(labels[i]) += rows.row(i);
      sizes[labels[i]]++;
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[c] > 0)
        next.row(c) /= sizes[c];
      else
        next.row(c) = centroids.row(c);
    }
    const double movement = (next - centroids).rowwise().norm().maxCoeff();
    centroids = next;
    if (movement < 1e-8) break;
  }

  KmeansRun run;
  run.labels = labels;
  run.inertia = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    run.inertia += (rows.row(i) - centroids.row(labels[i])).squaredNorm();
  return run;
}

}  // namespace

Labeling kmeans(const Matrix& rows, int k, const ClusterConfig& cfg) {
  const Eigen::Index n = rows.rows();
  if (k < 1 || k > n) throw Error(errc::invalid_config, "k must lie in [1, N]");
  KmeansRun best;
  const int restarts = std::max(1, cfg.kmeans_restarts);
  for (int r = 0; r < restarts; ++r) {
    KmeansRun run = kmeans_once(rows, k, cfg.kmeans_seed + static_cast<uint64_t>(r));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return Labeling{std::move(best.labels), k};
}

Labeling spectral_cluster(const AffinityMatrix& w, std::optional<int> k,
                          const ClusterConfig& cfg) {
  const Eigen::Index n = w.size();
  if (n == 1) return Labeling{{0}, 1};
  EigResult eig = eig_laplacian(w);
  const int kk = k ? *k : estimate_k(eig.values, cfg);
  if (kk < 1 || kk > n) throw Error(errc::invalid_config, "k must lie in [1, N]");
  if (kk == 1) return Labeling{std::vector<int>(n, 0), 1};
  return kmeans(normalized_rows(eig.vectors, kk), kk, cfg);
}

Labeling ahc_cluster(const EmbeddingSet& emb, const ClusterConfig& cfg) {
  const Eigen::Index n = emb.rows.rows();
  if (n < 1) throw Error(errc::empty_input, "embedding set is empty");

  // Active-cluster distance matrix, average linkage via Lance-Williams.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      dist[i][j] = 1.0 - emb.rows.row(i).dot(emb.rows.row(j));

  std::vector<std::vector<int>> members(n);
  for (Eigen::Index i = 0; i < n; ++i) members[i] = {static_cast<int>(i)};

  while (members.size() > 1) {
    const size_t m = members.size();
    size_t bi = 0, bj = 1;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j)
        if (dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }
    if (best > cfg.ahc_threshold) break;

    const double ni = static_cast<double>(members[bi].size());
    const double nj = static_cast<double>(members[bj].size());
    for (size_t l = 0; l < m; ++l) {
      if (l == bi || l == bj) continue;
      const double d = (ni * dist[bi][l] + nj * dist[bj][l]) / (ni + nj);
      dist[bi][l] = dist[l][bi] = d;
    }
    members[bi].insert(members[bi].end(), members[bj].begin(), members[bj].end());
    members.erase(members.begin() + static_cast<long>(bj));
    dist.erase(dist.begin() + static_cast<long>(bj));
    for (auto& row : dist) row.erase(row.begin() + static_cast<long>(bj));
  }

  // Label clusters 0..k-1 by smallest member index.
  std::vector<std::pair<int, size_t>> order;
  for (size_t c = 0; c < members.size(); ++c)
    order.emplace_back(*std::min_element(members[c].begin(), members[c].end()), c);
  std::sort(order.begin(), order.end());
  Labeling lab;
  lab.ids.assign(n, 0);
  lab.k = static_cast<int>(members.size());
  for (size_t rank = 0; rank < order.size(); ++rank)
    for (int idx : members[order[rank].second]) lab.ids[idx] = static_cast<int>(rank);
  return lab;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw Error(errc::dimension_mismatch, "labelings differ in length");
  const size_t n = a.size();
  if (n == 0) return 1.0;
  std::map<std::pair<int, int>, long> cells;
  std::map<int, long> ra, rb;
  for (size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}]++;
    ra[a[i]]++;
    rb[b[i]]++;
  }
  auto choose2 = [](long x) { return 0.5 * static_cast<double>(x) * (x - 1); };
  double sum_cells = 0.0, sum_a = 0.0, sum_b = 0.0;
  for (const auto& [key, c] : cells) sum_cells += choose2(c);
  for (const auto& [key, c] : ra) sum_a += choose2(c);
  for (const auto& [key, c] : rb) sum_b += choose2(c);
  const double total = choose2(static_cast<long>(n));
  const double expected = total > 0 ? sum_a * sum_b / total : 0.0;
  const double max_index = 0.5 * (sum_a + sum_b);
  const double denom = max_index - expected;
  if (std::abs(denom) < 1e-12) return 1.0;
  return (sum_cells - expected) / denom;
}

}  // namespace diafuse

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "diafuse/types.hpp"

namespace diafuse {

struct ClusterConfig {
  int max_speakers = 15;
  // Smallest k the eigengap may return. On connected affinity graphs the
  // 0 -> lambda_2 gap dominates every structural gap, so k=1 would always
  // win; starting at 2 makes the estimate usable whenever a recording has
  // at least two speakers.
  int eigengap_min_k = 2;
  int kmeans_restarts = 10;
  uint64_t kmeans_seed = 7;
  double ahc_threshold = 0.7;                  // cosine-distance cut
  std::optional<double> prune_percentile = {};  // in (0,100); off by default
};

// N x N similarity graph: symmetric, unit diagonal, entries in [0,1].
// Construction symmetrizes via (W + W^T)/2 to absorb float drift and rejects
// anything further than 1e-9 from a valid affinity.
class AffinityMatrix {
 public:
  explicit AffinityMatrix(Matrix w);
  const Matrix& mat() const { return w_; }
  Eigen::Index size() const { return w_.rows(); }

 private:
  Matrix w_;
};

// W_ij = (1 + cos(e_i, e_j)) / 2, diagonal forced to 1. With prune_percentile
// set, off-diagonal entries below that percentile are zeroed and the matrix
// re-symmetrized via elementwise max.
AffinityMatrix build_affinity(const EmbeddingSet& emb, const ClusterConfig& cfg = {});

// Eigendecomposition of the symmetric normalized Laplacian
// L = I - D^{-1/2} W D^{-1/2}, ascending eigenvalue order, orthonormal
// eigenvector columns.
struct EigResult {
  Matrix vectors;
  std::vector<double> values;
};
EigResult eig_laplacian(const AffinityMatrix& w);

// First k Laplacian eigenvectors as columns, rows normalized to unit norm
// (numerically zero rows stay zero); eigenvalues returned in full.
struct SpectralEmbedding {
  Matrix rows;
  std::vector<double> eigenvalues;
};
SpectralEmbedding spectral_embed(const AffinityMatrix& w, int k);

// Largest-eigengap estimate of the cluster count over
// k in [eigengap_min_k, min(max_speakers, N-1)], ties toward smaller k.
int estimate_k(const std::vector<double>& eigenvalues, const ClusterConfig& cfg = {});

// Seeded k-means++ with Lloyd iterations, best of kmeans_restarts restarts by
// within-cluster sum of squares; empty clusters re-seeded from the farthest
// point. Deterministic given config.
Labeling kmeans(const Matrix& rows, int k, const ClusterConfig& cfg = {});

// Normalized-Laplacian spectral clustering; k estimated by eigengap when
// absent.
Labeling spectral_cluster(const AffinityMatrix& w, std::optional<int> k = {},
                          const ClusterConfig& cfg = {});

// Average-linkage agglomeration on cosine distance; merging proceeds while
// the minimum inter-cluster distance is <= ahc_threshold, ties broken by the
// smallest (i, j) pair.
Labeling ahc_cluster(const EmbeddingSet& emb, const ClusterConfig& cfg = {});

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace diafuse

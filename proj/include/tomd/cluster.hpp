#pragma once

// k-means (k-means++ seeding, Lloyd) and normalized spectral clustering.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tomd/tensor.hpp"

namespace tomd {

struct ClusterAssignment {
  std::vector<int> labels;  // ids in 0..k-1
  std::size_t k = 0;
  double inertia = 0.0;
  std::vector<double> inertia_trace;  // after each Lloyd step (best replicate)
  std::size_t iterations = 0;
};

struct KmeansConfig {
  std::size_t max_iter = 300;
  std::size_t replicates = 1;  // best inertia wins; replicate r uses seed + r
};

// points: one sample per row.
ClusterAssignment kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KmeansConfig& cfg = {});

// I - D^{-1/2} ((M + M^T)/2) D^{-1/2}; zero-degree rows keep the identity row.
Matrix normalized_laplacian(const Matrix& affinity);

// k smallest eigenvectors of the normalized Laplacian, rows scaled to unit
// length (zero rows untouched).
Matrix spectral_embedding(const Matrix& affinity, std::size_t k);

struct SpectralConfig {
  KmeansConfig kmeans{300, 10};
};

ClusterAssignment spectral_clustering(const Matrix& affinity, std::size_t k, std::uint64_t seed,
                                      const SpectralConfig& cfg = {});

}  // namespace tomd

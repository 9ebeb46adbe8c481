#pragma once

// Multi-view test data: every cluster spans its own random low-dimensional
// subspace in every view, then a fraction of entries is grossly corrupted.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tomd/mvc.hpp"

namespace tomd {

struct SyntheticConfig {
  std::size_t clusters = 3;
  std::size_t per_cluster = 20;
  std::vector<std::size_t> features{30, 30};  // C_v, one entry per view
  std::size_t subspace_dim = 3;
  double corruption = 0.05;        // fraction of entries hit
  double corruption_scale = 1.0;   // corrupted entries get N(0, scale^2 * mean square) added
  bool normalize_columns = true;   // unit l2 columns before corruption
  std::uint64_t seed = 7;
};

// Labels are 0..clusters-1 in contiguous blocks; reshape dims are the
// near-cubic factorization of N^2.
MultiViewDataset make_synthetic(const SyntheticConfig& cfg);

// Scale every column of every view to unit l2 norm (zero columns untouched).
void normalize_columns(MultiViewDataset& d);

}  // namespace tomd

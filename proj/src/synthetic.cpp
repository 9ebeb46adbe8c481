#include "tomd/synthetic.hpp"

#include <cmath>
#include <random>

#include "tomd/error.hpp"

namespace tomd {

namespace {

Matrix gaussian(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
  return m;
}

void normalize(Matrix& x) {
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double nr = x.col(j).norm();
    if (nr > 0.0) x.col(j) /= nr;
  }
}

}  // namespace

void normalize_columns(MultiViewDataset& d) {
  for (auto& x : d.views) normalize(x);
}

MultiViewDataset make_synthetic(const SyntheticConfig& cfg) {
  if (cfg.clusters < 1 || cfg.per_cluster < 1) throw ValidationError("synthetic data needs clusters and samples");
  if (cfg.features.empty()) throw ValidationError("synthetic data needs at least one view");
  if (cfg.subspace_dim < 1) throw ValidationError("subspace_dim must be >= 1");
  if (cfg.corruption < 0.0 || cfg.corruption > 1.0) throw ValidationError("corruption must be in [0, 1]");
  const auto n = static_cast<Eigen::Index>(cfg.clusters * cfg.per_cluster);
  const auto dim = static_cast<Eigen::Index>(cfg.subspace_dim);
  const auto per = static_cast<Eigen::Index>(cfg.per_cluster);

  std::mt19937_64 rng(cfg.seed);
  MultiViewDataset d;
  for (const auto c_v : cfg.features) {
    if (c_v < 1) throw ValidationError("every view needs >= 1 feature");
    Matrix x(static_cast<Eigen::Index>(c_v), n);
    for (std::size_t k = 0; k < cfg.clusters; ++k) {
      const Matrix basis = gaussian(x.rows(), dim, rng);
      x.middleCols(static_cast<Eigen::Index>(k) * per, per) = basis * gaussian(dim, per, rng);
    }
    if (cfg.normalize_columns) normalize(x);
    d.views.push_back(std::move(x));
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& x : d.views) {
    const double rms = std::sqrt(x.squaredNorm() / static_cast<double>(x.size()));
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      for (Eigen::Index i = 0; i < x.rows(); ++i)
        if (unif(rng) < cfg.corruption) x(i, j) += cfg.corruption_scale * rms * normal(rng);
  }

  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i / per);
  d.labels = std::move(labels);
  d.reshape_dims = near_cubic_factorization(static_cast<std::size_t>(n));
  return d;
}

}  // namespace tomd

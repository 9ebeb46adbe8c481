#include "tomd/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tomd/error.hpp"
#include "tomd/linalg.hpp"

namespace tomd {

namespace {

using Index = Eigen::Index;

double sq_dist(const Matrix& a, Index i, const Matrix& b, Index j) { return (a.row(i) - b.row(j)).squaredNorm(); }

// k-means++: first center uniform, then proportional to squared distance.
Matrix seed_centers(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const Index n = x.rows();
  Matrix c(static_cast<Index>(k), x.cols());
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Index first = std::min<Index>(static_cast<Index>(unif(rng) * static_cast<double>(n)), n - 1);
  c.row(0) = x.row(first);
  Vector d2(n);
  for (Index i = 0; i < n; ++i) d2[i] = sq_dist(x, i, c, 0);
  for (std::size_t t = 1; t < k; ++t) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0.0) {
      const double r = unif(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > r && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::min<Index>(static_cast<Index>(unif(rng) * static_cast<double>(n)), n - 1);
    }
    c.row(static_cast<Index>(t)) = x.row(pick);
    for (Index i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(x, i, c, static_cast<Index>(t)));
  }
  return c;
}

ClusterAssignment lloyd(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
  const Index n = x.rows();
  const Index kk = static_cast<Index>(k);
  std::mt19937_64 rng(seed);
  Matrix c = seed_centers(x, k, rng);
  ClusterAssignment out;
  out.k = k;
  out.labels.assign(static_cast<std::size_t>(n), -1);
  Vector dist(n);

  auto assign = [&]() {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < kk; ++j) {
        const double d = sq_dist(x, i, c, j);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(j);
        }
      }
      dist[i] = bd;
      if (out.labels[static_cast<std::size_t>(i)] != best) {
        out.labels[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    return changed;
  };

  assign();
  for (std::size_t it = 0; it < max_iter; ++it) {
    Matrix sum = Matrix::Zero(kk, x.cols());
    std::vector<Index> count(k, 0);
    for (Index i = 0; i < n; ++i) {
      const auto l = out.labels[static_cast<std::size_t>(i)];
      sum.row(l) += x.row(i);
      ++count[static_cast<std::size_t>(l)];
    }
    for (Index j = 0; j < kk; ++j) {
      if (count[static_cast<std::size_t>(j)] > 0) {
        c.row(j) = sum.row(j) / static_cast<double>(count[static_cast<std::size_t>(j)]);
        continue;
      }
      // empty cluster: move it onto the point farthest from its center
      Index far = 0;
      dist.maxCoeff(&far);
      c.row(j) = x.row(far);
      dist[far] = 0.0;
    }
    const bool changed = assign();
    out.iterations = it + 1;
    out.inertia_trace.push_back(dist.sum());
    if (!changed) break;
  }
  out.inertia = dist.sum();
  return out;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, const KmeansConfig& cfg) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || k > n) throw ValidationError("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  if (!points.allFinite()) throw ValidationError("kmeans input has non-finite entries");
  ClusterAssignment best;
  for (std::size_t r = 0; r < std::max<std::size_t>(1, cfg.replicates); ++r) {
    ClusterAssignment a = lloyd(points, k, seed + r, cfg.max_iter);
    if (r == 0 || a.inertia < best.inertia) best = std::move(a);
  }
  return best;
}

Matrix normalized_laplacian(const Matrix& affinity) {
  if (affinity.rows() != affinity.cols()) throw ShapeError("affinity must be square");
  if (affinity.size() && affinity.minCoeff() < 0.0) throw AffinityError("affinity has negative entries");
  if (!affinity.allFinite()) throw AffinityError("affinity has non-finite entries");
  const Matrix w = 0.5 * (affinity + affinity.transpose());
  const Vector deg = w.rowwise().sum();
  Vector inv_sqrt(deg.size());
  for (Index i = 0; i < deg.size(); ++i) inv_sqrt[i] = deg[i] > 0.0 ? 1.0 / std::sqrt(deg[i]) : 0.0;
  Matrix l = -(inv_sqrt.asDiagonal() * w * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  return 0.5 * (l + l.transpose());
}

Matrix spectral_embedding(const Matrix& affinity, std::size_t k) {
  Matrix h = linalg::sym_eig_smallest(normalized_laplacian(affinity), k).vectors;
  for (Index i = 0; i < h.rows(); ++i) {
    const double nr = h.row(i).norm();
    if (nr > 0.0) h.row(i) /= nr;
  }
  return h;
}

ClusterAssignment spectral_clustering(const Matrix& affinity, std::size_t k, std::uint64_t seed,
                                      const SpectralConfig& cfg) {
  const auto n = static_cast<std::size_t>(affinity.rows());
  if (k < 1 || k > n) throw ValidationError("k = " + std::to_string(k) + " must be in [1, " + std::to_string(n) + "]");
  if (k == 1) {
    ClusterAssignment a;
    a.k = 1;
    a.labels.assign(n, 0);
    return a;
  }
  return kmeans(spectral_embedding(affinity, k), k, seed, cfg.kmeans);
}

}  // namespace tomd

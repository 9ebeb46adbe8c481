#include <doctest.h>

#include "oracles.hpp"
#include "tomd/cluster.hpp"
#include "tomd/metrics.hpp"

using namespace tomd;

namespace {

// k dense blocks with small noise off the blocks
Matrix block_affinity(const std::vector<std::size_t>& sizes, std::mt19937_64& rng, double noise) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = noise * u(rng);
  Eigen::Index off = 0;
  for (auto s : sizes) {
    const auto e = static_cast<Eigen::Index>(s);
    for (Eigen::Index j = off; j < off + e; ++j)
      for (Eigen::Index i = off; i < off + e; ++i) a(i, j) += 0.5 + 0.5 * u(rng);
    off += e;
  }
  return (a + a.transpose()) / 2;
}

std::vector<int> block_labels(const std::vector<std::size_t>& sizes) {
  std::vector<int> l;
  for (std::size_t b = 0; b < sizes.size(); ++b) l.insert(l.end(), sizes[b], static_cast<int>(b));
  return l;
}

}  // namespace

TEST_CASE("kmeans on a line") {
  Matrix x(4, 1);
  x << 0, 0.1, 10, 10.1;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = kmeans(x, 2, seed);
    CHECK(r.labels[0] == r.labels[1]);
    CHECK(r.labels[2] == r.labels[3]);
    CHECK(r.labels[0] != r.labels[2]);
    CHECK(std::abs(r.inertia - 0.01) <= 1e-12);
  }
}

TEST_CASE("kmeans edge cases") {
  std::mt19937_64 rng(1);
  Matrix x = oracle::random_matrix(6, 3, rng);
  auto r = kmeans(x, 6, 0);
  CHECK(r.inertia == 0);
  CHECK(oracle::distinct(r.labels) == 6);

  // duplicated points: fewer distinct locations than k must not crash
  Matrix d(5, 2);
  d << 1, 1, 1, 1, 1, 1, 2, 2, 2, 2;
  auto q = kmeans(d, 3, 4);
  CHECK(q.labels.size() == 5);
  CHECK(q.inertia == 0);
  CHECK(q.labels[0] == q.labels[1]);
  CHECK(q.labels[3] == q.labels[4]);
  CHECK(q.labels[0] != q.labels[3]);
}

TEST_CASE("Lloyd steps never raise the inertia") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    Matrix x = oracle::random_matrix(80, 4, rng);
    auto r = kmeans(x, 5, static_cast<std::uint64_t>(t), KmeansConfig{300, 3});
    REQUIRE_FALSE(r.inertia_trace.empty());
    for (std::size_t i = 1; i < r.inertia_trace.size(); ++i)
      CHECK(r.inertia_trace[i] <= r.inertia_trace[i - 1] * (1 + 1e-12));
    CHECK(std::abs(r.inertia_trace.back() - r.inertia) <= 1e-9 * (1 + r.inertia));
    for (int l : r.labels) CHECK((l >= 0 && l < 5));
  }
}

TEST_CASE("normalized Laplacian") {
  Matrix a(3, 3);
  a << 0, 1, 0,
       1, 0, 0,
       0, 0, 0;
  Matrix l = normalized_laplacian(a);
  Matrix expect(3, 3);
  expect << 1, -1, 0,
           -1, 1, 0,
            0, 0, 1;
  CHECK((l - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("spectral clustering separates blocks") {
  std::mt19937_64 rng(3);
  std::vector<std::size_t> sizes{7, 5, 9};
  Matrix a = block_affinity(sizes, rng, 0.02);
  const auto truth = block_labels(sizes);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto r = spectral_clustering(a, 3, seed);
    CHECK(accuracy(r.labels, truth) == 1.0);
  }
  auto one = spectral_clustering(a, 1, 0);
  CHECK(oracle::distinct(one.labels) == 1);

  // disconnected blocks: exact recovery for any seed
  Matrix b = block_affinity(sizes, rng, 0.0);
  for (std::uint64_t seed = 10; seed < 20; ++seed)
    CHECK(accuracy(spectral_clustering(b, 3, seed).labels, truth) == 1.0);
}

TEST_CASE("spectral clustering is permutation equivariant") {
  std::mt19937_64 rng(4);
  std::vector<std::size_t> sizes{6, 6, 6};
  Matrix a = block_affinity(sizes, rng, 0.05);
  std::vector<int> perm(18);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix pa(18, 18);
  for (int i = 0; i < 18; ++i)
    for (int j = 0; j < 18; ++j) pa(i, j) = a(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  auto r = spectral_clustering(a, 3, 1);
  auto q = spectral_clustering(pa, 3, 1);
  std::vector<int> back(18);
  for (std::size_t i = 0; i < 18; ++i) back[static_cast<std::size_t>(perm[i])] = q.labels[i];
  CHECK(accuracy(back, r.labels) == 1.0);
}

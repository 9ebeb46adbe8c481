#include <doctest.h>

#include <omp.h>

#include "oracles.hpp"
#include "tomd/kernels.hpp"

using namespace tomd;
namespace k = tomd::kernels;

// The OpenMP kernels must agree bit for bit with their serial twins, for any
// thread count.

namespace {

std::vector<double> buffer(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("unfold / fold twins") {
  std::mt19937_64 rng(1);
  for (k::ModeBlock b : {k::ModeBlock{3, 4, 5}, k::ModeBlock{1, 7, 9}, k::ModeBlock{6, 2, 1}, k::ModeBlock{1, 1, 1}}) {
    auto in = buffer(b.left * b.mid * b.right, rng);
    std::vector<double> s(in.size()), p(in.size()), back(in.size());
    k::serial::unfold_mode(in, b, s);
    for (int t : {1, 3}) {
      Threads th(t);
      k::unfold_mode(in, b, p);
      CHECK(p == s);
      k::fold_mode(p, b, back);
      CHECK(back == in);
    }
    k::serial::fold_mode(s, b, back);
    CHECK(back == in);
  }
}

TEST_CASE("mode product twins") {
  std::mt19937_64 rng(2);
  k::ModeBlock b{4, 3, 5};
  auto in = buffer(60, rng);
  Matrix m = oracle::random_matrix(6, 3, rng);
  std::vector<double> s(4 * 6 * 5), p(s.size());
  k::serial::mode_product(in, b, m, s);
  for (int t : {1, 4}) {
    Threads th(t);
    k::mode_product(in, b, m, p);
    CHECK(p == s);
  }
}

TEST_CASE("permute twins") {
  std::mt19937_64 rng(3);
  const std::size_t shape[4] = {2, 3, 4, 2};
  const std::size_t perm[4] = {3, 1, 0, 2};
  auto in = buffer(48, rng);
  std::vector<double> s(48), p(48);
  k::serial::permute(in, shape, perm, s);
  Threads th(3);
  k::permute(in, shape, perm, p);
  CHECK(p == s);
}

TEST_CASE("pairwise distances twins") {
  std::mt19937_64 rng(4);
  std::vector<Matrix> views{oracle::random_matrix(5, 17, rng), oracle::random_matrix(3, 17, rng)};
  Matrix s = k::serial::pairwise_sq_distances(views);
  Threads th(4);
  Matrix p = k::pairwise_sq_distances(views);
  CHECK(p == s);
  CHECK(s == s.transpose());
  CHECK(s.diagonal().cwiseAbs().maxCoeff() == 0);
  double d01 = 0;
  for (const auto& v : views) d01 += (v.col(0) - v.col(1)).squaredNorm();
  CHECK(std::abs(s(0, 1) - d01) <= 1e-12);
}

TEST_CASE("column shrink twins") {
  std::mt19937_64 rng(5);
  Matrix h = oracle::random_matrix(6, 30, rng);
  h.col(3).setZero();
  Matrix s = k::serial::column_shrink(h, 2.0);
  Threads th(4);
  Matrix p = k::column_shrink(h, 2.0);
  CHECK(p == s);
  CHECK(s.col(3).isZero(0));
}

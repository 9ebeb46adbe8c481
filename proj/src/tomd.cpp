#include "tomd/tomd.hpp"

#include <charconv>
#include <sstream>

#include "tomd/error.hpp"
#include "tomd/linalg.hpp"
#include "tomd/network_als.hpp"

namespace tomd {

namespace {

// Bond labels D1..D6 -> 10..15; modes use 0..3.
constexpr int kD1 = 10, kD2 = 11, kD3 = 12, kD4 = 13, kD5 = 14, kD6 = 15;

const std::array<std::vector<int>, 5>& tomd_labels() {
  static const std::array<std::vector<int>, 5> labels{{
      {kD4, 0, kD1, kD5},
      {kD1, 1, kD2},
      {kD2, 2, kD3, kD6},
      {kD3, 3, kD4},
      {kD5, kD6},
  }};
  return labels;
}

detail::NetworkModel to_model(TomdFactors f) {
  detail::NetworkModel m;
  for (std::size_t k = 0; k < 5; ++k) m.cores.push_back({std::move(f.cores[k]), tomd_labels()[k]});
  m.factors = std::move(f.factors);
  return m;
}

TomdFactors from_model(detail::NetworkModel m) {
  TomdFactors f;
  for (std::size_t k = 0; k < 5; ++k) f.cores[k] = std::move(m.cores[k].tensor);
  f.factors = std::move(*m.factors);
  return f;
}

std::size_t as_size(const Eigen::Index i) { return static_cast<std::size_t>(i); }

}  // namespace

TomdRank parse_tomd_rank(const std::string& text) {
  std::vector<std::size_t> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t x = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), x);
    if (ec != std::errc() || p != item.data() + item.size())
      throw RankError("bad rank entry '" + item + "' in '" + text + "'");
    v.push_back(x);
  }
  if (v.size() != 10) throw RankError("a TOMD rank has 10 entries (R1..R4,D1..D6), got '" + text + "'");
  TomdRank r;
  std::copy(v.begin(), v.begin() + 4, r.outer.begin());
  std::copy(v.begin() + 4, v.end(), r.bond.begin());
  return r;
}

std::string to_string(const TomdRank& rank) {
  std::string s;
  for (auto r : rank.outer) s += std::to_string(r) + ",";
  for (std::size_t k = 0; k < 6; ++k) s += std::to_string(rank.bond[k]) + (k < 5 ? "," : "");
  return s;
}

void validate_rank(const Shape& shape, const TomdRank& rank) {
  if (shape.size() != 4) throw ShapeError("TOMD needs a 4-way tensor, got " + shape_string(shape));
  for (std::size_t n = 0; n < 4; ++n) {
    if (rank.outer[n] < 1) throw RankError("outer ranks must be >= 1");
    if (rank.outer[n] > shape[n])
      throw RankError("R" + std::to_string(n + 1) + " = " + std::to_string(rank.outer[n]) +
                      " exceeds extent I" + std::to_string(n + 1) + " = " + std::to_string(shape[n]));
  }
  for (auto d : rank.bond)
    if (d < 1) throw RankError("bond dimensions must be >= 1");
}

std::array<Shape, 5> tomd_core_shapes(const TomdRank& k) {
  const auto& r = k.outer;
  const auto& d = k.bond;
  return {Shape{d[3], r[0], d[0], d[4]}, Shape{d[0], r[1], d[1]}, Shape{d[1], r[2], d[2], d[5]},
          Shape{d[2], r[3], d[3]}, Shape{d[4], d[5]}};
}

TomdRank TomdFactors::rank() const {
  TomdRank k;
  for (std::size_t n = 0; n < 4; ++n) k.outer[n] = cores[n].shape()[1];
  k.bond = {cores[0].shape()[2], cores[1].shape()[2], cores[2].shape()[2],
            cores[3].shape()[2], cores[4].shape()[0], cores[4].shape()[1]};
  return k;
}

Shape TomdFactors::target_shape() const {
  Shape s(4);
  for (std::size_t n = 0; n < 4; ++n) s[n] = as_size(factors[n].rows());
  return s;
}

std::size_t TomdFactors::parameter_count() const {
  std::size_t n = 0;
  for (const auto& c : cores) n += c.size();
  for (const auto& u : factors) n += as_size(u.size());
  return n;
}

void validate_factors(const TomdFactors& f) {
  const std::array<std::size_t, 5> orders{4, 3, 4, 3, 2};
  for (std::size_t k = 0; k < 5; ++k)
    if (f.cores[k].order() != orders[k])
      throw ShapeError("core G" + std::to_string(k + 1) + " must be " + std::to_string(orders[k]) +
                       "-way, got " + shape_string(f.cores[k].shape()));
  const auto expected = tomd_core_shapes(f.rank());
  for (std::size_t k = 0; k < 5; ++k)
    if (f.cores[k].shape() != expected[k])
      throw ShapeError("core G" + std::to_string(k + 1) + " has shape " +
                       shape_string(f.cores[k].shape()) + ", bonds imply " + shape_string(expected[k]));
  for (std::size_t n = 0; n < 4; ++n)
    if (as_size(f.factors[n].cols()) != f.cores[n].shape()[1] || f.factors[n].rows() < 1)
      throw ShapeError("factor U" + std::to_string(n + 1) + " is " + std::to_string(f.factors[n].rows()) +
                       "x" + std::to_string(f.factors[n].cols()) + ", core needs " +
                       std::to_string(f.cores[n].shape()[1]) + " columns");
}

Tensor tomd_core(const TomdFactors& f) {
  validate_factors(f);
  detail::NetworkModel m;
  for (std::size_t k = 0; k < 5; ++k) m.cores.push_back({f.cores[k], tomd_labels()[k]});
  return m.core_tensor();
}

Tensor tomd_reconstruct(const TomdFactors& f) {
  Tensor t = tomd_core(f);
  for (std::size_t n = 0; n < 4; ++n) t = mode_n_product(t, f.factors[n], n);
  return t;
}

std::size_t storage_cost(const Shape& shape, const TomdRank& rank) {
  validate_rank(shape, rank);
  std::size_t total = 0;
  for (std::size_t n = 0; n < 4; ++n) total += shape[n] * rank.outer[n];
  for (const auto& s : tomd_core_shapes(rank)) total += element_count(s);
  return total;
}

TomdFactors random_tomd_factors(const Shape& shape, const TomdRank& rank, std::uint64_t seed) {
  validate_rank(shape, rank);
  const auto cs = tomd_core_shapes(rank);
  std::vector<Shape> shapes(cs.begin(), cs.end());
  for (std::size_t n = 0; n < 4; ++n) shapes.push_back({shape[n], rank.outer[n]});
  auto t = detail::random_cores(shapes, seed);
  TomdFactors f;
  for (std::size_t k = 0; k < 5; ++k) f.cores[k] = std::move(t[k]);
  for (std::size_t n = 0; n < 4; ++n) f.factors[n] = t[5 + n].to_matrix();
  return f;
}

TomdFactors tomd_init(const Tensor& x, const TomdRank& rank, std::uint64_t seed) {
  validate_rank(x.shape(), rank);
  const auto cs = tomd_core_shapes(rank);
  TomdFactors f;
  if (x.is_zero()) {
    for (std::size_t k = 0; k < 5; ++k) f.cores[k] = Tensor(cs[k]);
    for (std::size_t n = 0; n < 4; ++n)
      f.factors[n] = Matrix::Zero(static_cast<Eigen::Index>(x.shape()[n]),
                                  static_cast<Eigen::Index>(rank.outer[n]));
    return f;
  }
  for (std::size_t n = 0; n < 4; ++n)
    f.factors[n] = linalg::leading_left_singular_vectors(mode_n_unfold(x, n), rank.outer[n]);
  auto cores = detail::random_cores(std::vector<Shape>(cs.begin(), cs.end()), seed);
  for (std::size_t k = 0; k < 5; ++k) f.cores[k] = std::move(cores[k]);
  auto model = to_model(std::move(f));
  model.scale_cores_to(x.norm());
  return from_model(std::move(model));
}

TomdResult tomd_als(const Tensor& x, const TomdRank& rank, const AlsConfig& cfg) {
  return tomd_als(x, tomd_init(x, rank, cfg.seed), cfg);
}

TomdResult tomd_als(const Tensor& x, TomdFactors initial, const AlsConfig& cfg) {
  validate_factors(initial);
  if (initial.target_shape() != x.shape())
    throw ShapeError("initial factors target " + shape_string(initial.target_shape()) +
                     " but the tensor is " + shape_string(x.shape()));
  validate_rank(x.shape(), initial.rank());
  auto model = to_model(std::move(initial));
  AlsReport report = detail::run_als(model, x, cfg);
  return {from_model(std::move(model)), std::move(report)};
}

}  // namespace tomd

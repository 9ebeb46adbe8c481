#include "tomd/baselines.hpp"

#include <charconv>
#include <sstream>

#include "tomd/error.hpp"
#include "tomd/linalg.hpp"
#include "tomd/network_als.hpp"

namespace tomd {

namespace {

constexpr int kD1 = 10, kD2 = 11, kD3 = 12, kD4 = 13, kD5 = 14, kD6 = 15;

std::size_t expected_arity(Method m) {
  switch (m) {
    case Method::tucker: return 4;
    case Method::tutr: return 8;
    case Method::ominus: return 6;
    case Method::tomd: return 10;
  }
  return 0;
}

TomdRank as_tomd_rank(const BaselineRank& r) {
  TomdRank k;
  std::copy(r.ranks.begin(), r.ranks.begin() + 4, k.outer.begin());
  std::copy(r.ranks.begin() + 4, r.ranks.end(), k.bond.begin());
  return k;
}

template <std::size_t N>
std::array<std::size_t, N> take(const std::vector<std::size_t>& v, std::size_t offset) {
  std::array<std::size_t, N> a{};
  std::copy(v.begin() + static_cast<std::ptrdiff_t>(offset),
            v.begin() + static_cast<std::ptrdiff_t>(offset + N), a.begin());
  return a;
}

Matrix zero_matrix(std::size_t r, std::size_t c) {
  return Matrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
}

std::array<Matrix, 4> svd_factors(const Tensor& x, const std::array<std::size_t, 4>& ranks) {
  std::array<Matrix, 4> u;
  for (std::size_t n = 0; n < 4; ++n)
    u[n] = x.is_zero() ? zero_matrix(x.shape()[n], ranks[n])
                       : linalg::leading_left_singular_vectors(mode_n_unfold(x, n), ranks[n]);
  return u;
}

Tensor project(const Tensor& x, const std::array<Matrix, 4>& u, std::size_t skip = 4) {
  Tensor t = x;
  for (std::size_t n = 0; n < 4; ++n)
    if (n != skip) t = mode_n_product(t, u[n].transpose(), n);
  return t;
}

std::vector<Shape> tutr_core_shapes(const std::array<std::size_t, 4>& r, const std::array<std::size_t, 4>& d) {
  return {{d[3], r[0], d[0]}, {d[0], r[1], d[1]}, {d[1], r[2], d[2]}, {d[2], r[3], d[3]}};
}

detail::NetworkModel tutr_model(std::array<Tensor, 4> cores, std::array<Matrix, 4> factors) {
  static const std::array<std::vector<int>, 4> labels{{{kD4, 0, kD1}, {kD1, 1, kD2}, {kD2, 2, kD3}, {kD3, 3, kD4}}};
  detail::NetworkModel m;
  for (std::size_t k = 0; k < 4; ++k) m.cores.push_back({std::move(cores[k]), labels[k]});
  m.factors = std::move(factors);
  return m;
}

detail::NetworkModel ominus_model(std::array<Tensor, 5> cores) {
  static const std::array<std::vector<int>, 5> labels{
      {{kD4, 0, kD1, kD5}, {kD1, 1, kD2}, {kD2, 2, kD3, kD6}, {kD3, 3, kD4}, {kD5, kD6}}};
  detail::NetworkModel m;
  for (std::size_t k = 0; k < 5; ++k) m.cores.push_back({std::move(cores[k]), labels[k]});
  return m;
}

std::array<Shape, 5> ominus_core_shapes(const Shape& i, const std::array<std::size_t, 6>& d) {
  TomdRank k;
  k.outer = {i[0], i[1], i[2], i[3]};
  k.bond = d;
  return tomd_core_shapes(k);
}

void check_4way(const Tensor& x) {
  if (x.order() != 4) throw ShapeError("expected a 4-way tensor, got " + shape_string(x.shape()));
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::tucker: return "tucker";
    case Method::tutr: return "tutr";
    case Method::ominus: return "ominus";
    case Method::tomd: return "tomd";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::tucker, Method::tutr, Method::ominus, Method::tomd})
    if (to_string(m) == name) return m;
  throw ValidationError("unknown method '" + name + "' (expected tucker, tutr, ominus or tomd)");
}

BaselineRank parse_baseline_rank(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw RankError("expected METHOD:RANKS, got '" + text + "'");
  BaselineRank r;
  r.variant = parse_method(text.substr(0, colon));
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size())
      throw RankError("bad rank entry '" + item + "' in '" + text + "'");
    r.ranks.push_back(v);
  }
  if (r.ranks.size() != expected_arity(r.variant))
    throw RankError(to_string(r.variant) + " takes " + std::to_string(expected_arity(r.variant)) +
                    " rank entries, got " + std::to_string(r.ranks.size()));
  return r;
}

std::string to_string(const BaselineRank& r) {
  std::string s = to_string(r.variant) + ":";
  for (std::size_t k = 0; k < r.ranks.size(); ++k) s += (k ? "," : "") + std::to_string(r.ranks[k]);
  return s;
}

void validate_rank(const Shape& shape, const BaselineRank& r) {
  if (shape.size() != 4) throw ShapeError("decompositions need a 4-way tensor, got " + shape_string(shape));
  if (r.ranks.size() != expected_arity(r.variant))
    throw RankError(to_string(r.variant) + " takes " + std::to_string(expected_arity(r.variant)) + " rank entries");
  for (auto v : r.ranks)
    if (v < 1) throw RankError("rank entries must be >= 1");
  if (r.variant != Method::ominus)
    for (std::size_t n = 0; n < 4; ++n)
      if (r.ranks[n] > shape[n])
        throw RankError("R" + std::to_string(n + 1) + " = " + std::to_string(r.ranks[n]) +
                        " exceeds extent " + std::to_string(shape[n]));
}

std::size_t storage_cost(const Shape& shape, const BaselineRank& r) {
  validate_rank(shape, r);
  const auto& k = r.ranks;
  std::size_t outer = 0;
  if (r.variant != Method::ominus)
    for (std::size_t n = 0; n < 4; ++n) outer += shape[n] * k[n];
  switch (r.variant) {
    case Method::tucker: return outer + k[0] * k[1] * k[2] * k[3];
    case Method::tutr: return outer + k[7] * k[0] * k[4] + k[4] * k[1] * k[5] + k[5] * k[2] * k[6] + k[6] * k[3] * k[7];
    case Method::ominus: {
      std::size_t total = 0;
      for (const auto& s : ominus_core_shapes(shape, take<6>(k, 0))) total += element_count(s);
      return total;
    }
    case Method::tomd: return storage_cost(shape, as_tomd_rank(r));
  }
  return 0;
}

Tensor reconstruct(const TuckerFactors& f) {
  Tensor t = f.core;
  for (std::size_t n = 0; n < 4; ++n) t = mode_n_product(t, f.factors[n], n);
  return t;
}

Tensor reconstruct(const TutrFactors& f) { return tutr_model(f.cores, f.factors).reconstruct(); }

Tensor reconstruct(const OminusFactors& f) { return ominus_model(f.cores).reconstruct(); }

TuckerResult tucker_als(const Tensor& x, const std::array<std::size_t, 4>& ranks, const AlsConfig& cfg) {
  check_4way(x);
  validate_rank(x.shape(), BaselineRank{Method::tucker, {ranks.begin(), ranks.end()}});
  if (cfg.iter_max < 1) throw ValidationError("ALS iter_max must be at least 1");
  if (!(cfg.tol_als > 0.0)) throw ValidationError("ALS tol_als must be positive");

  TuckerResult res;
  auto& f = res.factors;
  f.factors = svd_factors(x, ranks);
  if (x.is_zero()) {
    f.core = Tensor(Shape{ranks[0], ranks[1], ranks[2], ranks[3]});
    res.report.trace.push_back(0.0);
    res.report.converged = true;
    return res;
  }
  const double xnorm = x.norm();
  auto objective = [&] {
    f.core = project(x, f.factors);
    return frobenius_distance(reconstruct(f), x) / xnorm;
  };
  auto& report = res.report;
  if (cfg.record_block_objectives) report.block_objectives.push_back(objective());
  f.core = project(x, f.factors);
  Tensor current = reconstruct(f);
  for (std::size_t sweep = 0; sweep < cfg.iter_max; ++sweep) {
    const Tensor last = std::move(current);
    for (std::size_t n = 0; n < 4; ++n) {
      const Tensor y = project(x, f.factors, n);
      f.factors[n] = linalg::leading_left_singular_vectors(mode_n_unfold(y, n), ranks[n]);
      if (cfg.record_block_objectives) report.block_objectives.push_back(objective());
    }
    f.core = project(x, f.factors);
    current = reconstruct(f);
    report.trace.push_back(frobenius_distance(current, x) / xnorm);
    ++report.sweeps;
    const double last_norm = last.norm();
    const double change = frobenius_distance(last, current);
    if ((last_norm > 0.0 ? change / last_norm : (change == 0.0 ? 0.0 : INFINITY)) <= cfg.tol_als) {
      report.converged = true;
      break;
    }
  }
  report.final_rse = report.trace.back();
  return res;
}

TutrResult tutr_als(const Tensor& x, const std::array<std::size_t, 4>& ranks,
                    const std::array<std::size_t, 4>& bonds, const AlsConfig& cfg) {
  check_4way(x);
  BaselineRank br{Method::tutr, {ranks.begin(), ranks.end()}};
  br.ranks.insert(br.ranks.end(), bonds.begin(), bonds.end());
  validate_rank(x.shape(), br);
  auto shapes = tutr_core_shapes(ranks, bonds);
  auto random = detail::random_cores(shapes, cfg.seed);
  std::array<Tensor, 4> cores;
  for (std::size_t k = 0; k < 4; ++k) cores[k] = std::move(random[k]);
  auto model = tutr_model(std::move(cores), svd_factors(x, ranks));
  model.scale_cores_to(x.norm());
  TutrResult res;
  res.report = detail::run_als(model, x, cfg);
  for (std::size_t k = 0; k < 4; ++k) res.factors.cores[k] = std::move(model.cores[k].tensor);
  res.factors.factors = std::move(*model.factors);
  return res;
}

OminusResult ominus_als(const Tensor& x, const std::array<std::size_t, 6>& bonds, const AlsConfig& cfg) {
  check_4way(x);
  validate_rank(x.shape(), BaselineRank{Method::ominus, {bonds.begin(), bonds.end()}});
  const auto cs = ominus_core_shapes(x.shape(), bonds);
  auto random = detail::random_cores(std::vector<Shape>(cs.begin(), cs.end()), cfg.seed);
  std::array<Tensor, 5> cores;
  for (std::size_t k = 0; k < 5; ++k) cores[k] = std::move(random[k]);
  auto model = ominus_model(std::move(cores));
  model.scale_cores_to(x.norm());
  OminusResult res;
  res.report = detail::run_als(model, x, cfg);
  for (std::size_t k = 0; k < 5; ++k) res.factors.cores[k] = std::move(model.cores[k].tensor);
  return res;
}

Decomposition decompose(const Tensor& x, const BaselineRank& rank, const AlsConfig& cfg) {
  check_4way(x);
  validate_rank(x.shape(), rank);
  Decomposition d;
  d.rank = rank;
  auto add_factors = [&](const std::array<Matrix, 4>& u) {
    for (std::size_t n = 0; n < 4; ++n) d.parts.emplace_back("U" + std::to_string(n + 1), Tensor::from_matrix(u[n]));
  };
  auto add_cores = [&](const auto& cores) {
    for (std::size_t k = 0; k < cores.size(); ++k) d.parts.emplace_back("G" + std::to_string(k + 1), cores[k]);
  };
  switch (rank.variant) {
    case Method::tucker: {
      auto r = tucker_als(x, take<4>(rank.ranks, 0), cfg);
      d.reconstruction = reconstruct(r.factors);
      d.parts.emplace_back("G", r.factors.core);
      add_factors(r.factors.factors);
      d.report = std::move(r.report);
      break;
    }
    case Method::tutr: {
      auto r = tutr_als(x, take<4>(rank.ranks, 0), take<4>(rank.ranks, 4), cfg);
      d.reconstruction = reconstruct(r.factors);
      add_cores(r.factors.cores);
      add_factors(r.factors.factors);
      d.report = std::move(r.report);
      break;
    }
    case Method::ominus: {
      auto r = ominus_als(x, take<6>(rank.ranks, 0), cfg);
      d.reconstruction = reconstruct(r.factors);
      add_cores(r.factors.cores);
      d.report = std::move(r.report);
      break;
    }
    case Method::tomd: {
      auto r = tomd_als(x, as_tomd_rank(rank), cfg);
      d.reconstruction = tomd_reconstruct(r.factors);
      add_cores(r.factors.cores);
      add_factors(r.factors.factors);
      d.report = std::move(r.report);
      break;
    }
  }
  for (const auto& [name, t] : d.parts) d.stored_scalars += t.size();
  return d;
}

}  // namespace tomd

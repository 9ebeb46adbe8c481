#include "tomd/network_als.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tomd/contraction.hpp"
#include "tomd/error.hpp"
#include "tomd/linalg.hpp"

namespace tomd::detail {

namespace {

// Contracts cores except `skip` (pass cores.size() to keep all) into the
// given label order.
Tensor contract_cores(const std::vector<CoreNode>& cores, std::size_t skip,
                      const std::vector<int>& output) {
  std::vector<Tensor> nodes;
  std::vector<std::vector<int>> labels;
  for (std::size_t c = 0; c < cores.size(); ++c) {
    if (c == skip) continue;
    nodes.push_back(cores[c].tensor);
    labels.push_back(cores[c].labels);
  }
  return contract(network_from_labels(std::move(nodes), labels, output));
}

std::vector<int> all_modes() { return {0, 1, 2, 3}; }

}  // namespace

Tensor NetworkModel::core_tensor() const { return contract_cores(cores, cores.size(), all_modes()); }

Tensor NetworkModel::reconstruct() const {
  Tensor t = core_tensor();
  if (factors)
    for (std::size_t n = 0; n < 4; ++n) t = mode_n_product(t, (*factors)[n], n);
  return t;
}

int NetworkModel::open_mode(std::size_t k) const {
  for (int l : cores[k].labels)
    if (is_mode_label(l)) return l;
  return -1;
}

std::size_t NetworkModel::open_axis(std::size_t k) const {
  const auto& l = cores[k].labels;
  return static_cast<std::size_t>(
      std::find_if(l.begin(), l.end(), [](int x) { return is_mode_label(x); }) - l.begin());
}

std::size_t NetworkModel::bond_count(std::size_t k) const {
  return static_cast<std::size_t>(
      std::count_if(cores[k].labels.begin(), cores[k].labels.end(), [](int l) { return !is_mode_label(l); }));
}

Matrix NetworkModel::factor_design(std::size_t n) const {
  Tensor a = core_tensor();
  for (std::size_t m = 0; m < 4; ++m)
    if (m != n) a = mode_n_product(a, (*factors)[m], m);
  return mode_n_unfold(a, n);
}

Tensor NetworkModel::environment(std::size_t k) const {
  std::vector<int> output;
  for (int l : cores[k].labels)
    if (!is_mode_label(l)) output.push_back(l);
  const std::size_t nb = output.size();
  const int own = open_mode(k);
  for (int m = 0; m < kModeLabels; ++m)
    if (m != own) output.push_back(m);
  Tensor env = contract_cores(cores, k, output);
  if (factors)
    for (std::size_t pos = nb; pos < output.size(); ++pos)
      env = mode_n_product(env, (*factors)[static_cast<std::size_t>(output[pos])], pos);
  return env;
}

Matrix NetworkModel::environment_matrix(std::size_t k) const {
  return n_unfold(environment(k), bond_count(k));
}

std::size_t NetworkModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& c : cores) n += c.tensor.size();
  if (factors)
    for (const auto& u : *factors) n += static_cast<std::size_t>(u.size());
  return n;
}

void NetworkModel::scale_cores_to(double target_norm) {
  const double current = reconstruct().norm();
  if (current == 0.0 || target_norm == 0.0) return;
  const double per_core = std::pow(target_norm / current, 1.0 / static_cast<double>(cores.size()));
  for (auto& c : cores) c.tensor *= per_core;
}

void NetworkModel::set_zero() {
  for (auto& c : cores) c.tensor *= 0.0;
  if (factors)
    for (auto& u : *factors) u.setZero();
}

namespace {

// Factors replaced by the R of their thin QR (U = QR) and the data by
// x x_m Q_m^T. Every exact block update in the reduced problem equals the one
// in the full problem, since pinv(B Q^T) = Q pinv(B) for orthonormal Q.
struct Projected {
  NetworkModel model;
  Tensor x;
};

Projected project(const NetworkModel& model, const Tensor& x, int skip) {
  Projected p{model, x};
  auto& f = *p.model.factors;
  for (std::size_t m = 0; m < 4; ++m) {
    if (static_cast<int>(m) == skip) continue;
    const Matrix& u = (*model.factors)[m];
    Eigen::HouseholderQR<Matrix> qr(u);
    const Matrix q = qr.householderQ() * Matrix::Identity(u.rows(), u.cols());
    f[m] = qr.matrixQR().topRows(u.cols()).triangularView<Eigen::Upper>();
    p.x = mode_n_product(p.x, q.transpose(), m);
  }
  return p;
}

void solve_core(NetworkModel& model, const Tensor& x, std::size_t k) {
  const Matrix env = model.environment_matrix(k);
  Tensor& core = model.cores[k].tensor;
  const int mode = model.open_mode(k);
  if (mode < 0) {
    const Matrix g = linalg::least_squares_right(env, x.as_matrix(1, x.size()));
    core = Tensor(core.shape(), std::vector<double>(g.data(), g.data() + g.size()));
    return;
  }
  const auto n = static_cast<std::size_t>(mode);
  // min ||X_(n) - U G A||  ->  G = pinv(U) X_(n) pinv(A)
  const Matrix xn = mode_n_unfold(x, n);
  const Matrix left = model.factors ? linalg::least_squares((*model.factors)[n], xn) : xn;
  core = mode_n_fold(linalg::least_squares_right(env, left), model.open_axis(k), core.shape());
}

}  // namespace

void update_factor(NetworkModel& model, const Tensor& x, std::size_t n) {
  if (!model.factors) throw NetworkError("update_factor on a model without outer factors");
  const auto p = project(model, x, static_cast<int>(n));
  (*model.factors)[n] = linalg::least_squares_right(p.model.factor_design(n), mode_n_unfold(p.x, n));
}

void update_core(NetworkModel& model, const Tensor& x, std::size_t k) {
  if (!model.factors) {
    solve_core(model, x, k);
    return;
  }
  auto p = project(model, x, -1);
  solve_core(p.model, p.x, k);
  model.cores[k] = std::move(p.model.cores[k]);
}

AlsReport run_als(NetworkModel& model, const Tensor& x, const AlsConfig& cfg) {
  if (cfg.iter_max < 1) throw ValidationError("ALS iter_max must be at least 1");
  if (!(cfg.tol_als > 0.0)) throw ValidationError("ALS tol_als must be positive");
  if (x.order() != 4) throw ShapeError("ALS expects a 4-way tensor, got " + shape_string(x.shape()));

  AlsReport report;
  if (x.is_zero()) {
    model.set_zero();
    report.trace.push_back(0.0);
    report.converged = true;
    return report;
  }
  const double xnorm = x.norm();
  auto record = [&] {
    if (cfg.record_block_objectives)
      report.block_objectives.push_back(frobenius_distance(model.reconstruct(), x) / xnorm);
  };

  std::vector<std::size_t> carrying, bridges;
  for (std::size_t k = 0; k < model.cores.size(); ++k)
    (model.open_mode(k) >= 0 ? carrying : bridges).push_back(k);

  Tensor current = model.reconstruct();
  record();
  for (std::size_t sweep = 0; sweep < cfg.iter_max; ++sweep) {
    const Tensor last = std::move(current);
    if (model.factors)
      for (std::size_t n = 0; n < 4; ++n) {
        update_factor(model, x, n);
        record();
      }
    // factors stay fixed through the core phase, so project once
    std::optional<Projected> p;
    if (model.factors) p = project(model, x, -1);
    for (auto group : {&carrying, &bridges})
      for (auto k : *group) {
        if (p) {
          solve_core(p->model, p->x, k);
          model.cores[k].tensor = p->model.cores[k].tensor;
        } else {
          solve_core(model, x, k);
        }
        record();
      }
    current = model.reconstruct();
    report.trace.push_back(frobenius_distance(current, x) / xnorm);
    ++report.sweeps;
    const double last_norm = last.norm();
    const double change = frobenius_distance(last, current);
    const double f1 = last_norm > 0.0 ? change / last_norm : (change == 0.0 ? 0.0 : INFINITY);
    if (f1 <= cfg.tol_als) {
      report.converged = true;
      break;
    }
  }
  report.final_rse = report.trace.back();
  return report;
}

std::vector<Tensor> random_cores(const std::vector<Shape>& shapes, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Tensor> out;
  for (const auto& s : shapes) {
    Tensor t(s);
    for (double& v : t.data()) v = normal(rng);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace tomd::detail

#include "tomd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tomd/error.hpp"

namespace tomd {

namespace {

void check_lengths(const std::vector<int>& pred, const std::vector<int>& truth, std::size_t min_len) {
  if (pred.size() != truth.size())
    throw ValidationError("label length mismatch: " + std::to_string(pred.size()) + " predicted vs " +
                          std::to_string(truth.size()) + " true");
  if (pred.size() < min_len)
    throw ValidationError("need at least " + std::to_string(min_len) + " labels, got " + std::to_string(pred.size()));
}

std::vector<int> compact(const std::vector<int>& labels, int& count) {
  std::map<int, int> ids;
  for (int l : labels) ids.emplace(l, 0);
  int next = 0;
  for (auto& [l, id] : ids) id = next++;
  count = next;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = ids[labels[i]];
  return out;
}

double choose2(double x) { return 0.5 * x * (x - 1.0); }

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

Matrix contingency_table(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth, 0);
  int kp = 0, kt = 0;
  const auto p = compact(pred, kp);
  const auto t = compact(truth, kt);
  Matrix c = Matrix::Zero(kp, kt);
  for (std::size_t i = 0; i < p.size(); ++i) c(p[i], t[i]) += 1.0;
  return c;
}

PairCounts pair_counts(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Matrix c = contingency_table(pred, truth);
  double same_both = 0, same_pred = 0, same_truth = 0;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) same_both += choose2(c(i, j));
  for (Eigen::Index i = 0; i < c.rows(); ++i) same_pred += choose2(c.row(i).sum());
  for (Eigen::Index j = 0; j < c.cols(); ++j) same_truth += choose2(c.col(j).sum());
  PairCounts pc;
  pc.tp = same_both;
  pc.fp = same_pred - same_both;
  pc.fn = same_truth - same_both;
  pc.tn = choose2(static_cast<double>(pred.size())) - pc.tp - pc.fp - pc.fn;
  return pc;
}

Prf pair_counting_prf(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth, 2);
  const auto pc = pair_counts(pred, truth);
  Prf r;
  r.precision = ratio(pc.tp, pc.tp + pc.fp);
  r.recall = ratio(pc.tp, pc.tp + pc.fn);
  r.f_score = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
  return r;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm) {
  check_lengths(pred, truth, 1);
  const Matrix c = contingency_table(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Vector a = c.rowwise().sum(), b = c.colwise().sum().transpose();
  double mi = 0, ha = 0, hb = 0;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (c(i, j) > 0) mi += c(i, j) / n * std::log(n * c(i, j) / (a[i] * b[j]));
  for (Eigen::Index i = 0; i < a.size(); ++i) ha -= a[i] / n * std::log(a[i] / n);
  for (Eigen::Index j = 0; j < b.size(); ++j) hb -= b[j] / n * std::log(b[j] / n);
  const double den = norm == NmiNorm::geometric ? std::sqrt(ha * hb) : 0.5 * (ha + hb);
  if (den <= 0.0) return (c.rows() == 1 && c.cols() == 1) ? 1.0 : 0.0;
  return std::clamp(mi / den, 0.0, 1.0);
}

double adjusted_rand(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth, 2);
  const Matrix c = contingency_table(pred, truth);
  double index = 0, sa = 0, sb = 0;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) index += choose2(c(i, j));
  for (Eigen::Index i = 0; i < c.rows(); ++i) sa += choose2(c.row(i).sum());
  for (Eigen::Index j = 0; j < c.cols(); ++j) sb += choose2(c.col(j).sum());
  const double expected = sa * sb / choose2(static_cast<double>(pred.size()));
  const double max_index = 0.5 * (sa + sb);
  const double den = max_index - expected;
  if (den == 0.0) {
    // identical partitions: each row and column of the table has one nonzero
    const auto nonzero = (c.array() > 0).count();
    return (nonzero == c.rows() && nonzero == c.cols()) ? 1.0 : 0.0;
  }
  return (index - expected) / den;
}

std::vector<int> max_weight_assignment(const Matrix& weights) {
  const auto rows = weights.rows(), cols = weights.cols();
  const Eigen::Index n = std::max(rows, cols);
  if (n == 0) return {};
  // Square min-cost form, padded with zero-weight cells.
  const double top = weights.size() ? weights.maxCoeff() : 0.0;
  Matrix cost = Matrix::Constant(n, n, top);
  cost.topLeftCorner(rows, cols).array() = top - weights.array();

  // Shortest augmenting path Hungarian, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Eigen::Index> p(n + 1, 0), way(n + 1, 0);
  for (Eigen::Index i = 1; i <= n; ++i) {
    p[0] = i;
    Eigen::Index j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const Eigen::Index i0 = p[j0];
      double delta = inf;
      Eigen::Index j1 = 0;
      for (Eigen::Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Eigen::Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Eigen::Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> match(static_cast<std::size_t>(rows), -1);
  for (Eigen::Index j = 1; j <= n; ++j)
    if (p[j] >= 1 && p[j] <= rows && j <= cols) match[static_cast<std::size_t>(p[j] - 1)] = static_cast<int>(j - 1);
  return match;
}

double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  check_lengths(pred, truth, 1);
  const Matrix c = contingency_table(pred, truth);
  const auto match = max_weight_assignment(c);
  double hit = 0;
  for (std::size_t i = 0; i < match.size(); ++i)
    if (match[i] >= 0) hit += c(static_cast<Eigen::Index>(i), match[i]);
  return hit / static_cast<double>(pred.size());
}

MetricReport evaluate(const std::vector<int>& pred, const std::vector<int>& truth, NmiNorm norm) {
  const auto prf = pair_counting_prf(pred, truth);
  MetricReport r;
  r.f_score = prf.f_score;
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.nmi = nmi(pred, truth, norm);
  r.ar = adjusted_rand(pred, truth);
  r.acc = accuracy(pred, truth);
  return r;
}

}  // namespace tomd

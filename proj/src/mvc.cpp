#include "tomd/mvc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <Eigen/Cholesky>

#include "tomd/error.hpp"
#include "tomd/kernels.hpp"

namespace tomd {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::vector<Eigen::Index> row_offsets(const MultiViewDataset& d) {
  std::vector<Eigen::Index> off{0};
  for (const auto& x : d.views) off.push_back(off.back() + x.rows());
  return off;
}

Shape z_shape(const MultiViewDataset& d) {
  return {d.reshape_dims[0], d.reshape_dims[1], d.reshape_dims[2], d.view_count()};
}

bool all_blocks_nonzero(const TomdFactors& f) {
  for (const auto& c : f.cores)
    if (c.is_zero()) return false;
  for (const auto& u : f.factors)
    if (u.isZero(0.0)) return false;
  return true;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

std::size_t MultiViewDataset::samples() const {
  return views.empty() ? 0 : static_cast<std::size_t>(views.front().cols());
}

std::size_t MultiViewDataset::total_features() const {
  std::size_t c = 0;
  for (const auto& x : views) c += static_cast<std::size_t>(x.rows());
  return c;
}

void validate(const MultiViewDataset& d) {
  if (d.views.empty()) throw ShapeError("dataset has no views");
  const auto n = d.samples();
  if (n == 0) throw ShapeError("dataset has no samples");
  for (std::size_t v = 0; v < d.views.size(); ++v) {
    if (static_cast<std::size_t>(d.views[v].cols()) != n)
      throw ShapeError("view " + std::to_string(v + 1) + " has " + std::to_string(d.views[v].cols()) +
                       " samples, view 1 has " + std::to_string(n));
    if (d.views[v].rows() == 0) throw ShapeError("view " + std::to_string(v + 1) + " has no features");
    if (!d.views[v].allFinite()) throw ValidationError("view " + std::to_string(v + 1) + " has non-finite entries");
  }
  if (d.labels && d.labels->size() != n)
    throw ShapeError("label count " + std::to_string(d.labels->size()) + " != sample count " + std::to_string(n));
  const auto& r = d.reshape_dims;
  if (r[0] * r[1] * r[2] != n * n)
    throw ShapeError("reshape dims " + std::to_string(r[0]) + "x" + std::to_string(r[1]) + "x" +
                     std::to_string(r[2]) + " do not multiply to N^2 = " + std::to_string(n * n));
}

std::array<std::size_t, 3> near_cubic_factorization(std::size_t n) {
  if (n == 0) throw ValidationError("near_cubic_factorization needs n >= 1");
  const std::size_t total = n * n;
  std::array<std::size_t, 3> best{total, 1, 1};
  double best_score = std::log(static_cast<double>(total));
  for (std::size_t a = 1; a * a * a <= total; ++a) {
    if (total % a) continue;
    const std::size_t rest = total / a;
    for (std::size_t b = a; b * b <= rest; ++b) {
      if (rest % b) continue;
      const std::size_t c = rest / b;
      // spread in log space; smaller is more cube-like
      const double score = std::log(static_cast<double>(c)) - std::log(static_cast<double>(a));
      if (score < best_score - 1e-12) {
        best_score = score;
        best = {c, b, a};
      }
    }
  }
  return best;
}

void validate(const AdmmConfig& cfg, const MultiViewDataset& d) {
  validate(d);
  if (!(cfg.mu >= 0.0) || !std::isfinite(cfg.mu)) throw ValidationError("mu must be a finite value >= 0");
  if (cfg.neighbors < 1 || cfg.neighbors >= d.samples())
    throw ValidationError("K = " + std::to_string(cfg.neighbors) + " must satisfy 1 <= K < N = " +
                          std::to_string(d.samples()));
  if (!(cfg.tau0 > 0.0)) throw ValidationError("tau0 must be > 0");
  if (!(cfg.beta > 1.0)) throw ValidationError("beta must be > 1");
  if (!(cfg.tau_max >= cfg.tau0)) throw ValidationError("tau_max must be >= tau0");
  if (!(cfg.tol > 0.0)) throw ValidationError("tol must be > 0");
  if (cfg.iter_max < 1) throw ValidationError("iter_max must be >= 1");
  validate_rank(z_shape(d), cfg.rank);
}

AdmmState initial_state(const MultiViewDataset& d, const AdmmConfig& cfg) {
  const auto n = idx(d.samples());
  AdmmState st;
  st.z.assign(d.view_count(), Matrix::Zero(n, n));
  st.s = st.z;
  st.y = st.z;
  st.e = Matrix::Zero(idx(d.total_features()), n);
  st.w = st.e;
  st.m = Matrix::Zero(n, n);
  st.tau = cfg.tau0;
  return st;
}

Tensor stack_views(const std::vector<Matrix>& mats) {
  if (mats.empty()) throw ShapeError("stack_views needs at least one matrix");
  const auto r = mats.front().rows(), c = mats.front().cols();
  Tensor t({static_cast<std::size_t>(r), static_cast<std::size_t>(c), mats.size()});
  double* p = t.data().data();
  for (const auto& m : mats) {
    if (m.rows() != r || m.cols() != c) throw ShapeError("stack_views: matrices differ in shape");
    std::copy(m.data(), m.data() + m.size(), p);
    p += m.size();
  }
  return t;
}

std::vector<Matrix> unstack_views(const Tensor& t) {
  if (t.order() != 3) throw ShapeError("unstack_views needs a 3-way tensor, got " + shape_string(t.shape()));
  const auto r = idx(t.shape()[0]), c = idx(t.shape()[1]);
  std::vector<Matrix> out;
  const double* p = t.data().data();
  for (std::size_t v = 0; v < t.shape()[2]; ++v, p += r * c) out.emplace_back(Eigen::Map<const Matrix>(p, r, c));
  return out;
}

ZUpdate update_z(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg) {
  std::vector<Matrix> target(st.s.size());
  for (std::size_t v = 0; v < st.s.size(); ++v) target[v] = st.s[v] - st.y[v] / st.tau;
  const Tensor t = reshape_phi(stack_views(target), z_shape(d));
  validate_rank(t.shape(), cfg.rank);
  // Zero factors are a fixed point of ALS, so only warm-start from a live fit.
  TomdResult fit = (cfg.warm_start && st.factors && all_blocks_nonzero(*st.factors) && st.factors->rank() == cfg.rank)
                       ? tomd_als(t, *st.factors, cfg.als)
                       : tomd_als(t, cfg.rank, cfg.als);
  Tensor rec = tomd_reconstruct(fit.factors);
  const auto n = d.samples();
  ZUpdate out;
  out.z = unstack_views(reshape_phi(rec, {n, n, d.view_count()}));
  out.factors = std::move(fit.factors);
  out.report = std::move(fit.report);
  return out;
}

std::vector<Matrix> update_s(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg,
                             const Matrix& laplacian) {
  const auto n = idx(d.samples());
  const auto off = row_offsets(d);
  const double tau = st.tau;
  std::vector<Matrix> s(d.view_count());
  const int nv = static_cast<int>(d.view_count());
  bool failed = false;
#pragma omp parallel for schedule(static) reduction(|| : failed)
  for (int v = 0; v < nv; ++v) {
    const Matrix& x = d.views[v];
    const auto e = st.e.middleRows(off[v], x.rows());
    const auto w = st.w.middleRows(off[v], x.rows());
    Matrix a = tau * (Matrix::Identity(n, n) + x.transpose() * x) + (2.0 * cfg.mu) * laplacian;
    Matrix b = tau * st.z[v] + st.y[v] + tau * (x.transpose() * (x - e + w / tau));
    Eigen::LLT<Matrix> llt(a);
    Matrix sol;
    if (llt.info() == Eigen::Success) sol = llt.solve(b);
    else sol = a.ldlt().solve(b);
    const double res = (a * sol - b).norm();
    if (!(res <= 1e-6 * std::max(1.0, b.norm()))) failed = true;
    s[v] = std::move(sol);
  }
  if (failed) throw NumericalError("S-update linear system solved with residual above 1e-6");
  return s;
}

Matrix update_e(const AdmmState& st, const MultiViewDataset& d) {
  const auto off = row_offsets(d);
  Matrix h(off.back(), idx(d.samples()));
  for (std::size_t v = 0; v < d.view_count(); ++v) {
    const Matrix& x = d.views[v];
    h.middleRows(off[v], x.rows()) = x - x * st.s[v] + st.w.middleRows(off[v], x.rows()) / st.tau;
  }
  return kernels::column_shrink(h, 1.0 / st.tau);
}

Matrix neighbor_distances(const std::vector<Matrix>& s) { return kernels::pairwise_sq_distances(s); }

Vector adaptive_neighbor_weights(const Vector& p, std::size_t self, std::size_t k, bool include_self) {
  if (k < 1) throw ValidationError("neighbor count must be >= 1");
  std::vector<std::size_t> cand;
  for (std::size_t j = 0; j < static_cast<std::size_t>(p.size()); ++j)
    if ((include_self || j != self) && std::isfinite(p[idx(j)])) cand.push_back(j);
  Vector m = Vector::Zero(p.size());
  if (cand.empty()) return m;
  std::stable_sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) { return p[idx(a)] < p[idx(b)]; });
  if (cand.size() <= k) {
    for (auto j : cand) m[idx(j)] = 1.0 / static_cast<double>(cand.size());
    return m;
  }
  const double pk1 = p[idx(cand[k])];
  double sum = 0.0;
  for (std::size_t t = 0; t < k; ++t) sum += p[idx(cand[t])];
  const double denom = static_cast<double>(k) * pk1 - sum;
  if (!(denom > 0.0)) {
    for (std::size_t t = 0; t < k; ++t) m[idx(cand[t])] = 1.0 / static_cast<double>(k);
    return m;
  }
  for (std::size_t t = 0; t < k; ++t) m[idx(cand[t])] = std::clamp((pk1 - p[idx(cand[t])]) / denom, 0.0, 1.0);
  return m;
}

Matrix update_m(const AdmmState& st, const AdmmConfig& cfg) {
  const Matrix p = neighbor_distances(st.s);
  const auto n = p.cols();
  Matrix m(n, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < n; ++i)
    m.col(i) = adaptive_neighbor_weights(p.col(i), static_cast<std::size_t>(i), cfg.neighbors, cfg.include_self);
  return m;
}

Matrix graph_laplacian(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("affinity must be square");
  if (m.size() && m.minCoeff() < 0.0) throw AffinityError("affinity has negative entries");
  if (!m.allFinite()) throw AffinityError("affinity has non-finite entries");
  const Matrix sym = 0.5 * (m + m.transpose());
  Matrix l = -sym;
  l.diagonal() += sym.rowwise().sum();
  return l;
}

MultiplierUpdate update_multipliers(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg) {
  const auto off = row_offsets(d);
  MultiplierUpdate out{st.w, st.y, st.tau};
  for (std::size_t v = 0; v < d.view_count(); ++v) {
    const Matrix& x = d.views[v];
    out.w.middleRows(off[v], x.rows()) += st.tau * (x - x * st.s[v] - st.e.middleRows(off[v], x.rows()));
    out.y[v] += st.tau * (st.z[v] - st.s[v]);
  }
  out.tau = std::min(cfg.beta * st.tau, cfg.tau_max);
  return out;
}

Residuals compute_residuals(const AdmmState& st, const MultiViewDataset& d) {
  const auto off = row_offsets(d);
  Residuals r;
  for (std::size_t v = 0; v < d.view_count(); ++v) {
    const Matrix& x = d.views[v];
    const double rec = max_abs(x - x * st.s[v] - st.e.middleRows(off[v], x.rows()));
    const double match = max_abs(st.z[v] - st.s[v]);
    r.reconstruction = std::max(r.reconstruction, rec);
    r.match = std::max(r.match, match);
    r.reconstruction_mean += rec;
    r.match_mean += match;
  }
  r.reconstruction_mean /= static_cast<double>(d.view_count());
  r.match_mean /= static_cast<double>(d.view_count());
  return r;
}

Matrix affinity_from_z(const std::vector<Matrix>& z) {
  if (z.empty()) throw ShapeError("affinity_from_z needs at least one view");
  Matrix m = Matrix::Zero(z.front().rows(), z.front().cols());
  for (const auto& zv : z) {
    if (zv.rows() != zv.cols() || zv.rows() != m.rows()) throw ShapeError("Z slices must be N x N");
    const Matrix a = zv.cwiseAbs();
    m += a + a.transpose();
  }
  return m / static_cast<double>(z.size());
}

AdmmResult admm_solve(const MultiViewDataset& d, const AdmmConfig& cfg) {
  validate(cfg, d);
  return admm_resume(d, cfg, initial_state(d, cfg));
}

AdmmResult admm_resume(const MultiViewDataset& d, const AdmmConfig& cfg, AdmmState st,
                       std::vector<TraceEntry> trace) {
  validate(cfg, d);
  const auto n = idx(d.samples());
  if (st.z.size() != d.view_count() || st.s.size() != d.view_count() || st.y.size() != d.view_count() ||
      st.m.rows() != n || st.e.rows() != idx(d.total_features()) || st.e.cols() != n || st.w.rows() != st.e.rows())
    throw ShapeError("ADMM state does not match the dataset");
  while (!st.converged && st.iter < cfg.iter_max) {
    ZUpdate zu = update_z(st, d, cfg);
    st.z = std::move(zu.z);
    st.factors = std::move(zu.factors);
    st.s = update_s(st, d, cfg, graph_laplacian(st.m));
    st.e = update_e(st, d);
    st.m = update_m(st, cfg);
    auto mu = update_multipliers(st, d, cfg);
    st.w = std::move(mu.w);
    st.y = std::move(mu.y);
    st.tau = mu.tau;
    st.residuals = compute_residuals(st, d);
    ++st.iter;
    trace.push_back({st.iter, st.residuals, st.tau, zu.report.sweeps});
    if (!std::isfinite(st.residuals.reconstruction) || !std::isfinite(st.residuals.match))
      throw NumericalError("ADMM diverged at iteration " + std::to_string(st.iter));
    st.converged = std::max(st.residuals.reconstruction, st.residuals.match) <= cfg.tol;
  }
  return {std::move(st), std::move(trace)};
}

}  // namespace tomd

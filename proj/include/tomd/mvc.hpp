#pragma once

// Low-rank multi-view subspace clustering with a TOMD-constrained
// self-representation tensor, solved by ADMM:
//
//   min  mu * sum_v tr(S_v^T L S_v) + lambda ||M||_F^2 + ||E||_{2,1}
//   s.t. X_v = X_v S_v + E_v,  Z = S,  Z = reshape(TOMD reconstruction),
//        M^T 1 = 1, 0 <= M <= 1
//
// lambda is implicit: the adaptive-neighbor M-update fixes it per column
// from the neighbor count K.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tomd/tensor.hpp"
#include "tomd/tomd.hpp"

namespace tomd {

struct MultiViewDataset {
  std::vector<Matrix> views;               // C_v x N
  std::optional<std::vector<int>> labels;  // ground truth, length N
  std::array<std::size_t, 3> reshape_dims{1, 1, 1};  // N1 * N2 * N3 == N^2

  std::size_t samples() const;
  std::size_t view_count() const { return views.size(); }
  std::size_t total_features() const;
};

// Throws ShapeError / ValidationError on inconsistent views, labels or dims.
void validate(const MultiViewDataset& d);

// Factorization N1 >= N2 >= N3 of n^2 that is closest to a cube.
std::array<std::size_t, 3> near_cubic_factorization(std::size_t n);

struct AdmmConfig {
  double mu = 1.0;
  std::size_t neighbors = 5;  // K
  TomdRank rank;
  double tau0 = 1.0;
  double beta = 1.5;
  double tau_max = 1e10;
  double tol = 1e-7;
  std::size_t iter_max = 150;
  AlsConfig als{50, 1e-12, 0, false};
  bool include_self = false;  // let a sample count as its own neighbor
  bool warm_start = true;     // seed each Z-update's ALS with the previous factors
};

void validate(const AdmmConfig& cfg, const MultiViewDataset& d);

struct Residuals {
  double reconstruction = 0.0;  // max_v ||X_v - X_v S_v - E_v||_inf
  double match = 0.0;           // ||Z - S||_inf
  double reconstruction_mean = 0.0;  // (1/V) sum_v of the same, as plotted in convergence curves
  double match_mean = 0.0;
};

struct AdmmState {
  std::vector<Matrix> z, s, y;  // N x N per view
  Matrix e, w;                  // (sum C_v) x N, view blocks stacked vertically
  Matrix m;                     // N x N affinity, columns on the simplex
  double tau = 1.0;
  std::size_t iter = 0;
  Residuals residuals;
  bool converged = false;
  std::optional<TomdFactors> factors;  // last Z-update fit, for warm starts
};

// All-zero state, tau = tau0.
AdmmState initial_state(const MultiViewDataset& d, const AdmmConfig& cfg);

// Stack per-view N x N matrices into an N x N x V tensor and back.
Tensor stack_views(const std::vector<Matrix>& mats);
std::vector<Matrix> unstack_views(const Tensor& t);

struct ZUpdate {
  std::vector<Matrix> z;
  TomdFactors factors;
  AlsReport report;
};

// Fits TOMD-ALS to reshape(S - Y/tau, (N1, N2, N3, V)) and maps the
// reconstruction back to N x N x V.
ZUpdate update_z(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg);

// Per view, solves (tau (I + X^T X) + 2 mu L) S = tau Z + Y + tau X^T (X - E + W/tau).
std::vector<Matrix> update_s(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg,
                             const Matrix& laplacian);

// H = [X_v - X_v S_v + W_v / tau]_v stacked; column-wise l2 shrinkage by 1/tau.
Matrix update_e(const AdmmState& st, const MultiViewDataset& d);

// p(i, j) = sum_v ||S_v(:, i) - S_v(:, j)||^2.
Matrix neighbor_distances(const std::vector<Matrix>& s);

// Adaptive-neighbor weights for one column from its distances to every
// sample; `self` is excluded from the candidates unless include_self.
Vector adaptive_neighbor_weights(const Vector& p, std::size_t self, std::size_t k, bool include_self);

// Column i of the result holds the adaptive-neighbor weights of sample i.
Matrix update_m(const AdmmState& st, const AdmmConfig& cfg);

// L = D - (M + M^T)/2, D_ii = sum_j (m_ij + m_ji)/2. Throws AffinityError on negative entries.
Matrix graph_laplacian(const Matrix& m);

struct MultiplierUpdate {
  Matrix w;
  std::vector<Matrix> y;
  double tau = 1.0;
};
MultiplierUpdate update_multipliers(const AdmmState& st, const MultiViewDataset& d, const AdmmConfig& cfg);

Residuals compute_residuals(const AdmmState& st, const MultiViewDataset& d);

// (1/V) sum_v (|Z_v| + |Z_v^T|).
Matrix affinity_from_z(const std::vector<Matrix>& z);

struct TraceEntry {
  std::size_t iter = 0;
  Residuals residuals;
  double tau = 0.0;
  std::size_t als_sweeps = 0;
};

struct AdmmResult {
  AdmmState state;
  std::vector<TraceEntry> trace;
};

AdmmResult admm_solve(const MultiViewDataset& d, const AdmmConfig& cfg);
// Continues from a saved state until convergence or cfg.iter_max total iterations.
AdmmResult admm_resume(const MultiViewDataset& d, const AdmmConfig& cfg, AdmmState state,
                       std::vector<TraceEntry> trace = {});

// Checkpoint: <dir>/state.json plus one tensor text file per iterate.
void save_checkpoint(const std::string& dir, const AdmmResult& r);
AdmmResult load_checkpoint(const std::string& dir);

}  // namespace tomd

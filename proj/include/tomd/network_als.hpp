#pragma once

// ALS over a small core network wrapped (optionally) in Tucker factor
// matrices. TOMD, TuTR and Ominus are all instances: they differ only in the
// core topology and in whether outer factors are present.
//
// Axis labels 0..3 mark the open axis carrying outer mode n; any other label
// is a bond and must appear on exactly two cores.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "tomd/tensor.hpp"
#include "tomd/tomd.hpp"

namespace tomd::detail {

inline constexpr int kModeLabels = 4;
inline bool is_mode_label(int label) { return label >= 0 && label < kModeLabels; }

struct CoreNode {
  Tensor tensor;
  std::vector<int> labels;
};

struct NetworkModel {
  std::vector<CoreNode> cores;
  std::optional<std::array<Matrix, 4>> factors;  // absent: cores carry the data modes directly

  // Contraction of all cores, axes ordered by mode 0..3.
  Tensor core_tensor() const;
  Tensor reconstruct() const;

  // Outer mode on core k, or -1 for a bridge core without one.
  int open_mode(std::size_t k) const;
  std::size_t open_axis(std::size_t k) const;
  std::size_t bond_count(std::size_t k) const;

  // A = core x_{m != n} U_m; returns its mode-n unfolding. X_(n) = U_n A_(n).
  Matrix factor_design(std::size_t n) const;

  // Contraction of every core except k, with outer factors applied. Axes are
  // core k's bonds in its own axis order, then every mode not carried by k in
  // increasing order.
  Tensor environment(std::size_t k) const;

  // n-unfolding of environment(k) split after the bonds. For a core carrying
  // mode n:  X_(n) = U_n * G_k(q) * environment_matrix(k)  with q its open axis.
  // For a bridge core:  vec(X)^T = vec(G_k)^T * environment_matrix(k).
  Matrix environment_matrix(std::size_t k) const;

  std::size_t parameter_count() const;
  void scale_cores_to(double target_norm);
  void set_zero();
};

// Exact block minimizers; both leave every other block untouched.
void update_factor(NetworkModel& model, const Tensor& x, std::size_t n);
void update_core(NetworkModel& model, const Tensor& x, std::size_t k);

// Sweeps: every outer factor in mode order, then every core carrying a mode,
// then bridge cores. Stops when ||X_last - X_new|| / ||X_last|| <= tol_als.
AlsReport run_als(NetworkModel& model, const Tensor& x, const AlsConfig& cfg);

// Random standard-normal cores of the given shapes.
std::vector<Tensor> random_cores(const std::vector<Shape>& shapes, std::uint64_t seed);

}  // namespace tomd::detail
